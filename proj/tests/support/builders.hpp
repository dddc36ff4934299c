#pragma once

// Shared instance builders for the unit and acceptance suites.

#include <random>
#include <utility>
#include <vector>

#include "qamineq/qamineq.hpp"

namespace testsupport {

using namespace qamineq;

inline Primitive random_primitive(std::mt19937_64& rng, bool positive_domain) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int kinds = positive_domain ? 4 : 2;
  switch (std::uniform_int_distribution<int>(0, kinds - 1)(rng)) {
    case 0:
      return Primitive::affine(0.5 + 1.5 * uni(rng), -1.0 + 2.0 * uni(rng));
    case 1: {
      const double rate = 0.4 + 0.8 * uni(rng);
      return Primitive::exponential(uni(rng) < 0.75 ? rate : -rate);
    }
    case 2: {
      const double expo = 0.4 + 2.6 * uni(rng);
      return Primitive::power(uni(rng) < 0.8 ? expo : -expo);
    }
    default:
      return Primitive::logarithm(2.0 + 6.0 * uni(rng));
  }
}

// Random piecewise generator with up to max_pieces pieces. Later pieces are
// shifted by an affine link so jump sizes are controlled: zero (continuous)
// or in [0.1, 0.8]. Jump values land anywhere in the gap, including its ends.
inline GeneratorFn random_generator(std::mt19937_64& rng, Interval domain = {0.2, 3.5},
                                    int max_pieces = 4, bool with_jumps = true) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const bool positive = domain.lo() >= 0;
  const int m = 1 + std::uniform_int_distribution<int>(0, max_pieces - 1)(rng);

  std::vector<double> bps;
  int guard = 0;
  while (static_cast<int>(bps.size()) < m - 1 && guard++ < 200) {
    const double t = domain.at(0.15 + 0.7 * uni(rng));
    bool clear = true;
    for (double s : bps) clear = clear && std::abs(domain.param_of(s) - domain.param_of(t)) > 0.08;
    if (clear) bps.push_back(t);
  }
  std::sort(bps.begin(), bps.end());

  std::vector<Piece> pieces;
  double prev_left = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(m) && i <= bps.size(); ++i) {
    const Primitive base = random_primitive(rng, positive);
    double shift = 0;
    if (i > 0) {
      const double jump = with_jumps && uni(rng) < 0.6 ? 0.1 + 0.7 * uni(rng) : 0.0;
      shift = prev_left + jump - base(bps[i - 1]);
    }
    Piece piece = shift == 0 ? Piece(base)
                             : Piece(std::vector<Primitive>{base, Primitive::affine(1.0, shift)});
    if (i < bps.size()) prev_left = piece(bps[i]);
    pieces.push_back(std::move(piece));
  }

  std::vector<double> jumps;
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const double l = pieces[i].limit(bps[i]);
    const double r = pieces[i + 1].limit(bps[i]);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: jumps.push_back(std::numeric_limits<double>::quiet_NaN()); break;  // midpoint
      case 1: jumps.push_back(l); break;
      case 2: jumps.push_back(r); break;
      default: jumps.push_back(l + uni(rng) * (r - l)); break;
    }
  }
  return GeneratorFn(domain, std::move(pieces), std::move(bps), std::move(jumps));
}

inline std::pair<GeneratorFn, GeneratorFn> random_composable_pair(std::mt19937_64& rng) {
  const GeneratorFn g = random_generator(rng, Interval(0.3, 2.5), 3, true);
  GeneratorFn f = random_generator(rng, g.range_hull(), 3, true);
  return {std::move(f), g};
}

// x on (lo, t), x + jump on (t, hi); jump value defaults to the gap midpoint.
inline GeneratorFn jump_generator(Interval dom, double t, double jump) {
  return GeneratorFn(dom,
                     {Piece(Primitive::affine(1.0, 0.0)), Piece(Primitive::affine(1.0, jump))},
                     {t}, {std::numeric_limits<double>::quiet_NaN()});
}

// --- classic instances -----------------------------------------------------

inline GeneratorFn power_gen(double exponent) {
  return GeneratorFn::single(Interval::positive(), Primitive::power(exponent));
}

inline InequalityProblem minkowski_instance(double exponent, double lo = 0.5, double hi = 4.5) {
  std::vector<GeneratorFn> f{power_gen(exponent), power_gen(exponent), power_gen(exponent)};
  return InequalityProblem(std::move(f), Coupler::sum(2), Coupler::sum(2),
                           {Interval(lo, hi), Interval(lo, hi)});
}

inline InequalityProblem holder_instance(double p, double q, double lo = 0.5, double hi = 4.0) {
  std::vector<GeneratorFn> f{
      GeneratorFn::single(Interval::positive(), Primitive::affine(1.0, 0.0)), power_gen(p),
      power_gen(q)};
  return InequalityProblem(std::move(f), Coupler::product(2), Coupler::product(2),
                           {Interval(lo, hi), Interval(lo, hi)});
}

inline InequalityProblem jensen_instance(GeneratorFn gen, double lo, double hi) {
  std::vector<GeneratorFn> f{gen, gen, gen};
  return InequalityProblem(std::move(f), Coupler::arithmetic_mean(2), Coupler::arithmetic_mean(2),
                           {Interval(lo, hi), Interval(lo, hi)});
}

inline InequalityProblem jensen_exp_instance() {
  return jensen_instance(GeneratorFn::single(Interval::whole(), Primitive::exponential(1.0)), 0.0,
                         4.0);
}

inline InequalityProblem jensen_log_instance() {
  return jensen_instance(GeneratorFn::single(Interval::positive(), Primitive::logarithm(2.0)), 0.5,
                         128.0);
}

inline InequalityProblem identity_chain_instance() {
  std::vector<GeneratorFn> f{GeneratorFn::identity(Interval(-1, 1)),
                             GeneratorFn::identity(Interval(-1, 1))};
  return InequalityProblem(std::move(f), Coupler::sum(1), Coupler::sum(1), {Interval(-1, 1)});
}

// Ten instances with a single jump in some f_j (j >= 1) or in f_0 inside
// phi(I), phi == Phi separately strictly increasing throughout.
inline std::vector<InequalityProblem> continuity_necessity_instances() {
  std::vector<InequalityProblem> out;
  const auto id = [](double lo, double hi) { return GeneratorFn::identity(Interval(lo, hi)); };

  // k = 1, f_1 jumps
  out.emplace_back(std::vector<GeneratorFn>{id(-2, 2), jump_generator({-1, 1}, 0.0, 1.0)},
                   Coupler::sum(1), Coupler::sum(1), std::vector<Interval>{Interval(-1, 1)});
  // k = 1, f_0 jumps inside phi(I)
  out.emplace_back(std::vector<GeneratorFn>{jump_generator({-2, 2}, 0.0, 1.0), id(-1, 1)},
                   Coupler::sum(1), Coupler::sum(1), std::vector<Interval>{Interval(-1, 1)});
  // k = 2, sum coupler, f_1 jumps
  out.emplace_back(
      std::vector<GeneratorFn>{id(0.5, 7), jump_generator({0.5, 3}, 1.5, 0.8), id(0.5, 3)},
      Coupler::sum(2), Coupler::sum(2), std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3)});
  // k = 2, arithmetic mean, f_2 jumps
  out.emplace_back(
      std::vector<GeneratorFn>{id(0.2, 3.5), id(0.5, 3), jump_generator({0.5, 3}, 2.0, 0.5)},
      Coupler::arithmetic_mean(2), Coupler::arithmetic_mean(2),
      std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3)});
  // k = 2, product coupler, f_1 jumps
  out.emplace_back(
      std::vector<GeneratorFn>{id(0.2, 10), jump_generator({0.5, 3}, 1.0, 0.6), id(0.5, 3)},
      Coupler::product(2), Coupler::product(2),
      std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3)});
  // k = 2, sum coupler, f_0 jumps at 3 in phi(I) = (1, 6)
  out.emplace_back(
      std::vector<GeneratorFn>{jump_generator({0.5, 7}, 3.0, 0.7), id(0.5, 3), id(0.5, 3)},
      Coupler::sum(2), Coupler::sum(2), std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3)});
  // k = 2, power_sum coupler, f_1 jumps
  out.emplace_back(
      std::vector<GeneratorFn>{id(0.2, 6), jump_generator({0.5, 3}, 1.8, 1.0), id(0.5, 3)},
      Coupler::power_sum(2, 2.0), Coupler::power_sum(2, 2.0),
      std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3)});
  // k = 2, affine coupler, f_2 jumps
  out.emplace_back(
      std::vector<GeneratorFn>{id(0, 12), id(0.5, 3), jump_generator({0.5, 3}, 1.2, 0.9)},
      Coupler::affine(0.5, {1.0, 2.0}), Coupler::affine(0.5, {1.0, 2.0}),
      std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3)});
  // k = 3, sum coupler, f_1 jumps
  out.emplace_back(
      std::vector<GeneratorFn>{id(1, 10), jump_generator({0.5, 3}, 2.2, 0.8), id(0.5, 3),
                               id(0.5, 3)},
      Coupler::sum(3), Coupler::sum(3),
      std::vector<Interval>{Interval(0.5, 3), Interval(0.5, 3), Interval(0.5, 3)});
  // k = 1, affine coupler, f_0 jumps inside phi(I) = (1, 3)
  out.emplace_back(
      std::vector<GeneratorFn>{jump_generator({0.5, 4}, 2.0, 1.0), id(0, 1)}, Coupler::affine(1.0, {2.0}),
      Coupler::affine(1.0, {2.0}), std::vector<Interval>{Interval(0, 1)});
  return out;
}

}  // namespace testsupport
