#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qamineq/means.hpp"
#include "qamineq/problem.hpp"
#include "qamineq/simplex.hpp"

namespace qamineq {

// k+1 points of the box, a weight vector, and the two sides of the weighted
// inequality they violate (lhs > rhs).
struct Counterexample {
  std::vector<std::vector<double>> points;  // rows: points in I
  std::vector<double> lambda;
  double lhs = 0, rhs = 0;
  double violation() const { return lhs - rhs; }
};

// Both sides of the weighted inequality for the given points and weights:
// lhs = mean of the phi-images under f_0, rhs = Phi of the per-column means.
inline Counterexample evaluate_weighted_instance(const InequalityProblem& p,
                                                 std::vector<std::vector<double>> points,
                                                 std::vector<double> lambda) {
  const int k = p.k();
  const std::size_t n = points.size();
  if (n == 0) throw ArityError("weighted instance: no points");
  for (const auto& row : points)
    if (static_cast<int>(row.size()) != k) throw ArityError("weighted instance: bad point arity");
  WeightVector w{lambda};

  std::vector<double> col(n), means(static_cast<std::size_t>(k)), phis(n);
  for (int j = 1; j <= k; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = points[i][static_cast<std::size_t>(j - 1)];
    means[static_cast<std::size_t>(j - 1)] = weighted_qam(p.f(j), col, w);
  }
  for (std::size_t i = 0; i < n; ++i) phis[i] = p.apply_phi(points[i]);
  Counterexample ce;
  ce.lhs = weighted_qam(p.f(0), phis, w);
  ce.rhs = p.apply_Phi(means);
  ce.points = std::move(points);
  ce.lambda = std::move(lambda);
  return ce;
}

inline Counterexample replay(const InequalityProblem& p, const Counterexample& ce) {
  return evaluate_weighted_instance(p, ce.points, ce.lambda);
}

struct CertificateEntry {
  std::vector<double> base;    // grid point t
  std::vector<double> coeffs;  // a_j(t) >= 0
  double residual = 0;         // worst verified slack violation
};

struct Certificate {
  std::vector<CertificateEntry> entries;
  double residual = 0;
};

// Farkas certificate of infeasibility at base point t: k+1 points and weights
// with sum_i w_i (f_j(x_ij) - f_j(t_j)) <= 0 per column and a strictly
// positive weighted excess through f_0 o phi.
struct FarkasWitness {
  std::vector<std::vector<double>> points;  // exactly k+1 rows
  std::vector<double> lambda;               // k+1, >= 0, not all zero
  std::vector<double> base;                 // t
};

namespace detail {

inline void require_gamma_point(const InequalityProblem& p, const std::vector<double>& t,
                                double phi_t) {
  if (!p.f(0).domain().contains(phi_t))
    throw PreconditionError("base point: Phi(t) outside dom f_0");
  for (double d : p.f(0).discontinuities())
    if (std::abs(phi_t - d) <= 1e-9 * (1.0 + std::abs(d)))
      throw PreconditionError("base point: Phi(t) hits a jump of f_0");
  for (int j = 0; j < p.k(); ++j)
    if (!p.box()[static_cast<std::size_t>(j)].contains(t[static_cast<std::size_t>(j)]))
      throw PreconditionError("base point outside the box");
}

struct WitnessCheck {
  bool ok = true;
  std::string what;
};

inline WitnessCheck check_witness(const InequalityProblem& p, const FarkasWitness& w,
                                  double tol = 1e-9) {
  const int k = p.k();
  if (static_cast<int>(w.points.size()) != k + 1) return {false, "needs exactly k+1 points"};
  if (w.lambda.size() != w.points.size()) return {false, "weight count mismatch"};
  const double phi_t = p.apply_Phi(w.base);
  const double f0_t = p.f(0)(phi_t);
  for (int j = 1; j <= k; ++j) {
    double s = 0, mag = 0;
    const double ft = p.f(j)(w.base[static_cast<std::size_t>(j - 1)]);
    for (std::size_t i = 0; i < w.points.size(); ++i) {
      const double term =
          w.lambda[i] * (p.f(j)(w.points[i][static_cast<std::size_t>(j - 1)]) - ft);
      s += term;
      mag += std::abs(term);
    }
    if (s > tol * (1.0 + mag)) return {false, "column inequality violated"};
  }
  double excess = 0;
  for (std::size_t i = 0; i < w.points.size(); ++i)
    excess += w.lambda[i] * (p.f(0)(p.apply_phi(w.points[i])) - f0_t);
  if (!(excess > 0)) return {false, "weighted excess not positive"};
  return {};
}

}  // namespace detail

// One base point t of the Gamma grid: find nonnegative coefficients a with
//   f_0(phi(x)) - f_0(Phi(t)) <= sum_j a_j (f_j(x_j) - f_j(t_j))
// over the sample, or extract the Farkas certificate of impossibility.
// Feasible coefficients are recentered by a max-margin pass so they
// generalize beyond the sampled rows.
inline std::variant<CertificateEntry, FarkasWitness> certify_at(
    const InequalityProblem& p, const std::vector<double>& t,
    const std::vector<std::vector<double>>& sample, double tol = 1e-9) {
  const int k = p.k();
  if (static_cast<int>(t.size()) != k) throw ArityError("certify_at: bad base arity");
  if (sample.empty()) throw PreconditionError("certify_at: empty sample");
  const double phi_t = p.apply_Phi(t);
  detail::require_gamma_point(p, t, phi_t);
  const double f0_t = p.f(0)(phi_t);

  std::vector<double> ft(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j)
    ft[static_cast<std::size_t>(j - 1)] = p.f(j)(t[static_cast<std::size_t>(j - 1)]);

  const std::size_t m = sample.size();
  std::vector<std::vector<double>> g(m, std::vector<double>(static_cast<std::size_t>(k)));
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (int j = 1; j <= k; ++j)
      g[i][static_cast<std::size_t>(j - 1)] =
          p.f(j)(sample[i][static_cast<std::size_t>(j - 1)]) - ft[static_cast<std::size_t>(j - 1)];
    h[i] = p.f(0)(p.apply_phi(sample[i])) - f0_t;
  }

  LpOutcome out = lp_feasible(g, h);
  if (std::holds_alternative<LpInfeasible>(out)) {
    const auto& lam = std::get<LpInfeasible>(out).lambda;
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < lam.size(); ++i)
      if (lam[i] > 0) support.push_back(i);
    if (support.empty() || support.size() > static_cast<std::size_t>(k + 1))
      throw SolverError("certify_at: Farkas support not within k+1 points");
    FarkasWitness w;
    w.base = t;
    double wmax = 0;
    for (std::size_t i : support) wmax = std::max(wmax, lam[i]);
    for (std::size_t i : support) {
      w.points.push_back(sample[i]);
      w.lambda.push_back(lam[i] / wmax);
    }
    while (w.points.size() < static_cast<std::size_t>(k + 1)) {
      w.points.push_back(sample[0]);
      w.lambda.push_back(0.0);
    }
    const auto chk = detail::check_witness(p, w);
    if (!chk.ok) throw SolverError("certify_at: witness failed verification: " + chk.what);
    return w;
  }

  CertificateEntry entry;
  entry.base = t;
  entry.coeffs = std::get<LpFeasible>(out).a;
  if (auto centered = lp_max_margin(g, h); centered && centered->margin >= -tol) {
    bool sane = true;
    for (std::size_t i = 0; i < m && sane; ++i) {
      double lhs = 0;
      for (int j = 0; j < k; ++j)
        lhs += g[i][static_cast<std::size_t>(j)] * centered->a[static_cast<std::size_t>(j)];
      sane = lhs >= h[i] - tol * (1.0 + std::abs(h[i]));
    }
    if (sane) entry.coeffs = centered->a;
  }
  double worst = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double lhs = 0;
    for (int j = 0; j < k; ++j)
      lhs += g[i][static_cast<std::size_t>(j)] * entry.coeffs[static_cast<std::size_t>(j)];
    worst = std::max(worst, h[i] - lhs);
  }
  entry.residual = worst;
  return entry;
}

// Turn a Farkas certificate into an explicit violation of the weighted
// inequality: the per-column weighted means drop below t while the weighted
// mean of the phi-images stays above Phi(t).
inline Counterexample farkas_counterexample(const InequalityProblem& p, const FarkasWitness& w) {
  const double phi_t = p.apply_Phi(w.base);
  detail::require_gamma_point(p, w.base, phi_t);
  const auto chk = detail::check_witness(p, w);
  if (!chk.ok) throw PreconditionError("farkas_counterexample: invalid witness: " + chk.what);

  Counterexample ce = evaluate_weighted_instance(p, w.points, w.lambda);
  for (int j = 1; j <= p.k(); ++j) {
    std::vector<double> col(w.points.size());
    for (std::size_t i = 0; i < w.points.size(); ++i)
      col[i] = w.points[i][static_cast<std::size_t>(j - 1)];
    const double mj = weighted_qam(p.f(j), col, WeightVector{w.lambda});
    if (mj > w.base[static_cast<std::size_t>(j - 1)] + 1e-9 * (1.0 + std::abs(mj)))
      throw SolverError("farkas_counterexample: column mean exceeds the base point");
  }
  if (!(ce.violation() > 0))
    throw SolverError("farkas_counterexample: conversion produced no positive violation");
  return ce;
}

struct GridSpec {
  int points_per_dim = 5;
};
struct SampleSpec {
  int count = 120;
  std::uint64_t seed = 0;
};
struct RefineSpec {
  int max_rounds = 50;   // cutting-plane iterations per base point
  int probe_count = 400; // fresh residual probes per round
  double tol = 1e-9;
};

enum class CertifyStatus { Certified, Refuted, Undecided };

struct CertifyResult {
  CertifyStatus status = CertifyStatus::Undecided;
  std::optional<Certificate> certificate;
  std::optional<Counterexample> counterexample;
  std::optional<FarkasWitness> witness;
  std::string note;
};

namespace detail {

inline std::vector<double> random_box_point(const InequalityProblem& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(p.k()));
  for (int j = 0; j < p.k(); ++j)
    x[static_cast<std::size_t>(j)] = p.box()[static_cast<std::size_t>(j)].at(uni(rng));
  return x;
}

// Residual of the supporting-hyperplane inequality at x for coefficients a.
inline double entry_residual(const InequalityProblem& p, const CertificateEntry& e,
                             const std::vector<double>& ft, double f0_t,
                             const std::vector<double>& x) {
  double rhs = 0;
  for (int j = 1; j <= p.k(); ++j)
    rhs += e.coeffs[static_cast<std::size_t>(j - 1)] *
           (p.f(j)(x[static_cast<std::size_t>(j - 1)]) - ft[static_cast<std::size_t>(j - 1)]);
  return p.f(0)(p.apply_phi(x)) - f0_t - rhs;
}

}  // namespace detail

// Full condition-(d)-style certificate over a Gamma grid with cutting-plane
// refinement: solve on the current sample, hunt for a violated point by
// probing plus coordinate-wise climbing, append, repeat. The k proof points
// t - eps*e_j are always part of the sample, which bounds the coefficient
// polytope. First Farkas hit converts to a counterexample and stops.
inline CertifyResult build_certificate(const InequalityProblem& p, const GridSpec& grid = {},
                                       const SampleSpec& sspec = {}, const RefineSpec& refine = {}) {
  CertifyResult result;
  if (gamma_density(p).status != GammaStatus::Dense) {
    result.note = "Gamma density unknown; certificate construction skipped";
    return result;
  }
  const int k = p.k();
  const int n = std::max(grid.points_per_dim, 1);

  // product grid in parameter space
  std::vector<std::vector<double>> bases;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  for (;;) {
    std::vector<double> t(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
      t[static_cast<std::size_t>(j)] =
          p.box()[static_cast<std::size_t>(j)].at((idx[static_cast<std::size_t>(j)] + 0.5) / n);
    bases.push_back(std::move(t));
    int j = 0;
    while (j < k && ++idx[static_cast<std::size_t>(j)] == n) {
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == k) break;
  }

  Certificate cert;
  int skipped = 0;
  for (std::size_t bi = 0; bi < bases.size(); ++bi) {
    std::vector<double> t = bases[bi];
    // nudge t off the finite jump set of f_0 (Gamma membership), up to half a
    // grid step per attempt
    bool usable = false;
    for (int attempt = 0; attempt < 8 && !usable; ++attempt) {
      const double phi_t = p.apply_Phi(t);
      bool clears = p.f(0).domain().contains(phi_t);
      if (clears)
        for (double d : p.f(0).discontinuities())
          clears = clears && std::abs(phi_t - d) > 1e-9 * (1.0 + std::abs(d));
      if (clears) {
        usable = true;
        break;
      }
      const int j = attempt % k;
      const Interval& bj = p.box()[static_cast<std::size_t>(j)];
      const double u = bj.param_of(t[static_cast<std::size_t>(j)]);
      t[static_cast<std::size_t>(j)] = bj.at(u + (0.5 / n) * (0.08 * (attempt + 1)));
    }
    if (!usable) {
      ++skipped;
      continue;
    }

    std::mt19937_64 rng(sspec.seed * 0x9e3779b97f4a7c15ULL + bi + 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<std::vector<double>> sample;
    for (int j = 0; j < k; ++j) {
      // the bounding points t - eps*e_j, one grid step inward
      const Interval& bj = p.box()[static_cast<std::size_t>(j)];
      const double u = bj.param_of(t[static_cast<std::size_t>(j)]);
      std::vector<double> xb = t;
      xb[static_cast<std::size_t>(j)] = bj.at(std::max(u - 1.0 / n, 0.5 * u));
      sample.push_back(std::move(xb));
    }
    for (int s = 0; s < sspec.count; ++s) sample.push_back(detail::random_box_point(p, rng));

    std::vector<double> ft(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j)
      ft[static_cast<std::size_t>(j - 1)] = p.f(j)(t[static_cast<std::size_t>(j - 1)]);
    const double f0_t = p.f(0)(p.apply_Phi(t));

    bool settled = false;
    for (int round = 0; round < refine.max_rounds && !settled; ++round) {
      auto outcome = certify_at(p, t, sample, refine.tol);
      if (std::holds_alternative<FarkasWitness>(outcome)) {
        result.witness = std::get<FarkasWitness>(std::move(outcome));
        result.counterexample = farkas_counterexample(p, *result.witness);
        result.status = CertifyStatus::Refuted;
        return result;
      }
      CertificateEntry entry = std::get<CertificateEntry>(std::move(outcome));

      // probe for a violated fresh point, then sharpen it by local climbing
      std::vector<double> worst_x;
      double worst = -kInf;
      for (int s = 0; s < refine.probe_count; ++s) {
        auto x = detail::random_box_point(p, rng);
        const double r = detail::entry_residual(p, entry, ft, f0_t, x);
        if (r > worst) {
          worst = r;
          worst_x = std::move(x);
        }
      }
      std::vector<double> u(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j)
        u[static_cast<std::size_t>(j)] =
            p.box()[static_cast<std::size_t>(j)].param_of(worst_x[static_cast<std::size_t>(j)]);
      for (double step = 0.1; step > 1e-7; step *= 0.5) {
        bool improved = true;
        while (improved) {
          improved = false;
          for (int j = 0; j < k; ++j) {
            for (double dir : {step, -step}) {
              auto cand = u;
              auto& uj = cand[static_cast<std::size_t>(j)];
              uj = std::min(std::max(uj + dir, 1e-6), 1.0 - 1e-6);
              std::vector<double> x(static_cast<std::size_t>(k));
              for (int l = 0; l < k; ++l)
                x[static_cast<std::size_t>(l)] =
                    p.box()[static_cast<std::size_t>(l)].at(cand[static_cast<std::size_t>(l)]);
              const double r = detail::entry_residual(p, entry, ft, f0_t, x);
              if (r > worst) {
                worst = r;
                u = cand;
                worst_x = x;
                improved = true;
              }
            }
          }
        }
      }

      if (worst <= refine.tol) {
        entry.residual = std::max(entry.residual, std::max(worst, 0.0));
        cert.residual = std::max(cert.residual, entry.residual);
        cert.entries.push_back(std::move(entry));
        settled = true;
      } else {
        sample.push_back(worst_x);
      }
    }
    if (!settled) {
      result.status = CertifyStatus::Undecided;
      result.note = "cutting-plane refinement hit the round cap";
      return result;
    }
  }

  if (skipped > 0) {
    result.status = CertifyStatus::Undecided;
    result.note = "some grid points had Phi(t) outside dom f_0";
    return result;
  }
  result.status = CertifyStatus::Certified;
  result.certificate = std::move(cert);
  return result;
}

}  // namespace qamineq
