#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qamineq/qamineq.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace qamineq;
using testsupport::random_composable_pair;
using testsupport::random_generator;

namespace {

GeneratorFn jump_at_zero() {
  // x on (-1,0), value 0.5 at 0, x+1 on (0,1)
  return GeneratorFn(Interval(-1, 1),
                     {Piece(Primitive::affine(1, 0)), Piece(Primitive::affine(1, 1))}, {0.0},
                     {0.5});
}

// All four order equivalences between the generalized inverse and the
// one-sided limits, as exact boolean identities.
void check_order_equivalences(const GeneratorFn& f, double x, bool is_jump) {
  const PointEval pe = f.eval_with_limits(x);
  const Interval hull = f.range_hull();
  const double margin = 0.05 * (1.0 + std::abs(pe.left) + std::abs(pe.right));
  std::vector<double> probes{pe.left - margin, pe.right + margin,
                             pe.left - 0.5 * margin, pe.right + 0.01 * margin};
  if (is_jump) {
    probes.push_back(pe.left);
    probes.push_back(pe.right);
    probes.push_back(pe.value);
    probes.push_back(0.5 * (pe.left + pe.right));
  }
  for (double u : probes) {
    if (!hull.contains(u)) continue;
    // skip knife-edge probes at continuity points: a 1-ulp inverse roundoff
    // would flip the comparison without violating the mathematics
    if (!is_jump && std::abs(u - pe.value) < 1e-9 * (1.0 + std::abs(pe.value))) continue;
    const double inv = f.inverse(u);
    INFO("x=" << x << " u=" << u << " inv=" << inv);
    CHECK((inv < x) == (u < pe.left));
    CHECK((inv <= x) == (u <= pe.right));
    CHECK((x < inv) == (pe.right < u));
    CHECK((x <= inv) == (pe.left <= u));
  }
}

}  // namespace

TEST_CASE("interval sampling stays strictly interior") {
  for (Interval iv : {Interval(-1, 1), Interval(0, kInf), Interval(-kInf, 2), Interval::whole()}) {
    for (double x : iv.grid(64)) {
      CHECK(iv.contains(x));
      CHECK(std::isfinite(x));
    }
    const double x = iv.at(0.37);
    CHECK(iv.param_of(x) == Catch::Approx(0.37).margin(1e-12));
  }
  CHECK_THROWS_AS(Interval(1, 1), ValidationError);
  CHECK_THROWS_AS(Interval(2, 1), ValidationError);
}

TEST_CASE("primitive construction rejects degenerate parameters") {
  CHECK_THROWS_AS(Primitive::power(0.0), ValidationError);
  CHECK_THROWS_AS(Primitive::affine(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Primitive::affine(-1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(Primitive::exponential(0.0), ValidationError);
  CHECK_THROWS_AS(Primitive::logarithm(1.0), ValidationError);
}

TEST_CASE("primitives are increasing with exact inverses") {
  std::vector<Primitive> prims{Primitive::affine(1.5, -0.3), Primitive::power(2.0),
                               Primitive::power(0.5),        Primitive::power(-1.0),
                               Primitive::exponential(0.7),  Primitive::exponential(-0.9),
                               Primitive::logarithm(2.0)};
  for (const Primitive& base : prims) {
    for (const Primitive& p : {base, base.reflect()}) {
      const Interval d = p.natural_domain();
      double prev = -kInf;
      for (double x : d.grid(41)) {
        const double y = p(x);
        CHECK(prev < y);
        prev = y;
        CHECK(p.derivative(x) > 0);
        CHECK(p.inverse(y) == Catch::Approx(x).margin(1e-9 * (1.0 + std::abs(x))));
      }
    }
  }
}

TEST_CASE("eval_with_limits at continuity and jump points") {
  const GeneratorFn id = GeneratorFn::identity(Interval(-1, 1));
  const PointEval a = id.eval_with_limits(0.5);
  CHECK(a.left == 0.5);
  CHECK(a.value == 0.5);
  CHECK(a.right == 0.5);

  const GeneratorFn f = jump_at_zero();
  const PointEval b = f.eval_with_limits(0.0);
  CHECK(b.left == 0.0);
  CHECK(b.value == 0.5);
  CHECK(b.right == 1.0);

  const PointEval c = f.eval_with_limits(-0.5);
  CHECK(c.left == -0.5);
  CHECK(c.value == -0.5);
  CHECK(c.right == -0.5);

  CHECK_THROWS_AS(f.eval_with_limits(1.5), DomainError);
}

TEST_CASE("generalized inverse: identity, jump gap, analytic piece") {
  const GeneratorFn id = GeneratorFn::identity(Interval(-1, 1));
  for (double u : {-0.9, -0.25, 0.0, 0.6}) CHECK(id.inverse(u) == u);

  const GeneratorFn f = jump_at_zero();
  CHECK(f.inverse(0.25) == 0.0);  // gap [0,1] collapses to the breakpoint
  CHECK(f.inverse(-0.5) == -0.5);
  CHECK(f.inverse(1.5) == Catch::Approx(0.5).margin(1e-12));
  CHECK_THROWS_AS(f.inverse(-1.5), RangeError);
  CHECK_THROWS_AS(f.inverse(2.5), RangeError);

  const GeneratorFn sq = GeneratorFn::single(Interval::positive(), Primitive::power(2.0));
  const double inv = sq.inverse(2.5);
  CHECK(inv == Catch::Approx(std::sqrt(2.5)).margin(1e-12));
  const double oracle =
      testsupport::bisect_oracle([](double x) { return x * x; }, 0.0, 4.0, 2.5);
  CHECK(inv == Catch::Approx(oracle).margin(1e-12));
}

TEST_CASE("gen inverse is constant exactly on the closed jump gap") {
  const GeneratorFn f = jump_at_zero();
  const PointEval pe = f.eval_with_limits(0.0);
  CHECK(f.inverse(pe.left) == 0.0);
  CHECK(f.inverse(pe.right) == 0.0);
  CHECK(f.inverse(pe.value) == 0.0);
}

TEST_CASE("left and right inverse laws on random generators") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 16; ++trial) {
    const GeneratorFn f = random_generator(rng);
    for (double x : f.domain().grid(200)) {
      const double fx = f(x);
      CHECK(f.inverse(fx) == Catch::Approx(x).margin(1e-9 * (1.0 + std::abs(x))));
      CHECK(f(f.inverse(fx)) == Catch::Approx(fx).margin(1e-9 * (1.0 + std::abs(fx))));
    }
    for (double t : f.breakpoints()) {
      CHECK(f.inverse(f(t)) == t);
    }
  }
}

TEST_CASE("order equivalences at adversarial points including jumps") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const GeneratorFn f = random_generator(rng);
    for (double t : f.breakpoints()) check_order_equivalences(f, t, true);
    for (double x : f.domain().grid(25)) {
      bool bp = false;
      for (double t : f.breakpoints()) bp = bp || t == x;
      if (!bp) check_order_equivalences(f, x, false);
    }
  }
}

TEST_CASE("inverse is monotone, flat only across a gap") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const GeneratorFn f = random_generator(rng);
    const Interval hull = f.range_hull();
    for (int it = 0; it < 300; ++it) {
      double u = hull.at(0.02 + 0.96 * uni(rng));
      double v = hull.at(0.02 + 0.96 * uni(rng));
      if (u > v) std::swap(u, v);
      if (u == v) continue;
      const double iu = f.inverse(u), iv = f.inverse(v);
      CHECK(iu <= iv);
      if (iu == iv) {
        // equality forces both values into the same closed jump gap
        const PointEval pe = f.eval_with_limits(iu);
        CHECK(pe.left <= u);
        CHECK(v <= pe.right);
      }
    }
  }
}

TEST_CASE("compose: identity, hand algebra, and jump transport") {
  const GeneratorFn id = GeneratorFn::identity();
  const GeneratorFn idid = compose(id, id);
  for (double x : {-2.0, 0.0, 1.5}) CHECK(idid(x) == x);

  // f(x) = x^2 on (0, inf), g(x) = x + 1 on (0, inf): (x+1)^2, inverse of 4 is 1
  const GeneratorFn f = GeneratorFn::single(Interval::positive(), Primitive::power(2.0));
  const GeneratorFn g = GeneratorFn::single(Interval::positive(), Primitive::affine(1.0, 1.0));
  const GeneratorFn fg = compose(f, g);
  CHECK(fg(2.0) == Catch::Approx(9.0).margin(1e-12));
  CHECK(fg.inverse(4.0) == Catch::Approx(1.0).margin(1e-12));

  // jump generator composed with the identity leaves the inverse unchanged
  const GeneratorFn j = jump_at_zero();
  const GeneratorFn ji = compose(j, GeneratorFn::identity(Interval(-1, 1)));
  const Interval hull = j.range_hull();
  for (double u : hull.grid(1000))
    CHECK(ji.inverse(u) == Catch::Approx(j.inverse(u)).margin(1e-12));

  CHECK_THROWS_AS(compose(GeneratorFn::single(Interval(0, 1), Primitive::affine(1, 0)),
                          GeneratorFn::identity(Interval(-5, 5))),
                  CompositionError);
}

TEST_CASE("composition law for generalized inverses on random pairs") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 8; ++trial) {
    const auto [f, g] = random_composable_pair(rng);
    const GeneratorFn fg = compose(f, g);
    const Interval hull = fg.range_hull();
    for (double u : hull.grid(250)) {
      const double direct = fg.inverse(u);
      const double chained = g.inverse(f.inverse(u));
      CHECK(direct == Catch::Approx(chained).margin(1e-9 * (1.0 + std::abs(direct))));
    }
  }
}

TEST_CASE("reflection flips the graph and is an involution") {
  const GeneratorFn id = GeneratorFn::identity(Interval(-1, 1));
  const GeneratorFn rid = id.reflected();
  CHECK(rid.domain() == id.domain());
  for (double x : id.domain().grid(20)) CHECK(rid(x) == Catch::Approx(x).margin(1e-12));

  const GeneratorFn sq = GeneratorFn::single(Interval::positive(), Primitive::power(2.0));
  const GeneratorFn rsq = sq.reflected();
  CHECK(rsq.domain().lo() == -kInf);
  CHECK(rsq.domain().hi() == 0.0);
  double prev = -kInf;
  for (double x : rsq.domain().grid(40)) {
    CHECK(rsq(x) == Catch::Approx(-(x * x)).margin(1e-9 * (1.0 + x * x)));
    CHECK(prev < rsq(x));
    prev = rsq(x);
  }

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const GeneratorFn f = random_generator(rng);
    const GeneratorFn rr = f.reflected().reflected();
    for (double x : f.domain().grid(100))
      CHECK(rr(x) == Catch::Approx(f(x)).margin(1e-9 * (1.0 + std::abs(f(x)))));
  }
}

TEST_CASE("discontinuities: identity, single jump, staircase") {
  CHECK(GeneratorFn::identity().discontinuities().empty());
  CHECK(GeneratorFn::identity().is_continuous());

  const auto single = jump_at_zero().discontinuities();
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 0.0);

  // two-jump staircase with jumps at -0.5 and 0.5
  const GeneratorFn stairs(Interval(-1, 1),
                           {Piece(Primitive::affine(1, 0)), Piece(Primitive::affine(1, 0.5)),
                            Piece(Primitive::affine(1, 1))},
                           {-0.5, 0.5}, {});
  const auto two = stairs.discontinuities();
  REQUIRE(two.size() == 2);
  CHECK(two[0] == -0.5);
  CHECK(two[1] == 0.5);
  CHECK_FALSE(stairs.is_continuous());
  CHECK(stairs.continuous_on(Interval(-0.4, 0.4)));
}

TEST_CASE("validation pinpoints the violated invariant") {
  CHECK(validate_generator(GeneratorFn::identity()).ok);

  // pieces x and x-5 with jump value 0: the right limit at 0 is below the left
  const std::vector<Piece> bad{Piece(Primitive::affine(1, 0)), Piece(Primitive::affine(1, -5))};
  const ValidationReport rep =
      validate_generator(Interval(-1, 1), bad, {0.0}, {0.0});
  CHECK_FALSE(rep.ok);
  CHECK(rep.index == 0);
  CHECK_FALSE(rep.message.empty());
  CHECK_THROWS_AS(GeneratorFn(Interval(-1, 1), bad, {0.0}, {0.0}), ValidationError);

  // jump value outside the sandwich
  const std::vector<Piece> gap{Piece(Primitive::affine(1, 0)), Piece(Primitive::affine(1, 1))};
  const ValidationReport rep2 = validate_generator(Interval(-1, 1), gap, {0.0}, {1.5});
  CHECK_FALSE(rep2.ok);

  // breakpoints must be interior and ordered
  CHECK_FALSE(validate_generator(Interval(-1, 1), gap, {1.0}, {}).ok);
  const std::vector<Piece> three{Piece(Primitive::affine(1, 0)), Piece(Primitive::affine(1, 1)),
                                 Piece(Primitive::affine(1, 2))};
  CHECK_FALSE(validate_generator(Interval(-1, 1), three, {0.5, 0.25}, {}).ok);
}

TEST_CASE("default jump value is the gap midpoint") {
  const GeneratorFn f(Interval(-1, 1),
                      {Piece(Primitive::affine(1, 0)), Piece(Primitive::affine(1, 1))}, {0.0}, {});
  CHECK(f(0.0) == 0.5);
}
