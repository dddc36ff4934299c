#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <variant>

#include "qamineq/qamineq.hpp"
#include "support/builders.hpp"

using namespace qamineq;
using testsupport::identity_chain_instance;
using testsupport::jensen_log_instance;
using testsupport::minkowski_instance;

namespace {

std::vector<std::vector<double>> random_sample(const InequalityProblem& p, int count,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::vector<double>> out;
  for (int s = 0; s < count; ++s) {
    std::vector<double> x(static_cast<std::size_t>(p.k()));
    for (int j = 0; j < p.k(); ++j)
      x[static_cast<std::size_t>(j)] = p.box()[static_cast<std::size_t>(j)].at(uni(rng));
    out.push_back(std::move(x));
  }
  return out;
}

double hyperplane_residual(const InequalityProblem& p, const CertificateEntry& e,
                           const std::vector<double>& x) {
  const double f0t = p.f(0)(p.apply_Phi(e.base));
  double rhs = 0;
  for (int j = 1; j <= p.k(); ++j)
    rhs += e.coeffs[static_cast<std::size_t>(j - 1)] *
           (p.f(j)(x[static_cast<std::size_t>(j - 1)]) -
            p.f(j)(e.base[static_cast<std::size_t>(j - 1)]));
  return p.f(0)(p.apply_phi(x)) - f0t - rhs;
}

}  // namespace

TEST_CASE("identity chain pins the coefficient to one") {
  const InequalityProblem p = identity_chain_instance();
  const auto sample = random_sample(p, 60, 1);
  const auto out = certify_at(p, {0.25}, sample);
  REQUIRE(std::holds_alternative<CertificateEntry>(out));
  const auto& e = std::get<CertificateEntry>(out);
  CHECK(e.coeffs[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(e.residual <= 1e-9);
}

TEST_CASE("minkowski exponent 2 is certified at a base point") {
  const InequalityProblem p = minkowski_instance(2.0, 0.5, 4.0);
  const auto sample = random_sample(p, 500, 7);
  const auto out = certify_at(p, {1.0, 1.0}, sample);
  REQUIRE(std::holds_alternative<CertificateEntry>(out));
  const auto& e = std::get<CertificateEntry>(out);
  for (double a : e.coeffs) CHECK(a >= 0.0);
  // fresh random sample: residual at the certified tolerance
  for (const auto& x : random_sample(p, 500, 8))
    CHECK(hyperplane_residual(p, e, x) <= 1e-9);
}

TEST_CASE("minkowski exponent 1/2 is refuted through the Farkas branch") {
  const InequalityProblem p = minkowski_instance(0.5);
  std::vector<std::vector<double>> sample{{4.0, 1.0}, {1.0, 4.0}, {4.0, 4.0}};
  const auto out = certify_at(p, {2.5, 2.5}, sample);
  REQUIRE(std::holds_alternative<FarkasWitness>(out));
  const auto& w = std::get<FarkasWitness>(out);
  REQUIRE(w.points.size() == 3);
  const Counterexample ce = farkas_counterexample(p, w);
  CHECK(ce.violation() > 0.1);
}

TEST_CASE("hand-built witness reproduces the classic violation of 0.5") {
  const InequalityProblem p = minkowski_instance(0.5);
  FarkasWitness w;
  w.base = {2.25, 2.25};
  w.points = {{4.0, 1.0}, {1.0, 4.0}, {2.0, 2.0}};
  w.lambda = {1.0, 1.0, 0.0};
  const Counterexample ce = farkas_counterexample(p, w);
  CHECK(ce.lhs == Catch::Approx(5.0).margin(1e-9));
  CHECK(ce.rhs == Catch::Approx(4.5).margin(1e-12));
  CHECK(ce.violation() == Catch::Approx(0.5).margin(1e-9));

  // replay reproduces the stored sides exactly
  const Counterexample again = replay(p, ce);
  CHECK(again.lhs == ce.lhs);
  CHECK(again.rhs == ce.rhs);
}

TEST_CASE("witness preconditions are enforced") {
  const InequalityProblem p = minkowski_instance(0.5);
  FarkasWitness bad;
  bad.base = {2.25, 2.25};
  bad.points = {{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};  // no violation in these
  bad.lambda = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(farkas_counterexample(p, bad), PreconditionError);

  // base point with Phi(t) on a jump of f_0
  const InequalityProblem jumpy(
      {testsupport::jump_generator(Interval(0.5, 7), 3.0, 0.7),
       GeneratorFn::identity(Interval(0.5, 3)), GeneratorFn::identity(Interval(0.5, 3))},
      Coupler::sum(2), Coupler::sum(2), {Interval(0.5, 3), Interval(0.5, 3)});
  CHECK_THROWS_AS(certify_at(jumpy, {1.5, 1.5}, random_sample(jumpy, 10, 3)),
                  PreconditionError);
}

TEST_CASE("feasible instances never reach the witness branch") {
  const InequalityProblem p = minkowski_instance(2.0, 0.5, 4.0);
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> uni(0.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> t{p.box()[0].at(uni(rng)), p.box()[1].at(uni(rng))};
    const auto out = certify_at(p, t, random_sample(p, 40, 1000 + trial));
    CHECK(std::holds_alternative<CertificateEntry>(out));
  }
}

TEST_CASE("build_certificate: identity chain gives unit coefficients") {
  const auto r = build_certificate(identity_chain_instance(), GridSpec{4}, SampleSpec{40, 11});
  REQUIRE(r.status == CertifyStatus::Certified);
  REQUIRE(r.certificate.has_value());
  for (const auto& e : r.certificate->entries) CHECK(e.coeffs[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.certificate->residual <= 1e-9);
}

TEST_CASE("build_certificate: minkowski exponent 2 certifies and majorizes") {
  const InequalityProblem p = minkowski_instance(2.0, 0.5, 4.0);
  const auto r = build_certificate(p, GridSpec{5}, SampleSpec{120, 5});
  REQUIRE(r.status == CertifyStatus::Certified);
  const Certificate& cert = *r.certificate;
  REQUIRE(cert.entries.size() == 25);

  // condition-style inequality against the nearest grid entry on fresh pairs
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> x{p.box()[0].at(uni(rng)), p.box()[1].at(uni(rng))};
    const CertificateEntry* nearest = &cert.entries[0];
    double bestd = kInf;
    for (const auto& e : cert.entries) {
      const double d = std::abs(e.base[0] - x[0]) + std::abs(e.base[1] - x[1]);
      if (d < bestd) {
        bestd = d;
        nearest = &e;
      }
    }
    CHECK(hyperplane_residual(p, *nearest, x) <= 1e-6);
  }

  // pointwise infimum of the affine majorants is concave: midpoint test
  const auto psi_hat = [&](const std::vector<double>& u) {
    double best = kInf;
    for (const auto& e : cert.entries) {
      double v = p.f(0)(p.apply_Phi(e.base));
      for (int j = 1; j <= 2; ++j)
        v += e.coeffs[static_cast<std::size_t>(j - 1)] *
             (u[static_cast<std::size_t>(j - 1)] - p.f(j)(e.base[static_cast<std::size_t>(j - 1)]));
      best = std::min(best, v);
    }
    return best;
  };
  for (int it = 0; it < 1000; ++it) {
    std::vector<double> u(2), v(2), mid(2);
    for (int j = 0; j < 2; ++j) {
      const Interval d = p.psi_domain(j + 1);
      u[static_cast<std::size_t>(j)] = d.at(uni(rng));
      v[static_cast<std::size_t>(j)] = d.at(uni(rng));
      mid[static_cast<std::size_t>(j)] =
          0.5 * (u[static_cast<std::size_t>(j)] + v[static_cast<std::size_t>(j)]);
    }
    CHECK(psi_hat(mid) >= 0.5 * (psi_hat(u) + psi_hat(v)) - 1e-9);
  }
}

TEST_CASE("build_certificate: refuted instances return a counterexample") {
  const auto r = build_certificate(minkowski_instance(0.5), GridSpec{5}, SampleSpec{120, 5});
  REQUIRE(r.status == CertifyStatus::Refuted);
  REQUIRE(r.counterexample.has_value());
  REQUIRE(r.witness.has_value());
  CHECK(r.counterexample->violation() > 1e-6);

  const auto r2 = build_certificate(jensen_log_instance(), GridSpec{4}, SampleSpec{80, 5});
  REQUIRE(r2.status == CertifyStatus::Refuted);
  CHECK(r2.counterexample->violation() > 1e-6);
}

TEST_CASE("certificates and counterexamples survive JSON round-trips") {
  const auto r = build_certificate(minkowski_instance(0.5), GridSpec{4}, SampleSpec{80, 9});
  REQUIRE(r.status == CertifyStatus::Refuted);
  const Counterexample& ce = *r.counterexample;
  const Counterexample back = replay(minkowski_instance(0.5), ce);
  CHECK(back.lhs == Catch::Approx(ce.lhs).margin(1e-12));
  CHECK(back.rhs == Catch::Approx(ce.rhs).margin(1e-12));
}
