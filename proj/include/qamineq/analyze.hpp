#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qamineq/certify.hpp"

namespace qamineq {

namespace detail {

// Largest eigenvalue of a small symmetric matrix by cyclic Jacobi sweeps.
inline double max_symmetric_eigenvalue(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-24) break;
    for (std::size_t pq = 0; pq < n; ++pq)
      for (std::size_t q = pq + 1; q < n; ++q) {
        const std::size_t p = pq;
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = detail::sgn(theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
      }
  }
  double mx = a[0][0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, a[i][i]);
  return mx;
}

}  // namespace detail

struct ConcavityReport {
  enum class Status { Concave, NotConcave, Unsupported };
  Status status = Status::Unsupported;
  double max_midpoint_deficit = 0;
  double max_hessian_eigenvalue = -kInf;
  std::vector<double> witness_u, witness_v;  // worst midpoint pair
  std::string note;
};

struct ConcavityConfig {
  int pairs = 8000;
  int hessian_grid = 5;
  std::uint64_t seed = 0;
  double pass_tol = 1e-9;     // midpoint deficit allowed for "concave"
  double witness_tol = 1e-6;  // deficit required to report a witness
  double eig_tol = 1e-6;      // largest Hessian eigenvalue allowed
};

// Concavity of the transfer function Psi on conv(f_1(I_1)) x ... x conv(f_k(I_k)):
// randomized midpoint tests (with climbing amplification of the worst pair)
// plus a central-difference Hessian eigenvalue scan on an interior grid.
inline ConcavityReport check_concavity(const InequalityProblem& p, const ConcavityConfig& cfg = {}) {
  ConcavityReport rep;
  const int k = p.k();
  for (int j = 1; j <= k; ++j)
    if (!p.f(j).continuous_on(p.box(j))) {
      rep.status = ConcavityReport::Status::Unsupported;
      rep.note = "inner generator discontinuous on the box";
      return rep;
    }
  std::vector<Interval> u_dom;
  for (int j = 1; j <= k; ++j) u_dom.push_back(p.psi_domain(j));

  std::mt19937_64 rng(cfg.seed ^ 0xc0ffee123ULL);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  const auto draw = [&](std::vector<double>& u) {
    for (int j = 0; j < k; ++j) u[static_cast<std::size_t>(j)] = u_dom[static_cast<std::size_t>(j)].at(uni(rng));
  };
  const auto deficit_of = [&](const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> mid(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
      mid[static_cast<std::size_t>(j)] = 0.5 * (u[static_cast<std::size_t>(j)] + v[static_cast<std::size_t>(j)]);
    return 0.5 * (psi_eval(p, u) + psi_eval(p, v)) - psi_eval(p, mid);
  };

  std::vector<double> u(static_cast<std::size_t>(k)), v(static_cast<std::size_t>(k));
  std::vector<double> wu, wv;
  double worst = -kInf;
  for (int s = 0; s < cfg.pairs; ++s) {
    draw(u);
    draw(v);
    const double d = deficit_of(u, v);
    if (d > worst) {
      worst = d;
      wu = u;
      wv = v;
    }
  }

  // amplify the worst pair by coordinate climbing in parameter space
  if (worst > cfg.pass_tol) {
    std::vector<double> pu(static_cast<std::size_t>(k)), pv(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      pu[static_cast<std::size_t>(j)] = u_dom[static_cast<std::size_t>(j)].param_of(wu[static_cast<std::size_t>(j)]);
      pv[static_cast<std::size_t>(j)] = u_dom[static_cast<std::size_t>(j)].param_of(wv[static_cast<std::size_t>(j)]);
    }
    const auto from_params = [&](const std::vector<double>& params, std::vector<double>& out) {
      for (int j = 0; j < k; ++j)
        out[static_cast<std::size_t>(j)] =
            u_dom[static_cast<std::size_t>(j)].at(params[static_cast<std::size_t>(j)]);
    };
    for (double step = 0.05; step > 1e-6; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int side = 0; side < 2; ++side)
          for (int j = 0; j < k; ++j)
            for (double dir : {step, -step}) {
              auto cu = pu, cv = pv;
              auto& coord = (side == 0 ? cu : cv)[static_cast<std::size_t>(j)];
              coord = std::min(std::max(coord + dir, 0.02), 0.98);
              from_params(cu, u);
              from_params(cv, v);
              const double d = deficit_of(u, v);
              if (d > worst) {
                worst = d;
                pu = cu;
                pv = cv;
                wu = u;
                wv = v;
                improved = true;
              }
            }
      }
    }
  }
  rep.max_midpoint_deficit = std::max(worst, 0.0);
  rep.witness_u = wu;
  rep.witness_v = wv;

  if (rep.max_midpoint_deficit > cfg.witness_tol) {
    rep.status = ConcavityReport::Status::NotConcave;
    rep.note = "midpoint concavity fails";
    return rep;
  }

  // Hessian scan on an interior grid
  const int gn = std::max(cfg.hessian_grid, 1);
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  double max_eig = -kInf;
  for (;;) {
    std::vector<double> u0(static_cast<std::size_t>(k)), hstep(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const double par = 0.08 + 0.84 * (idx[static_cast<std::size_t>(j)] + 0.5) / gn;
      const Interval& d = u_dom[static_cast<std::size_t>(j)];
      u0[static_cast<std::size_t>(j)] = d.at(par);
      const double lo_gap = u0[static_cast<std::size_t>(j)] - d.at(par - 0.05);
      const double hi_gap = d.at(par + 0.05) - u0[static_cast<std::size_t>(j)];
      hstep[static_cast<std::size_t>(j)] =
          std::min({1e-3 * (1.0 + std::abs(u0[static_cast<std::size_t>(j)])), 0.45 * lo_gap, 0.45 * hi_gap});
    }
    std::vector<std::vector<double>> hess(static_cast<std::size_t>(k),
                                          std::vector<double>(static_cast<std::size_t>(k), 0.0));
    const double psi0 = psi_eval(p, u0);
    auto shifted = [&](int a, double da, int b, double db) {
      auto q = u0;
      q[static_cast<std::size_t>(a)] += da;
      if (b >= 0) q[static_cast<std::size_t>(b)] += db;
      return psi_eval(p, q);
    };
    for (int a = 0; a < k; ++a) {
      const double ha = hstep[static_cast<std::size_t>(a)];
      hess[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] =
          (shifted(a, ha, -1, 0) - 2.0 * psi0 + shifted(a, -ha, -1, 0)) / (ha * ha);
      for (int b = a + 1; b < k; ++b) {
        const double hb = hstep[static_cast<std::size_t>(b)];
        const double v2 = (shifted(a, ha, b, hb) - shifted(a, ha, b, -hb) -
                           shifted(a, -ha, b, hb) + shifted(a, -ha, b, -hb)) /
                          (4.0 * ha * hb);
        hess[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v2;
        hess[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v2;
      }
    }
    max_eig = std::max(max_eig, detail::max_symmetric_eigenvalue(std::move(hess)));

    int j = 0;
    while (j < k && ++idx[static_cast<std::size_t>(j)] == gn) {
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == k) break;
  }
  rep.max_hessian_eigenvalue = max_eig;

  if (rep.max_midpoint_deficit <= cfg.pass_tol && max_eig <= cfg.eig_tol) {
    rep.status = ConcavityReport::Status::Concave;
  } else {
    rep.status = ConcavityReport::Status::NotConcave;
    rep.note = "marginal curvature evidence";
  }
  return rep;
}

struct E2Report {
  bool ok = true;
  bool by_construction = false;  // phi == Phi: equality at every base point
  std::vector<double> witness;
  double deficit = 0;
};

// Domination f_0(Phi(t)) >= Psi(f_1(t_1),...,f_k(t_k)) on sampled base points.
inline E2Report check_e2(const InequalityProblem& p, int samples = 200, std::uint64_t seed = 0,
                         double tol = 1e-9) {
  E2Report rep;
  rep.by_construction = p.phi() == p.Phi();
  std::mt19937_64 rng(seed ^ 0xe2e2e2ULL);
  std::uniform_real_distribution<double> uni(0.01, 0.99);
  const int k = p.k();
  std::vector<double> t(static_cast<std::size_t>(k)), u(static_cast<std::size_t>(k));
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < k; ++j)
      t[static_cast<std::size_t>(j)] = p.box()[static_cast<std::size_t>(j)].at(uni(rng));
    const double phi_t = p.apply_Phi(t);
    if (!p.f(0).domain().contains(phi_t)) continue;
    bool gamma = true;
    for (double d : p.f(0).discontinuities())
      gamma = gamma && std::abs(phi_t - d) > 1e-9 * (1.0 + std::abs(d));
    if (!gamma) continue;
    for (int j = 1; j <= k; ++j)
      u[static_cast<std::size_t>(j - 1)] = p.f(j)(t[static_cast<std::size_t>(j - 1)]);
    const double deficit = psi_eval(p, u) - p.f(0)(phi_t);
    if (deficit > tol) {
      rep.ok = false;
      rep.witness = t;
      rep.deficit = deficit;
      return rep;
    }
  }
  return rep;
}

struct FalsifyConfig {
  long long budget = 30000;  // objective evaluations
  std::uint64_t seed = 0;
  double threshold = 1e-6;    // violation needed to report a counterexample
  int steps_per_restart = 200;
  double initial_step = 0.1;  // parameter-space step, decays to min_step
  double min_step = 1e-8;
};

// Randomized search for a violation of the weighted inequality with exactly
// k+1 points: random restarts followed by coordinate-wise hill climbing over
// point coordinates and weights. Seeds near the witness jump when the
// continuity precheck says the instance must fail. Returned counterexamples
// are re-evaluated from scratch before being handed out.
inline std::optional<Counterexample> falsify(const InequalityProblem& p,
                                             const FalsifyConfig& cfg = {}) {
  const int k = p.k();
  const int npts = k + 1;
  const int dim = npts * k + npts;  // point parameters then weight parameters
  std::mt19937_64 rng(cfg.seed ^ 0xfa151f1edULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.04);

  const PrecheckReport pre = continuity_precheck(p);

  // seed parameter: climbing happens on (0,1) coordinates, weights included
  std::vector<double> params(static_cast<std::size_t>(dim));
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(npts),
                                       std::vector<double>(static_cast<std::size_t>(k)));
  std::vector<double> lambda(static_cast<std::size_t>(npts));

  long long used = 0;
  const auto evaluate = [&](const std::vector<double>& q) {
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < k; ++j)
        pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            p.box()[static_cast<std::size_t>(j)].at(
                std::min(std::max(q[static_cast<std::size_t>(i * k + j)], 1e-9), 1.0 - 1e-9));
    double wmax = 0;
    for (int i = 0; i < npts; ++i) {
      lambda[static_cast<std::size_t>(i)] =
          std::max(q[static_cast<std::size_t>(npts * k + i)], 0.0);
      wmax = std::max(wmax, lambda[static_cast<std::size_t>(i)]);
    }
    if (wmax <= 0) lambda[0] = 1.0;
    ++used;
    return evaluate_weighted_instance(p, pts, lambda).violation();
  };

  double jump_param = -1;
  int jump_coord = -1;
  if (pre.status == PrecheckStatus::MustFail) {
    if (pre.generator >= 1) {
      jump_coord = pre.generator - 1;
      jump_param = p.box()[static_cast<std::size_t>(jump_coord)].param_of(pre.location);
    } else {
      // f_0 jump: find s with phi(diag(s)) at the jump by bisection
      double lo = 1e-6, hi = 1.0 - 1e-6;
      const auto diag_phi = [&](double s) {
        std::vector<double> x(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) x[static_cast<std::size_t>(j)] = p.box()[static_cast<std::size_t>(j)].at(s);
        return p.apply_phi(x);
      };
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (diag_phi(mid) < pre.location ? lo : hi) = mid;
      }
      jump_param = 0.5 * (lo + hi);
      jump_coord = -2;  // every coordinate clusters on the diagonal value
    }
  }

  std::optional<Counterexample> best;
  double best_violation = 0;

  while (used < cfg.budget) {
    const bool seeded = jump_param >= 0 && (uni(rng) < 0.5);
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < k; ++j) {
        double& q = params[static_cast<std::size_t>(i * k + j)];
        if (seeded && (jump_coord == -2 || j == jump_coord))
          q = std::min(std::max(jump_param + gauss(rng), 1e-6), 1.0 - 1e-6);
        else
          q = uni(rng);
      }
    for (int i = 0; i < npts; ++i) params[static_cast<std::size_t>(npts * k + i)] = uni(rng);

    double current = evaluate(params);
    double step = cfg.initial_step;
    const double decay = std::pow(cfg.min_step / cfg.initial_step, 1.0 / cfg.steps_per_restart);
    for (int s = 0; s < cfg.steps_per_restart && used < cfg.budget; ++s, step *= decay) {
      for (int d = 0; d < dim && used < cfg.budget; ++d) {
        for (double dir : {step, -step}) {
          auto cand = params;
          cand[static_cast<std::size_t>(d)] =
              std::min(std::max(cand[static_cast<std::size_t>(d)] + dir, 0.0), 1.0);
          const double val = evaluate(cand);
          if (val > current) {
            current = val;
            params = std::move(cand);
            break;
          }
        }
      }
    }
    if (current > best_violation) {
      best_violation = current;
      evaluate(params);  // rebuild pts/lambda for the best parameters
      best = evaluate_weighted_instance(p, pts, lambda);
    }
    if (best_violation > cfg.threshold) break;
  }

  if (!best || !(best->violation() > cfg.threshold)) return std::nullopt;
  // fresh re-evaluation before handing the counterexample out
  Counterexample verified = replay(p, *best);
  if (!(verified.violation() > cfg.threshold)) return std::nullopt;
  return verified;
}

struct JensenReport {
  enum class Status { Holds, Fails, Unsupported };
  Status status = Status::Unsupported;
  std::string branch;
  double witness = 0;
};

// Analytic criterion for midpoint convexity of the mean generated by f:
// either f'' vanishes identically, or f'' > 0 and f'/f'' is concave.
// Single-piece generators only (multi-piece smoothness is not decidable here).
inline JensenReport jensen_criterion(const GeneratorFn& f) {
  JensenReport rep;
  if (f.pieces().size() != 1) {
    rep.branch = "multi-piece generator";
    return rep;
  }
  const Piece& piece = f.pieces()[0];
  constexpr int kSamples = 401;
  std::vector<double> xs = f.domain().grid(kSamples);

  bool all_zero = true, all_positive = true;
  for (double x : xs) {
    const double d1 = piece.derivative(x), d2 = piece.second_derivative(x);
    const double ztol = 1e-12 * (1.0 + std::abs(d1));
    if (std::abs(d2) > ztol) all_zero = false;
    if (!(d2 > ztol)) all_positive = false;
    if (!all_zero && !all_positive) {
      rep.status = JensenReport::Status::Fails;
      rep.branch = "f'' changes sign or is negative";
      rep.witness = x;
      return rep;
    }
  }
  if (all_zero) {
    rep.status = JensenReport::Status::Holds;
    rep.branch = "f'' == 0";
    return rep;
  }

  // f'' > 0 everywhere sampled: test concavity of f'/f'' by second differences
  const auto ratio = [&](double x) { return piece.derivative(x) / piece.second_derivative(x); };
  for (double x : xs) {
    const double h = 1e-3 * (1.0 + std::abs(x));
    if (!f.domain().contains(x - h) || !f.domain().contains(x + h)) continue;
    const double second = ratio(x - h) + ratio(x + h) - 2.0 * ratio(x);
    if (second > 1e-9 * (1.0 + std::abs(ratio(x)))) {
      rep.status = JensenReport::Status::Fails;
      rep.branch = "f'/f'' not concave";
      rep.witness = x;
      return rep;
    }
  }
  rep.status = JensenReport::Status::Holds;
  rep.branch = "f'' > 0 and f'/f'' concave";
  return rep;
}

enum class VerdictStatus { HoldsCertified, Fails, Undecided };

struct Agreement {
  std::string precheck = "skipped";
  std::string gamma = "skipped";
  std::string concavity = "skipped";
  std::string e2 = "skipped";
  std::string certificate = "skipped";
  std::string falsifier = "skipped";
  std::string jensen = "not_applicable";
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Undecided;
  std::optional<Certificate> certificate;
  std::optional<Counterexample> counterexample;
  std::optional<ConcavityReport> concavity;
  Agreement agreement;
  std::string note;
};

struct DecideConfig {
  std::uint64_t seed = 0;
  GridSpec grid;
  SampleSpec sample;
  RefineSpec refine;
  ConcavityConfig concavity;
  FalsifyConfig falsify;
  double replay_tol = 1e-12;
};

// Run every evidence channel and aggregate: continuity precheck, Gamma
// density, concavity + domination, the certificate construction, and the
// falsifier. A certificate (or concavity evidence) alongside a verified
// counterexample is a hard internal error. `none` from the falsifier is
// never treated as a proof.
inline Verdict decide(const InequalityProblem& p, DecideConfig cfg = {}) {
  cfg.sample.seed = cfg.sample.seed ? cfg.sample.seed : cfg.seed + 1;
  cfg.concavity.seed = cfg.concavity.seed ? cfg.concavity.seed : cfg.seed + 2;
  cfg.falsify.seed = cfg.falsify.seed ? cfg.falsify.seed : cfg.seed + 3;

  Verdict out;
  const PrecheckReport pre = continuity_precheck(p);
  out.agreement.precheck = pre.status == PrecheckStatus::Consistent     ? "consistent"
                           : pre.status == PrecheckStatus::MustFail     ? "must_fail"
                                                                        : "not_applicable";
  const GammaReport gamma = gamma_density(p);
  out.agreement.gamma = gamma.status == GammaStatus::Dense ? "dense" : "unknown";

  bool concave_ok = false;
  bool e2_ok = false;
  if (p.inner_continuous()) {
    out.concavity = check_concavity(p, cfg.concavity);
    switch (out.concavity->status) {
      case ConcavityReport::Status::Concave: out.agreement.concavity = "concave"; break;
      case ConcavityReport::Status::NotConcave: out.agreement.concavity = "not_concave"; break;
      case ConcavityReport::Status::Unsupported: out.agreement.concavity = "unsupported"; break;
    }
    concave_ok = out.concavity->status == ConcavityReport::Status::Concave;
    if (concave_ok) {
      const E2Report e2 = check_e2(p, 200, cfg.seed + 4);
      e2_ok = e2.ok;
      out.agreement.e2 = !e2.ok ? "violation" : e2.by_construction ? "by_construction" : "ok";
    }
  } else {
    out.agreement.concavity = "unsupported";
  }

  CertifyResult cert;
  if (gamma.status == GammaStatus::Dense) {
    cert = build_certificate(p, cfg.grid, cfg.sample, cfg.refine);
    out.agreement.certificate = cert.status == CertifyStatus::Certified  ? "certified"
                                : cert.status == CertifyStatus::Refuted  ? "refuted"
                                                                         : "undecided";
  }

  std::optional<Counterexample> found = falsify(p, cfg.falsify);
  out.agreement.falsifier = found ? "found" : "none";

  // Jensen-shaped instances get the analytic criterion as a cross-check.
  bool jensen_holds = false;
  if (p.phi() == p.Phi() && p.phi().kind() == CouplerKind::ArithmeticMean) {
    bool same = p.f(0).pieces().size() == 1;
    for (int j = 1; j <= p.k() && same; ++j) same = p.f(j) == p.f(0);
    if (same) {
      const JensenReport jr = jensen_criterion(p.f(0));
      out.agreement.jensen = jr.status == JensenReport::Status::Holds    ? "holds"
                             : jr.status == JensenReport::Status::Fails  ? "fails"
                                                                         : "unsupported";
      jensen_holds = jr.status == JensenReport::Status::Holds;
    }
  }

  // verify counterexamples by replay, keep the largest violation
  const auto verified = [&](const std::optional<Counterexample>& ce) -> std::optional<Counterexample> {
    if (!ce) return std::nullopt;
    const Counterexample r = replay(p, *ce);
    if (std::abs(r.lhs - ce->lhs) > cfg.replay_tol || std::abs(r.rhs - ce->rhs) > cfg.replay_tol)
      return std::nullopt;
    if (!(r.violation() > cfg.falsify.threshold)) return std::nullopt;
    return r;
  };
  std::optional<Counterexample> best = verified(found);
  if (auto c = verified(cert.counterexample); c && (!best || c->violation() > best->violation()))
    best = c;

  const bool holds_evidence =
      cert.status == CertifyStatus::Certified ||
      (concave_ok && e2_ok && gamma.status == GammaStatus::Dense);
  if (best && (holds_evidence || jensen_holds))
    throw InconsistencyError("decide: certificate and verified counterexample coexist");

  if (best) {
    out.status = VerdictStatus::Fails;
    out.counterexample = std::move(best);
  } else if (holds_evidence) {
    out.status = VerdictStatus::HoldsCertified;
    if (cert.certificate) out.certificate = std::move(cert.certificate);
  } else {
    out.status = VerdictStatus::Undecided;
    if (pre.status == PrecheckStatus::MustFail)
      out.note = "continuity precheck demands failure but no counterexample was confirmed";
    else if (gamma.status == GammaStatus::Unknown)
      out.note = "Gamma density unknown; no certificate channel available";
  }
  return out;
}

}  // namespace qamineq
