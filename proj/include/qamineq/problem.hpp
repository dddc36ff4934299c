#pragma once

#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qamineq/coupler.hpp"
#include "qamineq/generator.hpp"

namespace qamineq {

// The inequality instance (k, f_0..f_k, phi, Phi) over the box I = I_1 x ... x I_k.
// Verdicts downstream are always relative to this box. Immutable; construction
// validates coupler arities, box/domain containment and phi(I) ⊆ dom f_0 by
// corner interval arithmetic plus a random sample.
class InequalityProblem {
 public:
  InequalityProblem(std::vector<GeneratorFn> generators, Coupler phi, Coupler Phi,
                    std::vector<Interval> box)
      : f_(std::move(generators)), phi_(std::move(phi)), Phi_(std::move(Phi)), box_(std::move(box)) {
    const int k = static_cast<int>(box_.size());
    if (k < 1) throw ValidationError("problem: k must be >= 1");
    if (static_cast<int>(f_.size()) != k + 1)
      throw ValidationError("problem: needs k+1 generators f_0..f_k");
    if (phi_.arity() != k || Phi_.arity() != k)
      throw ValidationError("problem: coupler arity must equal k");
    for (int j = 1; j <= k; ++j)
      if (!f_[static_cast<std::size_t>(j)].domain().contains(box_[static_cast<std::size_t>(j - 1)]))
        throw ValidationError("problem: box coordinate " + std::to_string(j) +
                              " not inside dom f_" + std::to_string(j));
    if (phi_.requires_positive() || Phi_.requires_positive())
      for (const Interval& b : box_)
        if (!(b.lo() >= 0)) throw ValidationError("problem: coupler needs a positive box");

    // phi(I) must land inside dom f_0: corner bounds, then random probes.
    const auto img = phi_.image_bounds(box_);
    const Interval& d0 = f_[0].domain();
    const bool ok = phi_.separately_strictly_increasing()
                        ? d0.lo() <= img.first && img.second <= d0.hi()
                        : d0.contains(img.first) && d0.contains(img.second);
    if (!ok) throw ValidationError("problem: phi(I) not contained in dom f_0");
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(k));
    for (int s = 0; s < 32; ++s) {
      for (int j = 0; j < k; ++j) x[static_cast<std::size_t>(j)] = box_[static_cast<std::size_t>(j)].at(uni(rng));
      if (!d0.contains(phi_(x)))
        throw ValidationError("problem: phi sample escaped dom f_0");
    }
  }

  int k() const { return static_cast<int>(box_.size()); }
  const GeneratorFn& f(int j) const { return f_[static_cast<std::size_t>(j)]; }
  const Coupler& phi() const { return phi_; }
  const Coupler& Phi() const { return Phi_; }
  std::span<const Interval> box() const { return box_; }
  const Interval& box(int j) const { return box_[static_cast<std::size_t>(j - 1)]; }  // j in [1, k]

  double apply_phi(std::span<const double> x) const { return phi_(x); }
  double apply_Phi(std::span<const double> x) const { return Phi_(x); }

  std::pair<double, double> phi_image() const { return phi_.image_bounds(box_); }
  std::pair<double, double> Phi_image() const { return Phi_.image_bounds(box_); }

  // conv(f_j(I_j)) for the box coordinate I_j, j in [1, k].
  Interval psi_domain(int j) const {
    const GeneratorFn& fj = f(j);
    const Interval& b = box(j);
    return {fj.limit_from_right(b.lo()), fj.limit_from_left(b.hi())};
  }

  bool inner_continuous() const {
    for (int j = 1; j <= k(); ++j)
      if (!f(j).continuous_on(box(j))) return false;
    return true;
  }

 private:
  std::vector<GeneratorFn> f_;
  Coupler phi_, Phi_;
  std::vector<Interval> box_;
};

// Transfer function Psi(u) = f_0(phi(f_1^{-1}(u_1), ..., f_k^{-1}(u_k))).
// Requires true inverses, hence continuous inner generators on the box.
inline double psi_eval(const InequalityProblem& p, std::span<const double> u) {
  const int k = p.k();
  if (static_cast<int>(u.size()) != k) throw ArityError("psi_eval: wrong arity");
  std::vector<double> x(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    if (!p.f(j).continuous_on(p.box(j)))
      throw UnsupportedError("psi_eval: f_" + std::to_string(j) +
                             " is discontinuous on the box");
    const Interval dj = p.psi_domain(j);
    const double uj = u[static_cast<std::size_t>(j - 1)];
    if (!dj.contains(uj)) throw RangeError("psi_eval: u outside conv(f_j(I_j))");
    x[static_cast<std::size_t>(j - 1)] = p.f(j).inverse(uj);
  }
  return p.f(0)(p.apply_phi(x));
}

inline double psi_eval(const InequalityProblem& p, const std::vector<double>& u) {
  return psi_eval(p, std::span<const double>(u));
}

enum class GammaStatus { Dense, Unknown };

struct GammaReport {
  GammaStatus status = GammaStatus::Unknown;
  std::string reason;
};

// Density of Gamma = Phi^{-1}(C_{f_0}) in the box. Dense when f_0 is
// continuous across Phi(I), or when Phi is strictly increasing in some
// coordinate (f_0 has finitely many jumps, so their preimage under a strictly
// increasing slice map is nowhere dense).
inline GammaReport gamma_density(const InequalityProblem& p) {
  const auto img = p.Phi_image();
  bool jump_inside = false;
  for (double d : p.f(0).discontinuities())
    jump_inside = jump_inside || (img.first < d && d < img.second) ||
                  (!p.Phi().separately_strictly_increasing() && d == img.first);
  if (!jump_inside) return {GammaStatus::Dense, "f_0 continuous on Phi(I)"};
  if (p.Phi().separately_strictly_increasing())
    return {GammaStatus::Dense, "Phi strictly increasing in each coordinate"};
  return {GammaStatus::Unknown,
          "f_0 discontinuous on Phi(I) and Phi is not strictly increasing in any coordinate"};
}

enum class PrecheckStatus { Consistent, MustFail, NotApplicable };

struct PrecheckReport {
  PrecheckStatus status = PrecheckStatus::Consistent;
  int generator = -1;   // offending generator index
  double location = 0;  // jump position
};

// Necessity of continuity when phi == Phi and phi is separately strictly
// increasing: any jump of f_1..f_k inside the box, or of f_0 inside phi(I),
// makes the inequality impossible.
inline PrecheckReport continuity_precheck(const InequalityProblem& p) {
  if (!(p.phi() == p.Phi()) || !p.phi().separately_strictly_increasing())
    return {PrecheckStatus::NotApplicable, -1, 0};
  for (int j = 1; j <= p.k(); ++j)
    for (double t : p.f(j).discontinuities())
      if (p.box(j).contains(t)) return {PrecheckStatus::MustFail, j, t};
  const auto img = p.phi_image();
  for (double d : p.f(0).discontinuities())
    if (img.first < d && d < img.second) return {PrecheckStatus::MustFail, 0, d};
  return {PrecheckStatus::Consistent, -1, 0};
}

}  // namespace qamineq
