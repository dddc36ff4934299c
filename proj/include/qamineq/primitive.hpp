#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qamineq/errors.hpp"
#include "qamineq/interval.hpp"

namespace qamineq {

enum class PrimitiveKind { Affine, Power, Exponential, Logarithm };

namespace detail {
inline double sgn(double v) { return v < 0 ? -1.0 : 1.0; }
}

// One strictly increasing analytic building block. Power and exponential are
// sign-normalized (negative exponent/rate flips the sign of the value) so
// every kind is increasing for any admissible parameter. The `reflected` flag
// realizes x -> -f(-x) on the mirrored domain, staying closed under
// reflection for all kinds.
class Primitive {
 public:
  static Primitive affine(double slope, double intercept) {
    if (!(slope > 0) || !std::isfinite(slope) || !std::isfinite(intercept))
      throw ValidationError("affine: slope must be positive and finite");
    return {PrimitiveKind::Affine, slope, intercept};
  }
  static Primitive power(double exponent) {
    if (exponent == 0 || !std::isfinite(exponent))
      throw ValidationError("power: exponent must be nonzero and finite");
    return {PrimitiveKind::Power, exponent, 0.0};
  }
  static Primitive exponential(double rate) {
    if (rate == 0 || !std::isfinite(rate))
      throw ValidationError("exponential: rate must be nonzero and finite");
    return {PrimitiveKind::Exponential, rate, 0.0};
  }
  static Primitive logarithm(double base) {
    if (!(base > 1) || !std::isfinite(base))
      throw ValidationError("logarithm: base must be > 1 and finite");
    return {PrimitiveKind::Logarithm, base, 0.0};
  }

  PrimitiveKind kind() const { return kind_; }
  bool reflected() const { return reflected_; }
  double param_a() const { return a_; }  // slope / exponent / rate / base
  double param_b() const { return b_; }  // affine intercept

  Primitive reflect() const {
    Primitive p = *this;
    p.reflected_ = !p.reflected_;
    return p;
  }

  Interval natural_domain() const {
    const Interval d = base_domain();
    return reflected_ ? Interval(-d.hi(), -d.lo()) : d;
  }

  double operator()(double x) const { return reflected_ ? -base_eval(-x) : base_eval(x); }

  // One-point limit; x may be +-infinity or sit on the natural domain boundary.
  double limit(double x) const { return reflected_ ? -base_limit(-x) : base_limit(x); }

  double derivative(double x) const {
    return reflected_ ? base_derivative(-x) : base_derivative(x);
  }
  double second_derivative(double x) const {
    return reflected_ ? -base_second(-x) : base_second(x);
  }

  // Exact analytic inverse on the open range.
  double inverse(double y) const { return reflected_ ? -base_inverse(-y) : base_inverse(y); }

  bool operator==(const Primitive& o) const = default;

 private:
  Primitive(PrimitiveKind k, double a, double b) : kind_(k), a_(a), b_(b) {}

  Interval base_domain() const {
    switch (kind_) {
      case PrimitiveKind::Affine:
      case PrimitiveKind::Exponential:
        return Interval::whole();
      case PrimitiveKind::Power:
      case PrimitiveKind::Logarithm:
        return Interval::positive();
    }
    throw Error("unreachable");
  }

  double base_eval(double x) const {
    switch (kind_) {
      case PrimitiveKind::Affine: return a_ * x + b_;
      case PrimitiveKind::Power: return detail::sgn(a_) * std::pow(x, a_);
      case PrimitiveKind::Exponential: return detail::sgn(a_) * std::exp(a_ * x);
      case PrimitiveKind::Logarithm: return std::log(x) / std::log(a_);
    }
    throw Error("unreachable");
  }

  double base_limit(double x) const {
    switch (kind_) {
      case PrimitiveKind::Affine:
        if (x == -kInf) return -kInf;
        if (x == kInf) return kInf;
        return base_eval(x);
      case PrimitiveKind::Power:
        if (x <= 0) return a_ > 0 ? 0.0 : -kInf;
        if (x == kInf) return a_ > 0 ? kInf : 0.0;
        return base_eval(x);
      case PrimitiveKind::Exponential:
        if (x == -kInf) return a_ > 0 ? 0.0 : -kInf;
        if (x == kInf) return a_ > 0 ? kInf : 0.0;
        return base_eval(x);
      case PrimitiveKind::Logarithm:
        if (x <= 0) return -kInf;
        if (x == kInf) return kInf;
        return base_eval(x);
    }
    throw Error("unreachable");
  }

  double base_derivative(double x) const {
    switch (kind_) {
      case PrimitiveKind::Affine: return a_;
      case PrimitiveKind::Power: return std::abs(a_) * std::pow(x, a_ - 1.0);
      case PrimitiveKind::Exponential: return std::abs(a_) * std::exp(a_ * x);
      case PrimitiveKind::Logarithm: return 1.0 / (x * std::log(a_));
    }
    throw Error("unreachable");
  }

  double base_second(double x) const {
    switch (kind_) {
      case PrimitiveKind::Affine: return 0.0;
      case PrimitiveKind::Power:
        return detail::sgn(a_) * a_ * (a_ - 1.0) * std::pow(x, a_ - 2.0);
      case PrimitiveKind::Exponential:
        return detail::sgn(a_) * a_ * a_ * std::exp(a_ * x);
      case PrimitiveKind::Logarithm: return -1.0 / (x * x * std::log(a_));
    }
    throw Error("unreachable");
  }

  double base_inverse(double y) const {
    switch (kind_) {
      case PrimitiveKind::Affine: return (y - b_) / a_;
      case PrimitiveKind::Power: return std::pow(detail::sgn(a_) * y, 1.0 / a_);
      case PrimitiveKind::Exponential: return std::log(detail::sgn(a_) * y) / a_;
      case PrimitiveKind::Logarithm: return std::pow(a_, y);
    }
    throw Error("unreachable");
  }

  PrimitiveKind kind_;
  double a_, b_;
  bool reflected_ = false;
};

// A generator piece: one primitive or a first-to-last composition chain.
// Chains arise from compose(); inverses apply in reverse and derivatives by
// the chain rule, so everything stays exact.
class Piece {
 public:
  Piece(Primitive p) : chain_{std::move(p)} {}
  explicit Piece(std::vector<Primitive> chain) : chain_(std::move(chain)) {
    if (chain_.empty()) throw ValidationError("Piece: empty chain");
  }

  const std::vector<Primitive>& chain() const { return chain_; }

  double operator()(double x) const {
    double v = x;
    for (const auto& p : chain_) v = p(v);
    return v;
  }

  double limit(double x) const {
    double v = x;
    for (const auto& p : chain_) v = p.limit(v);
    return v;
  }

  double inverse(double y) const {
    double v = y;
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) v = it->inverse(v);
    return v;
  }

  double derivative(double x) const {
    double v = x, d = 1.0;
    for (const auto& p : chain_) {
      d *= p.derivative(v);
      v = p(v);
    }
    return d;
  }

  double second_derivative(double x) const {
    double v = x, d1 = 1.0, d2 = 0.0;
    for (const auto& p : chain_) {
      const double pd1 = p.derivative(v), pd2 = p.second_derivative(v);
      d2 = pd2 * d1 * d1 + pd1 * d2;
      d1 = pd1 * d1;
      v = p(v);
    }
    return d2;
  }

  // Largest open interval the whole chain accepts.
  Interval natural_domain() const {
    Interval dom = chain_.back().natural_domain();
    for (std::size_t i = chain_.size() - 1; i-- > 0;) dom = preimage(chain_[i], dom);
    return dom;
  }

  Piece reflect() const {
    std::vector<Primitive> r;
    r.reserve(chain_.size());
    for (const auto& p : chain_) r.push_back(p.reflect());
    return Piece(std::move(r));
  }

  bool operator==(const Piece& o) const = default;

 private:
  static Interval preimage(const Primitive& p, const Interval& target) {
    const Interval own = p.natural_domain();
    double lo = own.lo(), hi = own.hi();
    if (p.limit(own.lo()) < target.lo()) lo = p.inverse(target.lo());
    if (p.limit(own.hi()) > target.hi()) hi = p.inverse(target.hi());
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
      throw ValidationError("Piece: chain links have incompatible ranges");
    return {lo, hi};
  }

  std::vector<Primitive> chain_;
};

}  // namespace qamineq
