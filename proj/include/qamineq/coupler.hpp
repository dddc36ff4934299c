#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "qamineq/errors.hpp"
#include "qamineq/interval.hpp"

namespace qamineq {

enum class CouplerKind { Sum, Product, Affine, PowerSum, ArithmeticMean, Constant };

// Separately increasing combiner on a k-dimensional box. Every kind is
// continuous; `constant` is the only one that is not strictly increasing in
// any coordinate (it exists to exercise the non-dense-Gamma paths).
class Coupler {
 public:
  static Coupler sum(int k) { return {CouplerKind::Sum, k, 0.0, {}}; }
  static Coupler product(int k) { return {CouplerKind::Product, k, 0.0, {}}; }
  static Coupler arithmetic_mean(int k) { return {CouplerKind::ArithmeticMean, k, 0.0, {}}; }
  static Coupler constant(int k, double value) {
    if (!std::isfinite(value)) throw ValidationError("constant coupler: non-finite value");
    return {CouplerKind::Constant, k, value, {}};
  }
  static Coupler affine(double c0, std::vector<double> coeffs) {
    if (!std::isfinite(c0)) throw ValidationError("affine coupler: non-finite offset");
    if (coeffs.empty()) throw ValidationError("affine coupler: needs coefficients");
    for (double c : coeffs)
      if (!(c > 0) || !std::isfinite(c))
        throw ValidationError("affine coupler: coefficients must be positive and finite");
    const int k = static_cast<int>(coeffs.size());
    return {CouplerKind::Affine, k, c0, std::move(coeffs)};
  }
  // (x_1^r + ... + x_k^r)^(1/r) on the positive orthant.
  static Coupler power_sum(int k, double r) {
    if (r == 0 || !std::isfinite(r)) throw ValidationError("power_sum: r must be nonzero");
    return {CouplerKind::PowerSum, k, r, {}};
  }

  CouplerKind kind() const { return kind_; }
  int arity() const { return k_; }
  double param() const { return a_; }  // affine c0 / power_sum r / constant value
  const std::vector<double>& coeffs() const { return coeffs_; }

  bool separately_strictly_increasing() const { return kind_ != CouplerKind::Constant; }
  bool continuous() const { return true; }
  bool requires_positive() const {
    return kind_ == CouplerKind::Product || kind_ == CouplerKind::PowerSum;
  }

  double operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != k_) throw ArityError("coupler: wrong arity");
    if (requires_positive())
      for (double v : x)
        if (!(v > 0)) throw DomainError("coupler: argument outside positive orthant");
    return eval_unchecked(x);
  }
  double operator()(const std::vector<double>& x) const {
    return (*this)(std::span<const double>(x));
  }

  // Limit at a box corner; entries may be +-infinity or sit on the positive
  // orthant boundary. Corners never mix -inf with +inf.
  double corner_limit(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != k_) throw ArityError("coupler: wrong arity");
    switch (kind_) {
      case CouplerKind::Sum:
      case CouplerKind::ArithmeticMean:
      case CouplerKind::Affine: {
        for (double v : x) {
          if (v == -kInf) return -kInf;
          if (v == kInf) return kInf;
        }
        return eval_unchecked(x);
      }
      case CouplerKind::Product: {
        for (double v : x)
          if (v == 0) return 0.0;
        for (double v : x)
          if (v == kInf) return kInf;
        return eval_unchecked(x);
      }
      case CouplerKind::PowerSum: {
        if (a_ > 0) {
          for (double v : x)
            if (v == kInf) return kInf;
        } else {
          for (double v : x)
            if (v == 0) return 0.0;
        }
        return eval_unchecked(x);
      }
      case CouplerKind::Constant:
        return a_;
    }
    throw Error("unreachable");
  }

  // Closure bounds of the image of an open box (separately increasing and
  // continuous, so the two extreme corners suffice).
  std::pair<double, double> image_bounds(std::span<const Interval> box) const {
    if (static_cast<int>(box.size()) != k_) throw ArityError("coupler: wrong box arity");
    std::vector<double> lo(box.size()), hi(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) {
      lo[j] = box[j].lo();
      hi[j] = box[j].hi();
    }
    return {corner_limit(lo), corner_limit(hi)};
  }

  bool operator==(const Coupler& o) const = default;

 private:
  Coupler(CouplerKind kind, int k, double a, std::vector<double> coeffs)
      : kind_(kind), k_(k), a_(a), coeffs_(std::move(coeffs)) {
    if (k_ < 1) throw ValidationError("coupler: arity must be >= 1");
  }

  double eval_unchecked(std::span<const double> x) const {
    switch (kind_) {
      case CouplerKind::Sum: {
        double s = 0;
        for (double v : x) s += v;
        return s;
      }
      case CouplerKind::ArithmeticMean: {
        double s = 0;
        for (double v : x) s += v;
        return s / k_;
      }
      case CouplerKind::Affine: {
        double s = a_;
        for (std::size_t j = 0; j < x.size(); ++j) s += coeffs_[j] * x[j];
        return s;
      }
      case CouplerKind::Product: {
        double p = 1;
        for (double v : x) p *= v;
        return p;
      }
      case CouplerKind::PowerSum: {
        double s = 0;
        for (double v : x) s += std::pow(v, a_);
        return std::pow(s, 1.0 / a_);
      }
      case CouplerKind::Constant:
        return a_;
    }
    throw Error("unreachable");
  }

  CouplerKind kind_;
  int k_;
  double a_;
  std::vector<double> coeffs_;
};

}  // namespace qamineq
