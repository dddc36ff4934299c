#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "qamineq/generator.hpp"

namespace qamineq {

// Neumaier-compensated accumulator; weighted sums with wildly scaled weights
// would otherwise lose the weight-scaling invariance at test tolerance.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

// Λ_n: nonnegative weights with at least one positive entry.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw WeightError("weights: empty");
    bool any = false;
    for (double v : w_) {
      if (!(v >= 0) || !std::isfinite(v))
        throw WeightError("weights: entries must be finite and >= 0");
      any = any || v > 0;
    }
    if (!any) throw WeightError("weights: all entries zero");
  }

  static WeightVector uniform(std::size_t n) {
    return WeightVector(std::vector<double>(n, 1.0));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& entries() const { return w_; }

 private:
  std::vector<double> w_;
};

// Weighted generalized quasi-arithmetic mean:
// f^{(-1)}( sum_i w_i f(x_i) / sum_i w_i ).
// The accumulated mean is clamped into [min f(x_i), max f(x_i)] over the
// positively weighted entries, which keeps internality exact under roundoff.
inline double weighted_qam(const GeneratorFn& f, std::span<const double> x,
                           const WeightVector& w) {
  if (x.empty()) throw ArityError("weighted_qam: empty input");
  if (x.size() != w.size()) throw ArityError("weighted_qam: |x| != |weights|");
  CompensatedSum num, den;
  double fmin = kInf, fmax = -kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fx = f(x[i]);
    num.add(w[i] * fx);
    den.add(w[i]);
    if (w[i] > 0) {
      fmin = std::min(fmin, fx);
      fmax = std::max(fmax, fx);
    }
  }
  double mean = num.value() / den.value();
  mean = std::min(std::max(mean, fmin), fmax);
  return f.inverse(mean);
}

inline double weighted_qam(const GeneratorFn& f, const std::vector<double>& x,
                           const WeightVector& w) {
  return weighted_qam(f, std::span<const double>(x), w);
}

// Unweighted n-variable mean f^{(-1)}((f(x_1)+...+f(x_n))/n).
inline double qam(const GeneratorFn& f, std::span<const double> x) {
  if (x.empty()) throw ArityError("qam: empty input");
  CompensatedSum acc;
  double fmin = kInf, fmax = -kInf;
  for (double xi : x) {
    const double fx = f(xi);
    acc.add(fx);
    fmin = std::min(fmin, fx);
    fmax = std::max(fmax, fx);
  }
  double mean = acc.value() / static_cast<double>(x.size());
  mean = std::min(std::max(mean, fmin), fmax);
  return f.inverse(mean);
}

inline double qam(const GeneratorFn& f, const std::vector<double>& x) {
  return qam(f, std::span<const double>(x));
}

}  // namespace qamineq
