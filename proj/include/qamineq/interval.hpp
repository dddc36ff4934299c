#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "qamineq/errors.hpp"

namespace qamineq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Open interval (lo, hi). Endpoints may be +-infinity; membership is strict.
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
      throw ValidationError("Interval: endpoints must satisfy lo < hi");
  }

  static Interval whole() { return {-kInf, kInf}; }
  static Interval positive() { return {0.0, kInf}; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  bool contains(double x) const { return lo_ < x && x < hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }

  bool operator==(const Interval& o) const = default;

  // Interior point for parameter u in (0,1). Unbounded sides go through an
  // atanh stretch so samples stay in a numerically sane band.
  double at(double u, double scale = 3.0) const {
    const bool flo = std::isfinite(lo_), fhi = std::isfinite(hi_);
    if (flo && fhi) return lo_ + u * (hi_ - lo_);
    if (flo) return lo_ + scale * std::atanh(u);
    if (fhi) return hi_ - scale * std::atanh(1.0 - u);
    return scale * std::atanh(2.0 * u - 1.0);
  }

  // Inverse of at(): parameter in (0,1) of an interior point.
  double param_of(double x, double scale = 3.0) const {
    const bool flo = std::isfinite(lo_), fhi = std::isfinite(hi_);
    if (flo && fhi) return (x - lo_) / (hi_ - lo_);
    if (flo) return std::tanh((x - lo_) / scale);
    if (fhi) return 1.0 - std::tanh((hi_ - x) / scale);
    return 0.5 * (std::tanh(x / scale) + 1.0);
  }

  std::vector<double> grid(int n, double scale = 3.0) const {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = at((i + 0.5) / n, scale);
    return g;
  }

 private:
  double lo_, hi_;
};

}  // namespace qamineq
