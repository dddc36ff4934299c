#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qamineq/errors.hpp"
#include "qamineq/interval.hpp"
#include "qamineq/primitive.hpp"

namespace qamineq {

struct PointEval {
  double left;   // f_-(x)
  double value;  // f(x)
  double right;  // f_+(x)
};

struct ValidationReport {
  bool ok = true;
  std::string message;
  int index = -1;  // offending piece / breakpoint, when known
};

namespace detail {

inline double jump_eps(double l, double r) {
  return 1e-12 * (1.0 + std::max(std::abs(l), std::abs(r)));
}

// Bisection fallback for inverting a strictly increasing function on (lo, hi);
// absolute tolerance 1e-12 on the argument. Endpoints may be infinite.
template <typename Fn>
double bisect_increasing(Fn&& fn, double lo, double hi, double target) {
  double a, b, step;
  if (std::isfinite(lo)) {
    a = lo;
  } else {
    a = std::isfinite(hi) ? hi - 1.0 : -1.0;
    step = 1.0;
    while (fn(a) > target) {
      a -= step;
      step *= 2;
    }
  }
  if (std::isfinite(hi)) {
    b = hi;
  } else {
    b = std::isfinite(lo) ? lo + 1.0 : 1.0;
    step = 1.0;
    while (fn(b) < target) {
      b += step;
      step *= 2;
    }
  }
  for (int it = 0; it < 200 && b - a > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    const double m = 0.5 * (a + b);
    (fn(m) < target ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// First failed invariant (or ok) of a prospective generator: piece/breakpoint
// counts, ordering, chain domains, limit sandwiches at breakpoints, and an
// n-point strict monotonicity sample. NaN jump values mean "use the gap
// midpoint" and are always admissible.
inline ValidationReport validate_generator(const Interval& domain,
                                           const std::vector<Piece>& pieces,
                                           const std::vector<double>& breakpoints,
                                           const std::vector<double>& jump_values) {
  const auto fail = [](std::string msg, int idx = -1) {
    return ValidationReport{false, std::move(msg), idx};
  };
  const std::size_t m = pieces.size();
  if (m == 0) return fail("generator needs at least one piece");
  if (breakpoints.size() != m - 1)
    return fail("breakpoint count must be piece count minus one");
  if (!jump_values.empty() && jump_values.size() != breakpoints.size())
    return fail("jump value count must match breakpoint count");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double t = breakpoints[i];
    if (!domain.contains(t))
      return fail("breakpoint outside the open domain", static_cast<int>(i));
    if (i > 0 && !(breakpoints[i - 1] < t))
      return fail("breakpoints must be strictly increasing", static_cast<int>(i));
  }

  const auto sub_lo = [&](std::size_t i) { return i == 0 ? domain.lo() : breakpoints[i - 1]; };
  const auto sub_hi = [&](std::size_t i) {
    return i + 1 == m ? domain.hi() : breakpoints[i];
  };

  for (std::size_t i = 0; i < m; ++i) {
    Interval nd = pieces[i].natural_domain();
    const double lo = sub_lo(i), hi = sub_hi(i);
    if (!(nd.lo() <= lo) || !(hi <= nd.hi()))
      return fail("piece natural domain does not cover its subinterval", static_cast<int>(i));
  }

  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double t = breakpoints[i];
    const double l = pieces[i].limit(t);
    const double r = pieces[i + 1].limit(t);
    if (!std::isfinite(l) || !std::isfinite(r))
      return fail("one-sided limit not finite at breakpoint", static_cast<int>(i));
    const double eps = detail::jump_eps(l, r);
    if (l > r + eps)
      return fail("left limit exceeds right limit at breakpoint " + std::to_string(i),
                  static_cast<int>(i));
    if (!jump_values.empty() && !std::isnan(jump_values[i])) {
      const double v = jump_values[i];
      if (!(l - eps <= v && v <= r + eps))
        return fail("jump value outside [f_-(t), f_+(t)] at breakpoint " + std::to_string(i),
                    static_cast<int>(i));
    }
  }

  // strict monotonicity sample across the whole domain
  constexpr int kSamples = 129;
  double prev = -kInf;
  bool have_prev = false;
  for (int s = 0; s < kSamples; ++s) {
    const double x = domain.at((s + 0.5) / kSamples);
    std::size_t idx =
        static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                 breakpoints.begin());
    if (idx > 0 && breakpoints[idx - 1] == x) continue;
    const double v = pieces[idx](x);
    if (!std::isfinite(v))
      return fail("piece value not finite inside the domain", static_cast<int>(idx));
    if (have_prev && !(prev < v))
      return fail("monotonicity sample failed near x = " + std::to_string(x),
                  static_cast<int>(idx));
    prev = v;
    have_prev = true;
  }
  return {};
}

// Strictly increasing, piecewise-analytic function on an open interval with
// explicit values at (possibly discontinuous) interior breakpoints. Immutable
// after construction; construction validates every invariant.
class GeneratorFn {
 public:
  GeneratorFn(Interval domain, std::vector<Piece> pieces, std::vector<double> breakpoints = {},
              std::vector<double> jump_values = {})
      : domain_(domain),
        pieces_(std::move(pieces)),
        bps_(std::move(breakpoints)),
        jumps_(std::move(jump_values)) {
    const ValidationReport rep = validate_generator(domain_, pieces_, bps_, jumps_);
    if (!rep.ok) throw ValidationError("generator: " + rep.message);

    left_lim_.resize(bps_.size());
    right_lim_.resize(bps_.size());
    if (jumps_.empty()) jumps_.assign(bps_.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < bps_.size(); ++i) {
      left_lim_[i] = pieces_[i].limit(bps_[i]);
      right_lim_[i] = pieces_[i + 1].limit(bps_[i]);
      if (std::isnan(jumps_[i])) jumps_[i] = 0.5 * (left_lim_[i] + right_lim_[i]);
    }
    hull_lo_ = pieces_.front().limit(domain_.lo());
    hull_hi_ = pieces_.back().limit(domain_.hi());
    if (!(hull_lo_ < hull_hi_)) throw ValidationError("generator: degenerate range");
  }

  static GeneratorFn identity(Interval dom = Interval::whole()) {
    return GeneratorFn(dom, {Piece(Primitive::affine(1.0, 0.0))});
  }
  static GeneratorFn single(Interval dom, Primitive p) { return GeneratorFn(dom, {Piece(std::move(p))}); }
  static GeneratorFn single(Interval dom, Piece p) { return GeneratorFn(dom, {std::move(p)}); }

  const Interval& domain() const { return domain_; }
  const std::vector<double>& breakpoints() const { return bps_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<double>& jump_values() const { return jumps_; }

  double operator()(double x) const {
    const std::size_t i = locate(x);
    if (i < bps_.size() && bps_[i] == x) return jumps_[i];
    return pieces_[i](x);
  }

  PointEval eval_with_limits(double x) const {
    const std::size_t i = locate(x);
    if (i < bps_.size() && bps_[i] == x) return {left_lim_[i], jumps_[i], right_lim_[i]};
    const double v = pieces_[i](x);
    return {v, v, v};
  }

  // One-sided limits; the argument may equal a domain endpoint.
  double limit_from_right(double x) const {
    if (!(domain_.lo() <= x && x < domain_.hi()))
      throw DomainError("limit_from_right: point outside [lo, hi)");
    if (x == domain_.lo()) return hull_lo_;
    const std::size_t i = locate(x);
    if (i < bps_.size() && bps_[i] == x) return right_lim_[i];
    return pieces_[i](x);
  }
  double limit_from_left(double x) const {
    if (!(domain_.lo() < x && x <= domain_.hi()))
      throw DomainError("limit_from_left: point outside (lo, hi]");
    if (x == domain_.hi()) return hull_hi_;
    const std::size_t i = locate(x);
    if (i < bps_.size() && bps_[i] == x) return left_lim_[i];
    return pieces_[i](x);
  }

  // conv(f(I)): open interval between the one-sided limits at the domain ends.
  Interval range_hull() const { return {hull_lo_, hull_hi_}; }

  std::vector<double> discontinuities() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < bps_.size(); ++i)
      if (right_lim_[i] - left_lim_[i] > detail::jump_eps(left_lim_[i], right_lim_[i]))
        out.push_back(bps_[i]);
    return out;
  }
  bool is_continuous() const { return discontinuities().empty(); }
  bool continuous_on(const Interval& sub) const {
    for (double t : discontinuities())
      if (sub.contains(t)) return false;
    return true;
  }

  // Generalized inverse at a point: the exact piece inverse where u lies in
  // f(I), the breakpoint on jump gaps. Endpoints of the hull are never
  // attained on an open domain, so out-of-hull queries are rejected.
  double inverse(double u) const {
    if (!(hull_lo_ < u && u < hull_hi_))
      throw RangeError("inverse: value outside conv(f(I))");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (u < left_lim_[i]) return invert_piece(i, u);
      if (u <= right_lim_[i]) return bps_[i];
    }
    return invert_piece(pieces_.size() - 1, u);
  }

  GeneratorFn reflected() const {
    std::vector<Piece> rp;
    std::vector<double> rb, rj;
    for (std::size_t i = pieces_.size(); i-- > 0;) rp.push_back(pieces_[i].reflect());
    for (std::size_t i = bps_.size(); i-- > 0;) {
      rb.push_back(-bps_[i]);
      rj.push_back(-jumps_[i]);
    }
    return GeneratorFn(Interval(-domain_.hi(), -domain_.lo()), std::move(rp), std::move(rb),
                       std::move(rj));
  }

  const Piece& piece_at(double x) const {
    const std::size_t i = locate(x);
    if (i < bps_.size() && bps_[i] == x)
      throw DomainError("piece_at: point is a breakpoint");
    return pieces_[i];
  }

  bool operator==(const GeneratorFn& o) const {
    return domain_ == o.domain_ && pieces_ == o.pieces_ && bps_ == o.bps_ && jumps_ == o.jumps_;
  }

 private:
  // Index such that x lies in piece i's subinterval, or i is the breakpoint
  // index when bps_[i] == x.
  std::size_t locate(double x) const {
    if (!domain_.contains(x)) throw DomainError("generator: point outside domain");
    return static_cast<std::size_t>(std::lower_bound(bps_.begin(), bps_.end(), x) - bps_.begin());
  }

  double sub_lo(std::size_t i) const { return i == 0 ? domain_.lo() : bps_[i - 1]; }
  double sub_hi(std::size_t i) const { return i + 1 == pieces_.size() ? domain_.hi() : bps_[i]; }

  double invert_piece(std::size_t i, double u) const {
    const double lo = sub_lo(i), hi = sub_hi(i);
    const double x = pieces_[i].inverse(u);
    if (std::isfinite(x) && lo <= x && x <= hi) return x;
    return detail::bisect_increasing([&](double t) { return pieces_[i](t); }, lo, hi, u);
  }

  Interval domain_;
  std::vector<Piece> pieces_;
  std::vector<double> bps_;
  std::vector<double> jumps_;
  std::vector<double> left_lim_, right_lim_;
  double hull_lo_ = 0, hull_hi_ = 0;
};

inline ValidationReport validate_generator(const GeneratorFn& f) {
  return validate_generator(f.domain(), f.pieces(), f.breakpoints(), f.jump_values());
}

// The increasing continuous left inverse of a generator, defined on the
// convex hull of its range and constant across jump gaps.
class GenInverse {
 public:
  explicit GenInverse(GeneratorFn f) : f_(std::move(f)) {}
  double operator()(double u) const { return f_.inverse(u); }
  Interval range_hull() const { return f_.range_hull(); }
  const GeneratorFn& source() const { return f_; }

 private:
  GeneratorFn f_;
};

inline GenInverse generalized_inverse(GeneratorFn f) { return GenInverse(std::move(f)); }

// (f o g)(x) = f(g(x)). Breakpoints are g's plus the preimages under g of
// f's breakpoints; piece chains are concatenations, so the inverse of the
// result composes the inverses in reverse order exactly.
inline GeneratorFn compose(const GeneratorFn& f, const GeneratorFn& g) {
  const Interval gh = g.range_hull();
  if (!(f.domain().lo() <= gh.lo() && gh.hi() <= f.domain().hi()))
    throw CompositionError("compose: range of g not contained in domain of f");

  std::vector<double> bps = g.breakpoints();
  for (double b : f.breakpoints()) {
    if (!(gh.lo() < b && b < gh.hi())) continue;
    const double t = g.inverse(b);
    if (!g.domain().contains(t)) continue;
    bool dup = false;
    for (double s : bps) dup = dup || std::abs(s - t) <= 1e-12 * (1.0 + std::abs(t));
    if (!dup) bps.push_back(t);
  }
  std::sort(bps.begin(), bps.end());

  std::vector<Piece> pieces;
  for (std::size_t i = 0; i <= bps.size(); ++i) {
    const double lo = i == 0 ? g.domain().lo() : bps[i - 1];
    const double hi = i == bps.size() ? g.domain().hi() : bps[i];
    const Interval seg(lo, hi);
    double xm = seg.at(0.5);
    // probe off any breakpoint of g
    for (double s : g.breakpoints())
      if (xm == s) xm = seg.at(0.47);
    const Piece& gp = g.piece_at(xm);
    double ym = g(xm);
    for (double s : f.breakpoints())
      if (ym == s) {
        xm = seg.at(0.43);
        ym = g(xm);
      }
    const Piece& fp = f.piece_at(ym);
    std::vector<Primitive> chain = gp.chain();
    chain.insert(chain.end(), fp.chain().begin(), fp.chain().end());
    pieces.emplace_back(std::move(chain));
  }

  std::vector<double> jumps;
  jumps.reserve(bps.size());
  for (double t : bps) jumps.push_back(f(g(t)));

  return GeneratorFn(g.domain(), std::move(pieces), std::move(bps), std::move(jumps));
}

}  // namespace qamineq
