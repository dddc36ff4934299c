#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qamineq/errors.hpp"

namespace qamineq {

// Dense tableau simplex for min c.x s.t. Ax = b, x >= 0, b >= 0.
// Bland's rule throughout: smallest eligible entering column, smallest basis
// variable on ratio ties. Deterministic and cycle-free. Phase 1 runs with
// artificial variables for rows that do not already carry a unit column.
class SimplexTableau {
 public:
  enum class Status { Optimal, Unbounded, Infeasible };

  SimplexTableau(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c)
      : t_(std::move(a)), c_(std::move(c)) {
    rows_ = static_cast<int>(t_.size());
    cols_ = rows_ ? static_cast<int>(t_[0].size()) : 0;
    if (rows_ == 0 || cols_ == 0) throw SolverError("simplex: empty problem");
    if (static_cast<int>(b.size()) != rows_ || static_cast<int>(c_.size()) != cols_)
      throw SolverError("simplex: inconsistent dimensions");
    for (int i = 0; i < rows_; ++i) {
      if (static_cast<int>(t_[static_cast<std::size_t>(i)].size()) != cols_)
        throw SolverError("simplex: ragged matrix");
      if (!(b[static_cast<std::size_t>(i)] >= 0)) throw SolverError("simplex: negative rhs");
      t_[static_cast<std::size_t>(i)].push_back(b[static_cast<std::size_t>(i)]);
    }
  }

  Status solve(const std::vector<int>* initial_basis = nullptr) {
    if (initial_basis) {
      basis_ = *initial_basis;
      return run(c_, cols_);
    }

    // Hunt for existing unit columns, add artificials elsewhere.
    basis_.assign(static_cast<std::size_t>(rows_), -1);
    for (int j = 0; j < cols_; ++j) {
      int one_row = -1;
      bool unit = true;
      for (int i = 0; i < rows_ && unit; ++i) {
        const double v = at(i, j);
        if (v == 1.0 && one_row < 0)
          one_row = i;
        else if (v != 0.0)
          unit = false;
      }
      if (unit && one_row >= 0 && basis_[static_cast<std::size_t>(one_row)] < 0)
        basis_[static_cast<std::size_t>(one_row)] = j;
    }
    const int norig = cols_;
    std::vector<int> artificial_rows;
    for (int i = 0; i < rows_; ++i)
      if (basis_[static_cast<std::size_t>(i)] < 0) artificial_rows.push_back(i);
    if (!artificial_rows.empty()) {
      for (std::size_t k = 0; k < artificial_rows.size(); ++k) {
        for (int i = 0; i < rows_; ++i) {
          auto& row = t_[static_cast<std::size_t>(i)];
          row.insert(row.end() - 1, i == artificial_rows[k] ? 1.0 : 0.0);
        }
        basis_[static_cast<std::size_t>(artificial_rows[k])] = cols_;
        ++cols_;
      }
      std::vector<double> phase1(static_cast<std::size_t>(cols_), 0.0);
      for (int j = norig; j < cols_; ++j) phase1[static_cast<std::size_t>(j)] = 1.0;
      const Status s1 = run(phase1, cols_);
      if (s1 == Status::Unbounded) throw SolverError("simplex: phase 1 unbounded");
      if (objective_of(phase1) > 1e-8) return Status::Infeasible;
      // Drive artificials out; drop rows that turn out redundant.
      for (int i = rows_ - 1; i >= 0; --i) {
        if (basis_[static_cast<std::size_t>(i)] < norig) continue;
        int enter = -1;
        for (int j = 0; j < norig && enter < 0; ++j)
          if (std::abs(at(i, j)) > 1e-9) enter = j;
        if (enter >= 0) {
          pivot(i, enter);
        } else {
          t_.erase(t_.begin() + i);
          basis_.erase(basis_.begin() + i);
          --rows_;
        }
      }
      // Forget artificial columns.
      for (auto& row : t_) row.erase(row.end() - 1 - (cols_ - norig), row.end() - 1);
      cols_ = norig;
    }
    return run(c_, cols_);
  }

  double objective() const { return objective_of(c_); }

  double primal(int j) const {
    for (int i = 0; i < rows_; ++i)
      if (basis_[static_cast<std::size_t>(i)] == j) return rhs(i);
    return 0.0;
  }

  double reduced_cost(int j) const {
    double rc = c_[static_cast<std::size_t>(j)];
    for (int i = 0; i < rows_; ++i)
      rc -= c_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * at(i, j);
    return rc;
  }

 private:
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  double rhs(int i) const { return t_[static_cast<std::size_t>(i)].back(); }

  double objective_of(const std::vector<double>& c) const {
    double v = 0;
    for (int i = 0; i < rows_; ++i) {
      const int b = basis_[static_cast<std::size_t>(i)];
      if (b < static_cast<int>(c.size())) v += c[static_cast<std::size_t>(b)] * rhs(i);
    }
    return v;
  }

  void pivot(int pr, int pc) {
    auto& prow = t_[static_cast<std::size_t>(pr)];
    const double inv = 1.0 / prow[static_cast<std::size_t>(pc)];
    for (double& v : prow) v *= inv;
    prow[static_cast<std::size_t>(pc)] = 1.0;  // kill residual roundoff
    for (int i = 0; i < rows_; ++i) {
      if (i == pr) continue;
      auto& row = t_[static_cast<std::size_t>(i)];
      const double factor = row[static_cast<std::size_t>(pc)];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= factor * prow[j];
      row[static_cast<std::size_t>(pc)] = 0.0;
    }
    basis_[static_cast<std::size_t>(pr)] = pc;
  }

  Status run(const std::vector<double>& c, int ncols) {
    constexpr double kRcEps = 1e-10;
    constexpr double kPivEps = 1e-9;
    for (long iter = 0; iter < 200000; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncols && enter < 0; ++j) {
        bool basic = false;
        for (int i = 0; i < rows_ && !basic; ++i)
          basic = basis_[static_cast<std::size_t>(i)] == j;
        if (basic) continue;
        double rc = c[static_cast<std::size_t>(j)];
        for (int i = 0; i < rows_; ++i)
          rc -= c[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * at(i, j);
        if (rc < -kRcEps) enter = j;
      }
      if (enter < 0) return Status::Optimal;

      int leave = -1;
      double best = 0;
      for (int i = 0; i < rows_; ++i) {
        const double aij = at(i, enter);
        if (aij <= kPivEps) continue;
        const double ratio = rhs(i) / aij;
        if (leave < 0 || ratio < best - 1e-12 * (1.0 + std::abs(best)) ||
            (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
    }
    throw SolverError("simplex: iteration cap exceeded");
  }

  std::vector<std::vector<double>> t_;  // rows x (cols + rhs)
  std::vector<double> c_;
  std::vector<int> basis_;
  int rows_ = 0, cols_ = 0;
};

struct LpFeasible {
  std::vector<double> a;  // a >= 0 with G a >= h
};
struct LpInfeasible {
  std::vector<double> lambda;  // lambda >= 0, != 0, lambda'G <= 0, lambda'h > 0
};
using LpOutcome = std::variant<LpFeasible, LpInfeasible>;

// Decide the alternative for {a in R^k : a >= 0, G a >= h}. Exactly one
// branch returns; both are verified by substitution at 1e-9 before returning.
// Internally this solves the bounded polar program
//   max h'lambda  s.t.  G'lambda <= 0, 1'lambda <= 1, lambda >= 0,
// whose optimum is 0 iff the system is feasible; the feasible point is read
// off the dual multipliers, the Farkas vector off the primal. A simplex
// vertex carries at most k+1 positive lambda entries.
inline LpOutcome lp_feasible(const std::vector<std::vector<double>>& g,
                             const std::vector<double>& h) {
  const int m = static_cast<int>(g.size());
  if (m == 0 || h.size() != g.size()) throw SolverError("lp_feasible: bad dimensions");
  const int k = static_cast<int>(g[0].size());
  if (k == 0) throw SolverError("lp_feasible: no variables");
  double scale = 1.0;
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(g[static_cast<std::size_t>(i)].size()) != k)
      throw SolverError("lp_feasible: ragged matrix");
    for (double v : g[static_cast<std::size_t>(i)])
      if (!std::isfinite(v)) throw SolverError("lp_feasible: non-finite entry");
    if (!std::isfinite(h[static_cast<std::size_t>(i)]))
      throw SolverError("lp_feasible: non-finite rhs");
    scale = std::max(scale, std::abs(h[static_cast<std::size_t>(i)]));
  }

  const int n = m + k + 1;  // lambda, slack s_1..s_k, slack s_0
  std::vector<std::vector<double>> a(static_cast<std::size_t>(k + 1),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> b(static_cast<std::size_t>(k + 1), 0.0), c(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < m; ++i)
      a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    a[static_cast<std::size_t>(j)][static_cast<std::size_t>(m + j)] = 1.0;
  }
  for (int i = 0; i < m; ++i) {
    a[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = 1.0;
    c[static_cast<std::size_t>(i)] = -h[static_cast<std::size_t>(i)];
  }
  a[static_cast<std::size_t>(k)][static_cast<std::size_t>(m + k)] = 1.0;
  b[static_cast<std::size_t>(k)] = 1.0;

  SimplexTableau lp(std::move(a), std::move(b), std::move(c));
  std::vector<int> basis(static_cast<std::size_t>(k + 1));
  for (int j = 0; j <= k; ++j) basis[static_cast<std::size_t>(j)] = m + j;
  if (lp.solve(&basis) != SimplexTableau::Status::Optimal)
    throw SolverError("lp_feasible: polar program did not reach an optimum");

  const double farkas_value = -lp.objective();
  if (farkas_value > 1e-9 * scale) {
    std::vector<double> lambda(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double v = lp.primal(i);
      if (v < -1e-9) throw SolverError("lp_feasible: negative dual weight");
      lambda[static_cast<std::size_t>(i)] = std::max(v, 0.0);
    }
    double lh = 0;
    for (int i = 0; i < m; ++i) lh += lambda[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
    if (!(lh > 0)) throw SolverError("lp_feasible: certificate lost positivity");
    for (int j = 0; j < k; ++j) {
      double s = 0, mag = 0;
      for (int i = 0; i < m; ++i) {
        const double term = lambda[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        s += term;
        mag += std::abs(term);
      }
      if (s > 1e-9 * (1.0 + mag))
        throw SolverError("lp_feasible: certificate violates lambda'G <= 0");
    }
    return LpInfeasible{std::move(lambda)};
  }

  std::vector<double> sol(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    const double rc = lp.reduced_cost(m + j);
    if (rc < -1e-8) throw SolverError("lp_feasible: negative primal coefficient");
    sol[static_cast<std::size_t>(j)] = std::max(rc, 0.0);
  }
  for (int i = 0; i < m; ++i) {
    double lhs = 0, mag = 0;
    for (int j = 0; j < k; ++j) {
      const double term = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * sol[static_cast<std::size_t>(j)];
      lhs += term;
      mag += std::abs(term);
    }
    const double hi = h[static_cast<std::size_t>(i)];
    if (lhs < hi - 1e-9 * (1.0 + std::abs(hi) + mag))
      throw SolverError("lp_feasible: recovered point violates a constraint");
  }
  return LpFeasible{std::move(sol)};
}

struct MarginSolution {
  std::vector<double> a;
  double margin = 0;
};

// max margin s.t. G a - margin*1 >= h, a >= 0 (margin free). Centers the
// coefficients inside the sampled feasible set; needs some row with only
// nonpositive a-coefficients to be bounded. Returns nullopt when unbounded.
inline std::optional<MarginSolution> lp_max_margin(const std::vector<std::vector<double>>& g,
                                                   const std::vector<double>& h) {
  const int m = static_cast<int>(g.size());
  const int k = static_cast<int>(g[0].size());
  // columns: a_1..a_k, m+, m-, w_1..w_m
  const int n = k + 2 + m;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> b(static_cast<std::size_t>(m), 0.0), c(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    const double sign = h[static_cast<std::size_t>(i)] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < k; ++j)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          sign * g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = -sign;
    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k + 1)] = sign;
    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k + 2 + i)] = -sign;
    b[static_cast<std::size_t>(i)] = sign * h[static_cast<std::size_t>(i)];
  }
  c[static_cast<std::size_t>(k)] = -1.0;  // min -(m+) + (m-)
  c[static_cast<std::size_t>(k + 1)] = 1.0;

  SimplexTableau lp(std::move(a), std::move(b), std::move(c));
  const auto status = lp.solve();
  if (status == SimplexTableau::Status::Infeasible)
    throw SolverError("lp_max_margin: margin system infeasible");
  if (status == SimplexTableau::Status::Unbounded) return std::nullopt;
  MarginSolution out;
  out.a.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out.a[static_cast<std::size_t>(j)] = std::max(lp.primal(j), 0.0);
  out.margin = lp.primal(k) - lp.primal(k + 1);
  return out;
}

}  // namespace qamineq
