#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace votespan {

struct RankReport {
  int rank = 0;
  double tolerance = kDefaultTol;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Removes the components of v lying in the span of an orthonormal basis.
/// Two Gram-Schmidt passes; one pass loses orthogonality once the residual
/// is small relative to v.
inline void subtract_projection(std::vector<double>& v,
                                const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = dot(v, q);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
}

inline void check_rectangular_finite(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return;
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != cols) throw ShapeError("matrix is ragged");
    if (!all_finite(row)) throw ShapeError("matrix contains non-finite entry");
  }
}

}  // namespace detail

/// Numerical rank: column-pivoted Gram-Schmidt elimination; counts pivots
/// (remaining column norms) larger than the absolute tolerance.
inline RankReport rank_with_tolerance(const std::vector<std::vector<double>>& rows,
                                      double tol = kDefaultTol) {
  if (!(tol > 0.0)) throw DomainError("rank_with_tolerance: tolerance must be positive");
  detail::check_rectangular_finite(rows);
  if (rows.empty() || rows.front().empty()) return RankReport{0, tol};

  const std::size_t r = rows.size();
  const std::size_t c = rows.front().size();
  std::vector<std::vector<double>> cols(c, std::vector<double>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) cols[j][i] = rows[i][j];

  std::vector<bool> used(c, false);
  int rank = 0;
  const std::size_t max_rank = std::min(r, c);
  while (rank < static_cast<int>(max_rank)) {
    std::size_t pivot = c;
    double best = tol;
    for (std::size_t j = 0; j < c; ++j) {
      if (used[j]) continue;
      const double nrm = detail::norm2(cols[j]);
      if (nrm > best) {
        best = nrm;
        pivot = j;
      }
    }
    if (pivot == c) break;  // every remaining column is within tol of the span
    used[pivot] = true;
    ++rank;
    auto& q = cols[pivot];
    for (auto& x : q) x /= best;
    for (std::size_t j = 0; j < c; ++j) {
      if (used[j]) continue;
      const double coeff = detail::dot(cols[j], q);
      for (std::size_t i = 0; i < r; ++i) cols[j][i] -= coeff * q[i];
    }
  }
  return RankReport{rank, tol};
}

/// Orthonormal-basis accumulator for row-at-a-time rank tracking. add_row
/// reports whether the new row grew the span, i.e. whether its component
/// orthogonal to the current basis has norm above the tolerance.
class IncrementalRankTracker {
 public:
  explicit IncrementalRankTracker(std::size_t dim, double tol = kDefaultTol)
      : dim_(dim), tol_(tol) {
    if (!(tol > 0.0)) throw DomainError("IncrementalRankTracker: tolerance must be positive");
  }

  bool add_row(std::span<const double> row) {
    if (row.size() != dim_)
      throw ShapeError("add_row: row length " + std::to_string(row.size()) +
                       " does not match dimension " + std::to_string(dim_));
    if (!detail::all_finite(row)) throw ShapeError("add_row: non-finite entry");
    std::vector<double> residual(row.begin(), row.end());
    detail::subtract_projection(residual, basis_);
    const double nrm = detail::norm2(residual);
    if (nrm <= tol_) return false;
    for (auto& x : residual) x /= nrm;
    basis_.push_back(std::move(residual));
    return true;
  }

  int rank() const { return static_cast<int>(basis_.size()); }
  std::size_t dim() const { return dim_; }
  double tolerance() const { return tol_; }
  const std::vector<std::vector<double>>& basis() const { return basis_; }

 private:
  std::size_t dim_;
  double tol_;
  std::vector<std::vector<double>> basis_;
};

namespace detail {

struct LuFactors {
  std::vector<std::vector<double>> lu;
  std::vector<int> perm;
  bool ok = false;
};

inline LuFactors lu_factor(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  LuFactors f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = static_cast<int>(i);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a[k][k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > best) {
        best = std::abs(a[i][k]);
        piv = i;
      }
    }
    if (best == 0.0) return f;  // singular to working precision
    if (piv != k) {
      std::swap(a[piv], a[k]);
      std::swap(f.perm[piv], f.perm[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a[i][k] /= a[k][k];
      const double mult = a[i][k];
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= mult * a[k][j];
    }
  }
  f.lu = std::move(a);
  f.ok = true;
  return f;
}

inline std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b) {
  const std::size_t n = f.lu.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[static_cast<std::size_t>(f.perm[i])];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu[i][j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu[ii][j] * x[j];
    x[ii] = s / f.lu[ii][ii];
  }
  return x;
}

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& a,
                                   std::span<const double> x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
  return y;
}

/// LU solve plus two steps of iterative refinement; tightens the residual on
/// ill-conditioned systems at negligible cost for the small sizes used here.
inline std::vector<double> solve_square_refined(const std::vector<std::vector<double>>& a,
                                                std::span<const double> b, bool& ok) {
  const LuFactors f = lu_factor(a);
  if (!f.ok) {
    ok = false;
    return {};
  }
  std::vector<double> x = lu_solve(f, b);
  for (int iter = 0; iter < 2; ++iter) {
    std::vector<double> r(b.begin(), b.end());
    const std::vector<double> ax = mat_vec(a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
    const std::vector<double> dx = lu_solve(f, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }
  ok = all_finite(x);
  return x;
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. a is overwritten
/// with the diagonalized matrix; v holds eigenvectors as columns.
inline void jacobi_eigen_sym(std::vector<std::vector<double>>& a,
                             std::vector<std::vector<double>>& v) {
  const std::size_t n = a.size();
  v.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  if (n < 2) return;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
  if (scale == 0.0) return;
  const double stop = 1e-15 * scale;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a[p][q]));
    if (off <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (std::abs(apq) <= stop) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

inline std::vector<double> cholesky_solve(std::vector<std::vector<double>> g,
                                          std::span<const double> b, bool& ok) {
  const std::size_t n = g.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = g[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= g[j][k] * g[j][k];
    if (!(d > 0.0)) {
      ok = false;
      return {};
    }
    g[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = g[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= g[i][k] * g[j][k];
      g[i][j] = s / g[j][j];
    }
  }
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= g[i][k] * x[k];
    x[i] /= g[i][i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= g[k][ii] * x[k];
    x[ii] /= g[ii][ii];
  }
  ok = true;
  return x;
}

/// Minimum-norm solution of the normal equations G w = g with G symmetric
/// positive semidefinite: eigenvalues below a relative cutoff are treated as
/// exact zeros, which selects the minimizer of smallest Euclidean norm.
inline std::vector<double> min_norm_psd_solve(const std::vector<std::vector<double>>& g_mat,
                                              std::span<const double> rhs) {
  std::vector<std::vector<double>> a = g_mat;
  std::vector<std::vector<double>> v;
  jacobi_eigen_sym(a, v);
  const std::size_t n = g_mat.size();
  double max_eig = 0.0;
  for (std::size_t d = 0; d < n; ++d) max_eig = std::max(max_eig, a[d][d]);
  const double cutoff = max_eig * 1e-12;
  std::vector<double> w(n, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    const double lambda = a[d][d];
    if (lambda <= cutoff) continue;
    double coeff = 0.0;
    for (std::size_t i = 0; i < n; ++i) coeff += v[i][d] * rhs[i];
    coeff /= lambda;
    for (std::size_t i = 0; i < n; ++i) w[i] += coeff * v[i][d];
  }
  return w;
}

}  // namespace detail

/// Solves the normal equations G w = g (G = A^T A, g = A^T b). With ridge > 0
/// the system is shifted to G + ridge*I (always definite); with ridge == 0 the
/// minimum-norm least-squares solution is returned.
inline std::vector<double> solve_normal_equations(std::vector<std::vector<double>> gram,
                                                  std::span<const double> rhs, double ridge) {
  if (ridge < 0) throw DomainError("solve_normal_equations: ridge must be nonnegative");
  const std::size_t n = gram.size();
  if (n == 0) throw ShapeError("solve_normal_equations: empty system");
  if (ridge > 0) {
    for (std::size_t i = 0; i < n; ++i) gram[i][i] += ridge;
    bool ok = false;
    std::vector<double> w = detail::cholesky_solve(gram, rhs, ok);
    if (ok) return w;
    // fall through on numerical breakdown
  }
  return detail::min_norm_psd_solve(gram, rhs);
}

/// Weights making the combined vote hit the ideal vector when the rows span
/// all m dimensions (the first m rank-increasing rows get the exact solution,
/// the rest weight 0). Otherwise the least-squares minimizer of
/// |sum_i W_i S_i - o|^2 + ridge*|W|^2, minimum-norm at ridge == 0.
inline WeightVector solve_ideal_weights(const VoteMatrix& votes, const IdealVector& target,
                                        double ridge = 0.0, double tol = kDefaultTol) {
  const std::size_t m = static_cast<std::size_t>(target.num_classes);
  validate_vote_matrix(votes, m);
  if (ridge < 0) throw DomainError("solve_ideal_weights: ridge must be nonnegative");
  const std::size_t n = votes.rows.size();

  IncrementalRankTracker tracker(m, tol);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < n && picked.size() < m; ++i) {
    if (tracker.add_row(votes.rows[i].scores)) picked.push_back(i);
  }

  if (picked.size() == m) {
    // square system: column i is the i-th picked vote
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a[j][i] = votes.rows[picked[i]].scores[j];
    const std::vector<double> b = target.to_dense();
    bool ok = false;
    const std::vector<double> w_sub = detail::solve_square_refined(a, b, ok);
    if (ok) {
      const std::vector<double> combined = detail::mat_vec(a, w_sub);
      double err = 0.0;
      for (std::size_t j = 0; j < m; ++j) err += (combined[j] - b[j]) * (combined[j] - b[j]);
      if (std::sqrt(err) <= 1e-6) {
        WeightVector w;
        w.weights.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) w.weights[picked[i]] = w_sub[i];
        return w;
      }
    }
    // numerically too close to singular for the exact route; use least squares
  }

  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = votes.rows[i].scores[static_cast<std::size_t>(target.class_index)];
    for (std::size_t k = i; k < n; ++k) {
      const double gik = detail::dot(votes.rows[i].scores, votes.rows[k].scores);
      gram[i][k] = gik;
      gram[k][i] = gik;
    }
  }
  return WeightVector{solve_normal_equations(std::move(gram), rhs, ridge)};
}

/// Combined ensemble vote sum_i W_i S_i for one instance.
inline std::vector<double> combine_votes(const WeightVector& weights, const VoteMatrix& votes) {
  if (weights.size() != votes.num_classifiers())
    throw ShapeError("combine_votes: weight count does not match classifier count");
  const std::size_t m = votes.num_classes();
  validate_vote_matrix(votes, m);
  std::vector<double> v(m, 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double wi = weights[i];
    for (std::size_t j = 0; j < m; ++j) v[j] += wi * votes.rows[i].scores[j];
  }
  return v;
}

}  // namespace votespan
