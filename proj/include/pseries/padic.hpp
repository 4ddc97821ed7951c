#pragma once

// Fixed-precision arithmetic in Z/p^N and canonical forms for row modules over
// it. Every lattice computation in the library bottoms out here.
//
// A matrix over Z/p^N is read as a set of generators (its rows) for a
// submodule of (Z/p^N)^n, equivalently a Z_p-lattice containing p^N Z_p^n.
// Reductions keep that correspondence exact: whenever a pivot p^a is placed,
// p^(N-a) times the pivot row (which vanishes in the pivot column) is fed back
// into the pool, so the rows left over always generate the full submodule of
// elements that vanish on the processed columns.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pseries/error.hpp"

namespace pseries {

using Integer = mpz_class;
using Vector = std::vector<Integer>;
using Grid = std::vector<Vector>;

class PadicContext;
using Context = std::shared_ptr<const PadicContext>;

/// The ring Z/p^N together with its cached powers of p.
class PadicContext {
 public:
  static Context make(unsigned long p, int precision) {
    if (p < 2 || !is_prime(p)) throw InvalidInput("p = " + std::to_string(p) + " is not a prime");
    if (precision < 1) throw InvalidInput("precision must be positive");
    return std::shared_ptr<const PadicContext>(new PadicContext(p, precision));
  }

  unsigned long prime() const noexcept { return p_; }
  int precision() const noexcept { return n_; }
  const Integer& modulus() const noexcept { return powers_.back(); }
  /// p^k for 0 <= k <= N.
  const Integer& power(int k) const { return powers_.at(static_cast<std::size_t>(k)); }

  bool same_ring(const PadicContext& other) const noexcept {
    return p_ == other.p_ && n_ == other.n_;
  }

  void reduce(Integer& x) const { mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), modulus().get_mpz_t()); }

  Integer reduced(Integer x) const {
    reduce(x);
    return x;
  }

  /// Valuation of a residue in [0, p^N); the zero residue has valuation N.
  int valuation(const Integer& r) const {
    if (sgn(r) == 0) return n_;
    if (p_ == 2) return static_cast<int>(std::min<mp_bitcnt_t>(mpz_scan1(r.get_mpz_t(), 0), n_));
    int v = 0;
    while (v < n_ && mpz_divisible_p(r.get_mpz_t(), powers_[v + 1].get_mpz_t())) ++v;
    return v;
  }

  /// Inverse of a unit residue modulo p^N.
  Integer unit_inverse(const Integer& u) const {
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), u.get_mpz_t(), modulus().get_mpz_t()) == 0)
      throw InvalidInput("residue is not a unit");
    return inv;
  }

  /// Splits a nonzero residue r = p^v * u with u a unit, returning (v, u^{-1}).
  std::pair<int, Integer> split_unit(const Integer& r) const {
    const int v = valuation(r);
    Integer unit = r / power(v);
    return {v, unit_inverse(unit)};
  }

  static bool is_prime(unsigned long n) {
    if (n < 2) return false;
    for (unsigned long q = 2; q * q <= n; ++q)
      if (n % q == 0) return false;
    return true;
  }

 private:
  PadicContext(unsigned long p, int n) : p_(p), n_(n) {
    powers_.reserve(static_cast<std::size_t>(n) + 1);
    Integer acc = 1;
    for (int k = 0; k <= n; ++k) {
      powers_.push_back(acc);
      acc *= p;
    }
  }

  unsigned long p_;
  int n_;
  std::vector<Integer> powers_;
};

inline void require_same_ring(const PadicContext& a, const PadicContext& b) {
  if (!a.same_ring(b))
    throw IncompatibleContext("(p, N) = (" + std::to_string(a.prime()) + ", " +
                              std::to_string(a.precision()) + ") vs (" +
                              std::to_string(b.prime()) + ", " + std::to_string(b.precision()) + ")");
}

/// An element of Z_p known modulo p^N.
class PadicScalar {
 public:
  PadicScalar(Context ctx, Integer value) : ctx_(std::move(ctx)), r_(std::move(value)) { ctx_->reduce(r_); }
  PadicScalar(Context ctx, long value) : PadicScalar(std::move(ctx), Integer(value)) {}

  const Context& context() const noexcept { return ctx_; }
  unsigned long prime() const noexcept { return ctx_->prime(); }
  int precision() const noexcept { return ctx_->precision(); }
  const Integer& residue() const noexcept { return r_; }
  int valuation() const { return ctx_->valuation(r_); }
  bool is_zero() const { return sgn(r_) == 0; }
  bool is_unit() const { return valuation() == 0; }

  PadicScalar inverse() const { return {ctx_, ctx_->unit_inverse(r_)}; }

  friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) {
    require_same_ring(*a.ctx_, *b.ctx_);
    return {a.ctx_, Integer(a.r_ + b.r_)};
  }
  friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) {
    require_same_ring(*a.ctx_, *b.ctx_);
    return {a.ctx_, Integer(a.r_ - b.r_)};
  }
  friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b) {
    require_same_ring(*a.ctx_, *b.ctx_);
    return {a.ctx_, Integer(a.r_ * b.r_)};
  }
  PadicScalar operator-() const { return {ctx_, Integer(-r_)}; }
  friend bool operator==(const PadicScalar& a, const PadicScalar& b) {
    require_same_ring(*a.ctx_, *b.ctx_);
    return a.r_ == b.r_;
  }

 private:
  Context ctx_;
  Integer r_;
};

/// Largest k <= N with p^k dividing the residue (N for zero).
inline int valuation(const PadicScalar& x) { return x.valuation(); }

/// Dense row-major matrix over Z/p^N.
class PadicMatrix {
 public:
  PadicMatrix(Context ctx, std::size_t rows, std::size_t cols)
      : ctx_(std::move(ctx)), rows_(rows), cols_(cols), data_(rows * cols) {}

  PadicMatrix(Context ctx, const Grid& grid) : ctx_(std::move(ctx)) {
    rows_ = grid.size();
    cols_ = rows_ ? grid.front().size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : grid) {
      if (row.size() != cols_) throw DimensionMismatch("ragged matrix rows");
      for (const auto& x : row) data_.push_back(ctx_->reduced(x));
    }
  }

  static PadicMatrix identity(Context ctx, std::size_t d) {
    PadicMatrix m(std::move(ctx), d, d);
    for (std::size_t i = 0; i < d; ++i) m.data_[i * d + i] = 1;
    return m;
  }

  static PadicMatrix from_ints(Context ctx, const std::vector<std::vector<long>>& grid) {
    Grid g;
    for (const auto& row : grid) g.emplace_back(row.begin(), row.end());
    return {std::move(ctx), g};
  }

  const Context& context() const noexcept { return ctx_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  PadicScalar scalar(std::size_t i, std::size_t j) const { return {ctx_, (*this)(i, j)}; }
  void set(std::size_t i, std::size_t j, Integer value) {
    ctx_->reduce(value);
    data_[i * cols_ + j] = std::move(value);
  }

  Vector row(std::size_t i) const {
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  Grid grid() const {
    Grid g;
    for (std::size_t i = 0; i < rows_; ++i) g.push_back(row(i));
    return g;
  }

  PadicMatrix transpose() const {
    PadicMatrix t(ctx_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.data_[j * rows_ + i] = (*this)(i, j);
    return t;
  }

  friend PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b) {
    require_same_ring(*a.ctx_, *b.ctx_);
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product");
    PadicMatrix c(a.ctx_, a.rows_, b.cols_);
    Integer acc;
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) {
        acc = 0;
        for (std::size_t k = 0; k < a.cols_; ++k) acc += a(i, k) * b(k, j);
        a.ctx_->reduce(acc);
        c.data_[i * c.cols_ + j] = acc;
      }
    return c;
  }

  friend PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b) { return a.combine(b, 1); }
  friend PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b) { return a.combine(b, -1); }

  friend bool operator==(const PadicMatrix& a, const PadicMatrix& b) {
    return a.ctx_->same_ring(*b.ctx_) && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  /// Determinant modulo p^N (square matrices only).
  PadicScalar determinant() const;

  /// Same entries reinterpreted modulo a smaller power of the same prime.
  PadicMatrix truncated(const Context& coarser) const {
    if (coarser->prime() != ctx_->prime() || coarser->precision() > ctx_->precision())
      throw IncompatibleContext("truncation must keep p and lower N");
    return PadicMatrix(coarser, grid());
  }

 private:
  PadicMatrix combine(const PadicMatrix& b, int sign) const {
    require_same_ring(*ctx_, *b.ctx_);
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionMismatch("matrix sum");
    PadicMatrix c(ctx_, rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) {
      c.data_[k] = sign > 0 ? Integer(data_[k] + b.data_[k]) : Integer(data_[k] - b.data_[k]);
      ctx_->reduce(c.data_[k]);
    }
    return c;
  }

  Context ctx_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

namespace detail {

inline void axpy(const PadicContext& ctx, Vector& y, const Integer& a, const Vector& x) {
  // y -= a * x
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (sgn(x[k]) == 0) continue;
    mpz_submul(y[k].get_mpz_t(), a.get_mpz_t(), x[k].get_mpz_t());
    ctx.reduce(y[k]);
  }
}

inline void scale(const PadicContext& ctx, Vector& y, const Integer& a) {
  for (auto& x : y) {
    x *= a;
    ctx.reduce(x);
  }
}

inline bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return sgn(x) == 0; });
}

struct PoolRow {
  Vector v;
  Vector t;  // coefficients w.r.t. the input rows; empty when not tracked
};

struct EchelonResult {
  /// One entry per processed column: the pivot row, or nullopt when the column
  /// carries no pivot (every element of the module vanishes there).
  std::vector<std::optional<PoolRow>> pivots;
  /// Exponent a of the pivot p^a per processed column (N when absent).
  std::vector<int> exponents;
  /// Generators of the submodule of elements vanishing on all processed columns.
  std::vector<PoolRow> rest;
};

/// Column-by-column echelon reduction of the module generated by `rows`.
/// Pivot choice: minimal valuation in the column, ties to the lowest pool
/// index (input rows precede closure rows). Pivots are normalised to exact
/// p-powers and entries above each pivot are reduced modulo it, which makes
/// the pivot rows a canonical basis.
inline EchelonResult echelon(const PadicContext& ctx, const Grid& rows, std::size_t ncols, bool track) {
  const int n = ctx.precision();
  std::vector<PoolRow> pool;
  pool.reserve(rows.size() + ncols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    PoolRow r{rows[i], {}};
    for (auto& x : r.v) ctx.reduce(x);
    if (track) {
      r.t.assign(rows.size(), Integer(0));
      r.t[i] = 1;
    }
    pool.push_back(std::move(r));
  }

  EchelonResult out;
  out.pivots.resize(ncols);
  out.exponents.assign(ncols, n);
  Integer q;
  for (std::size_t c = 0; c < ncols; ++c) {
    std::size_t best = pool.size();
    int best_v = n;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (sgn(pool[i].v[c]) == 0) continue;
      const int v = ctx.valuation(pool[i].v[c]);
      if (v < best_v) {
        best_v = v;
        best = i;
        if (v == 0) break;
      }
    }
    if (best == pool.size()) continue;

    PoolRow piv = std::move(pool[best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    const auto [a, uinv] = ctx.split_unit(piv.v[c]);
    if (uinv != 1) {
      scale(ctx, piv.v, uinv);
      if (track) scale(ctx, piv.t, uinv);
    }
    for (auto& r : pool) {
      if (sgn(r.v[c]) == 0) continue;
      q = r.v[c] / ctx.power(a);  // exact: valuation of r.v[c] >= a
      axpy(ctx, r.v, q, piv.v);
      if (track) axpy(ctx, r.t, q, piv.t);
    }
    pool.erase(std::remove_if(pool.begin(), pool.end(), [](const PoolRow& r) { return is_zero(r.v); }),
               pool.end());
    if (a > 0) {
      PoolRow closure = piv;
      scale(ctx, closure.v, ctx.power(n - a));
      if (track) scale(ctx, closure.t, ctx.power(n - a));
      if (!is_zero(closure.v)) pool.push_back(std::move(closure));
    }
    out.exponents[c] = a;
    out.pivots[c] = std::move(piv);
  }

  // Reduce entries above each pivot into [0, p^a).
  for (std::size_t c = 0; c < ncols; ++c) {
    if (!out.pivots[c]) continue;
    const auto& piv = *out.pivots[c];
    const Integer& pa = ctx.power(out.exponents[c]);
    for (std::size_t r = 0; r < c; ++r) {
      if (!out.pivots[r]) continue;
      auto& row = *out.pivots[r];
      if (row.v[c] < pa) continue;
      mpz_fdiv_q(q.get_mpz_t(), row.v[c].get_mpz_t(), pa.get_mpz_t());
      axpy(ctx, row.v, q, piv.v);
      if (track) axpy(ctx, row.t, q, piv.t);
    }
  }
  out.rest = std::move(pool);
  return out;
}

/// Canonical basis of the lattice spanned by `rows` (plus p^N Z_p^d): an upper
/// triangular d x d grid with p-power diagonal. Throws when some column has
/// no pivot below p^N.
inline Grid canonical_basis(const PadicContext& ctx, const Grid& rows, std::size_t d) {
  auto ech = echelon(ctx, rows, d, false);
  Grid basis;
  basis.reserve(d);
  for (std::size_t c = 0; c < d; ++c) {
    if (!ech.pivots[c])
      throw PrecisionExhausted("no pivot below p^" + std::to_string(ctx.precision()) + " in column " +
                               std::to_string(c));
    basis.push_back(std::move(ech.pivots[c]->v));
  }
  return basis;
}

}  // namespace detail

inline PadicScalar PadicMatrix::determinant() const {
  if (rows_ != cols_) throw DimensionMismatch("determinant of a non-square matrix");
  Grid a = grid();
  const auto& ctx = *ctx_;
  Integer det = 1;
  Integer q;
  for (std::size_t c = 0; c < cols_; ++c) {
    std::size_t best = rows_;
    int best_v = ctx.precision();
    for (std::size_t i = c; i < rows_; ++i) {
      if (sgn(a[i][c]) == 0) continue;
      const int v = ctx.valuation(a[i][c]);
      if (v < best_v) best_v = v, best = i;
    }
    if (best == rows_) return {ctx_, 0L};
    if (best != c) {
      std::swap(a[best], a[c]);
      det = -det;
    }
    const auto [v, uinv] = ctx.split_unit(a[c][c]);
    for (std::size_t i = c + 1; i < rows_; ++i) {
      if (sgn(a[i][c]) == 0) continue;
      q = (a[i][c] / ctx.power(v)) * uinv;
      ctx.reduce(q);
      detail::axpy(ctx, a[i], q, a[c]);
    }
    det *= a[c][c];
    ctx.reduce(det);
  }
  return {ctx_, det};
}

struct HermiteForm {
  PadicMatrix H;  // n x n canonical upper triangular basis
  PadicMatrix U;  // n x m transform, H = U * M
};

/// Canonical triangular basis of the row module of M (m x n, m >= n).
/// Pivot per column: minimal valuation, ties to the lowest row index.
/// U is invertible whenever M is square with det valuation below N.
inline HermiteForm hermite_form(const PadicMatrix& m) {
  const auto& ctx = *m.context();
  auto ech = detail::echelon(ctx, m.grid(), m.cols(), true);
  PadicMatrix h(m.context(), m.cols(), m.cols());
  PadicMatrix u(m.context(), m.cols(), m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (!ech.pivots[c])
      throw PrecisionExhausted("hermite_form: column " + std::to_string(c) + " has no pivot of valuation < " +
                               std::to_string(ctx.precision()));
    for (std::size_t j = 0; j < m.cols(); ++j) h.set(c, j, ech.pivots[c]->v[j]);
    for (std::size_t j = 0; j < m.rows(); ++j) u.set(c, j, ech.pivots[c]->t[j]);
  }
  return {std::move(h), std::move(u)};
}

struct SmithForm {
  std::vector<int> exponents;  // ascending; N marks a zero diagonal entry
  PadicMatrix U;               // m x m
  PadicMatrix V;               // n x n, U * M * V = diag(p^exponents)
  PadicMatrix V_inverse;       // rows give a basis adapted to the row module
};

/// Smith decomposition over Z/p^N. The pivot at each stage is an entry of
/// minimal valuation in the trailing submatrix (first by row, then column).
inline SmithForm smith_form(const PadicMatrix& m) {
  const auto& ctx = *m.context();
  const std::size_t rows = m.rows(), cols = m.cols();
  Grid a = m.grid();
  Grid u = PadicMatrix::identity(m.context(), rows).grid();
  Grid v = PadicMatrix::identity(m.context(), cols).grid();  // stored transposed: v[j] is column j of V
  Grid vinv = PadicMatrix::identity(m.context(), cols).grid();
  std::vector<int> exps;
  Integer q;
  const std::size_t steps = std::min(rows, cols);
  for (std::size_t k = 0; k < steps; ++k) {
    std::size_t bi = rows, bj = cols;
    int best_v = ctx.precision();
    for (std::size_t i = k; i < rows && best_v > 0; ++i)
      for (std::size_t j = k; j < cols; ++j) {
        if (sgn(a[i][j]) == 0) continue;
        const int val = ctx.valuation(a[i][j]);
        if (val < best_v) {
          best_v = val, bi = i, bj = j;
          if (val == 0) break;
        }
      }
    if (bi == rows) {
      for (; k < steps; ++k) exps.push_back(ctx.precision());
      break;
    }
    if (bi != k) {
      std::swap(a[bi], a[k]);
      std::swap(u[bi], u[k]);
    }
    if (bj != k) {
      for (auto& row : a) std::swap(row[bj], row[k]);
      std::swap(v[bj], v[k]);
      std::swap(vinv[bj], vinv[k]);
    }
    const auto [e, uinv] = ctx.split_unit(a[k][k]);
    if (uinv != 1) {
      detail::scale(ctx, a[k], uinv);
      detail::scale(ctx, u[k], uinv);
    }
    const Integer& pe = ctx.power(e);
    for (std::size_t i = k + 1; i < rows; ++i) {
      if (sgn(a[i][k]) == 0) continue;
      q = a[i][k] / pe;
      detail::axpy(ctx, a[i], q, a[k]);
      detail::axpy(ctx, u[i], q, u[k]);
    }
    for (std::size_t j = k + 1; j < cols; ++j) {
      if (sgn(a[k][j]) == 0) continue;
      q = a[k][j] / pe;
      // column j -= q * column k; only row k is nonzero in column k now
      a[k][j] = 0;
      detail::axpy(ctx, v[j], q, v[k]);
      // inverse: row k of V^{-1} += q * row j
      Integer neg = -q;
      detail::axpy(ctx, vinv[k], neg, vinv[j]);
    }
    exps.push_back(e);
  }
  PadicMatrix vt(m.context(), v);
  return {std::move(exps), PadicMatrix(m.context(), u), vt.transpose(), PadicMatrix(m.context(), vinv)};
}

/// Exponents of the elementary divisors of coker(M) for square M of full rank.
inline std::vector<int> smith_profile(const PadicMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("smith_profile expects a square matrix");
  auto s = smith_form(m);
  for (int e : s.exponents)
    if (e >= m.context()->precision())
      throw PrecisionExhausted("smith_profile: rank not certifiable at precision " +
                               std::to_string(m.context()->precision()));
  return s.exponents;
}

/// Inverse of a matrix that is invertible modulo p.
inline PadicMatrix unimodular_inverse(const PadicMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("inverse of a non-square matrix");
  auto hf = hermite_form(m);
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (hf.H(i, i) != 1) throw InvalidInput("matrix is not invertible modulo p");
  return hf.U;
}

}  // namespace pseries
