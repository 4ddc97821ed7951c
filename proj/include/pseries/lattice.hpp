#pragma once

// Open sublattices of Z_p^d, always stored in canonical Hermite form with
// respect to the ambient standard basis.

#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pseries/padic.hpp"

namespace pseries {

struct Levels {
  int u = 0;    // largest k with M inside p^k L
  int ell = 0;  // smallest k with p^k L inside M
};

class Lattice {
 public:
  /// Lattice generated by `rows` (any number, each of length d).
  static Lattice from_generators(Context ctx, std::size_t d, const Grid& rows) {
    for (const auto& r : rows)
      if (r.size() != d) throw DimensionMismatch("generator length differs from ambient dimension");
    return Lattice(ctx, d, detail::canonical_basis(*ctx, rows, d));
  }

  static Lattice from_matrix(const PadicMatrix& m) { return from_generators(m.context(), m.cols(), m.grid()); }

  static Lattice ambient(Context ctx, std::size_t d) {
    return Lattice(ctx, d, PadicMatrix::identity(ctx, d).grid());
  }

  const Context& context() const noexcept { return ctx_; }
  std::size_t dim() const noexcept { return d_; }
  unsigned long prime() const noexcept { return ctx_->prime(); }
  int precision() const noexcept { return ctx_->precision(); }
  const Grid& basis() const noexcept { return basis_; }
  PadicMatrix basis_matrix() const { return {ctx_, basis_}; }
  /// Exponents a_k of the Hermite diagonal entries p^{a_k}.
  const std::vector<int>& diagonal() const noexcept { return diag_; }
  /// Elementary divisor exponents of Z_p^d / self, ascending.
  const std::vector<int>& ambient_profile() const noexcept { return profile_; }
  /// log_p |Z_p^d : self|.
  int ambient_log_index() const { return std::accumulate(diag_.begin(), diag_.end(), 0); }
  /// Lower level relative to the ambient lattice.
  int lower_level() const { return profile_.empty() ? 0 : profile_.back(); }
  bool is_ambient() const { return ambient_log_index() == 0; }

  /// Coordinates x with x * basis = y (mod p^N), or nullopt when y is not in
  /// the lattice. The coordinates are determined modulo p^(N - lower_level).
  std::optional<Vector> coordinates(Vector y) const {
    if (y.size() != d_) throw DimensionMismatch("vector length differs from ambient dimension");
    const auto& ctx = *ctx_;
    Vector x(d_);
    for (auto& e : y) ctx.reduce(e);
    for (std::size_t c = 0; c < d_; ++c) {
      if (sgn(y[c]) == 0) continue;
      if (ctx.valuation(y[c]) < diag_[c]) return std::nullopt;
      x[c] = y[c] / ctx.power(diag_[c]);
      detail::axpy(ctx, y, x[c], basis_[c]);
    }
    return x;
  }

  bool contains(const Vector& y) const { return coordinates(y).has_value(); }

  bool contains(const Lattice& other) const {
    require_compatible(other);
    for (const auto& b : other.basis_)
      if (!contains(b)) return false;
    return true;
  }

  /// p^k * self.
  Lattice scaled(int k) const {
    Grid rows = basis_;
    for (auto& r : rows) detail::scale(*ctx_, r, ctx_->power(k));
    return from_generators(ctx_, d_, rows);
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.ctx_->same_ring(*b.ctx_) && a.d_ == b.d_ && a.basis_ == b.basis_;
  }

  void require_compatible(const Lattice& other) const {
    require_same_ring(*ctx_, *other.ctx_);
    if (d_ != other.d_) throw DimensionMismatch("lattices live in different ambient dimensions");
  }

 private:
  Lattice(Context ctx, std::size_t d, Grid basis) : ctx_(std::move(ctx)), d_(d), basis_(std::move(basis)) {
    diag_.reserve(d_);
    for (std::size_t c = 0; c < d_; ++c) diag_.push_back(ctx_->valuation(basis_[c][c]));
    profile_ = smith_form(basis_matrix()).exponents;
    // One digit of slack below p^N: anything deeper may already be truncated.
    if (lower_level() > ctx_->precision() - 2)
      throw PrecisionExhausted("lattice lower level " + std::to_string(lower_level()) +
                               " needs precision above " + std::to_string(ctx_->precision()));
  }

  Context ctx_;
  std::size_t d_;
  Grid basis_;
  std::vector<int> diag_;
  std::vector<int> profile_;
};

/// Smallest lattice containing both.
inline Lattice sum(const Lattice& a, const Lattice& b) {
  a.require_compatible(b);
  Grid rows = a.basis();
  rows.insert(rows.end(), b.basis().begin(), b.basis().end());
  return Lattice::from_generators(a.context(), a.dim(), rows);
}

/// Lattice generated by `a` together with extra vectors.
inline Lattice adjoin(const Lattice& a, const Grid& vectors) {
  Grid rows = a.basis();
  rows.insert(rows.end(), vectors.begin(), vectors.end());
  return Lattice::from_generators(a.context(), a.dim(), rows);
}

/// Largest lattice contained in both. The rows (a, a) and (b, 0) generate a
/// module whose elements with vanishing first half are exactly (0, a ∩ b).
inline Lattice intersect(const Lattice& a, const Lattice& b) {
  a.require_compatible(b);
  const std::size_t d = a.dim();
  Grid rows;
  for (const auto& r : a.basis()) {
    Vector v = r;
    v.insert(v.end(), r.begin(), r.end());
    rows.push_back(std::move(v));
  }
  for (const auto& r : b.basis()) {
    Vector v = r;
    v.resize(2 * d, Integer(0));
    rows.push_back(std::move(v));
  }
  auto ech = detail::echelon(*a.context(), rows, d, false);
  Grid tail;
  for (auto& r : ech.rest) tail.emplace_back(r.v.begin() + static_cast<std::ptrdiff_t>(d), r.v.end());
  return Lattice::from_generators(a.context(), d, tail);
}

/// log_p |a : b| for b contained in a.
inline int log_index(const Lattice& a, const Lattice& b) {
  if (!a.contains(b)) throw NotContained("log_index: second lattice is not contained in the first");
  return b.ambient_log_index() - a.ambient_log_index();
}

namespace detail {

/// Whether p^k * basis(l) + p^N lies inside m. Only meaningful (and only
/// called) when p^N Z_p^d is already inside p^k l.
inline bool scaled_inside(const Lattice& l, int k, const Lattice& m) {
  const auto& ctx = *l.context();
  for (auto row : l.basis()) {
    scale(ctx, row, ctx.power(k));
    if (!m.contains(row)) return false;
  }
  return true;
}

}  // namespace detail

/// Upper and lower level of m inside l.
inline Levels levels(const Lattice& m, const Lattice& l) {
  if (!l.contains(m)) throw NotContained("levels: lattice is not contained in the reference lattice");
  Levels out;
  // m inside p^k l forces p^{ell(m)} Z^d inside p^k l, so k + ell(l) <= ell(m).
  const int u_max = m.lower_level() - l.lower_level();
  // In that range p^N Z^d lies in p^k l, so working modulo p^N is exact.
  while (out.u < u_max) {
    const auto pk = l.scaled(out.u + 1);
    if (!pk.contains(m)) break;
    ++out.u;
  }
  while (!detail::scaled_inside(l, out.ell, m)) ++out.ell;
  return out;
}

/// Elementary divisor exponents of l / m, ascending.
inline std::vector<int> divisor_profile(const Lattice& m, const Lattice& l) {
  if (!l.contains(m)) throw NotContained("divisor_profile: lattice is not contained in the reference lattice");
  if (l.is_ambient()) return m.ambient_profile();
  // s_j = log_p |l : m + p^j l| = sum_k min(m_k, j); successive differences
  // count the exponents that are >= j.
  const auto& ctx = *l.context();
  const std::size_t d = l.dim();
  const int ell = levels(m, l).ell;
  std::vector<int> at_least(static_cast<std::size_t>(ell) + 1, 0);
  int prev = 0;
  for (int j = 1; j <= ell; ++j) {
    Grid rows = m.basis();
    for (auto r : l.basis()) {
      detail::scale(ctx, r, ctx.power(j));
      rows.push_back(std::move(r));
    }
    const auto s = Lattice::from_generators(l.context(), d, rows);
    const int sj = s.ambient_log_index() - l.ambient_log_index();
    at_least[static_cast<std::size_t>(j)] = sj - prev;
    prev = sj;
  }
  std::vector<int> profile(d, 0);
  for (int j = 1; j <= ell; ++j)
    for (int k = 0; k < at_least[static_cast<std::size_t>(j)]; ++k) profile[d - 1 - static_cast<std::size_t>(k)] = j;
  return profile;
}

}  // namespace pseries
