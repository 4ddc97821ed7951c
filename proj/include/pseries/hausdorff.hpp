#pragma once

// Hausdorff dimension of closed subgroups H of L with respect to the lower
// p-series: exactly from a stratification, numerically as the logarithmic
// density log|H + lambda_i : lambda_i| / log|L : lambda_i|, and the spectrum
// of all values it can take.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pseries/fraction.hpp"
#include "pseries/strata.hpp"

namespace pseries {

/// A closed subgroup given by r generators that are linearly independent
/// modulo p^N (rank certified on construction).
class SubgroupSpec {
 public:
  static SubgroupSpec make(Context ctx, std::size_t d, Grid generators) {
    for (auto& g : generators) {
      if (g.size() != d) throw DimensionMismatch("subgroup generator length differs from ambient dimension");
      for (auto& x : g) ctx->reduce(x);
    }
    generators.erase(std::remove_if(generators.begin(), generators.end(), detail::is_zero), generators.end());
    if (generators.size() > d) throw RankDeficient("more generators than the ambient dimension");
    SubgroupSpec h(std::move(ctx), d, std::move(generators));
    const std::size_t r = h.rank_estimate();
    if (r < h.gens_.size())
      throw RankDeficient("generators have rank " + std::to_string(r) + " < " + std::to_string(h.gens_.size()) +
                          " at precision " + std::to_string(h.ctx_->precision()));
    return h;
  }

  static SubgroupSpec full(Context ctx, std::size_t d) {
    return make(ctx, d, PadicMatrix::identity(ctx, d).grid());
  }

  const Context& context() const noexcept { return ctx_; }
  std::size_t dim() const noexcept { return d_; }
  std::size_t rank() const noexcept { return gens_.size(); }
  const Grid& generators() const noexcept { return gens_; }

  /// p * H.
  SubgroupSpec scaled(int k) const {
    Grid g = gens_;
    for (auto& r : g) detail::scale(*ctx_, r, ctx_->power(k));
    return make(ctx_, d_, std::move(g));
  }

 private:
  SubgroupSpec(Context ctx, std::size_t d, Grid gens) : ctx_(std::move(ctx)), d_(d), gens_(std::move(gens)) {}

  /// Number of echelon pivots of valuation below N - 1.
  std::size_t rank_estimate() const {
    if (gens_.empty()) return 0;
    auto ech = detail::echelon(*ctx_, gens_, d_, false);
    std::size_t r = 0;
    for (std::size_t c = 0; c < d_; ++c)
      if (ech.pivots[c] && ech.exponents[c] < ctx_->precision() - 1) ++r;
    return r;
  }

  Context ctx_;
  std::size_t d_;
  Grid gens_;
};

struct NumericPoint {
  int i = 0;
  int numerator = 0;    // log_p |H + lambda_i : lambda_i|
  int denominator = 0;  // log_p |L : lambda_i|
  double quotient() const { return denominator == 0 ? 0.0 : static_cast<double>(numerator) / denominator; }
};

struct DimensionReport {
  std::optional<Fraction> exact;
  std::vector<int> pivots;  // 1-based, strictly increasing
  std::vector<NumericPoint> points;
  bool strong = false;
  double tail_spread = 0.0;  // max - min of the quotients over the final third
  double tolerance = 0.01;
  double final_quotient() const { return points.empty() ? 0.0 : points.back().quotient(); }
};

/// Triangularises H against the frame from the last coordinate down and
/// returns the 1-based top indices j(1) < ... < j(r).
inline std::vector<int> echelon_pivots(const SubgroupSpec& h, const Stratification& strat) {
  if (h.dim() != strat.dim()) throw DimensionMismatch("subgroup and stratification differ in dimension");
  require_same_ring(*h.context(), *strat.ambient().context());
  const auto& ctx = *h.context();
  const std::size_t d = h.dim();
  const auto yinv = unimodular_inverse(strat.frame_coordinates());
  Grid rows;
  for (const auto& g : h.generators()) {
    auto coords = strat.ambient().coordinates(g);
    if (!coords) throw NotContained("subgroup generator does not lie in the ambient lattice");
    rows.push_back((PadicMatrix(h.context(), Grid{*coords}) * yinv).row(0));
  }
  // The frame is exact only modulo p^K across a rate boundary of depth K, so
  // a x_j is known only up to p^{v(a) + K} on the coordinates beyond the
  // boundary. Entries at or below that level are treated as zero.
  auto depth_between = [&](std::size_t lo, std::size_t hi) {
    int k = ctx.precision();
    for (std::size_t e = lo + 1; e <= hi; ++e)
      if (e - 1 < strat.boundary_depths.size() && strat.boundary_depths[e - 1])
        k = std::min(k, *strat.boundary_depths[e - 1]);
    return k;
  };
  auto significant = [&](const Vector& row, std::size_t col) {
    if (sgn(row[col]) == 0) return false;
    const int v = ctx.valuation(row[col]);
    for (std::size_t j = 0; j < col; ++j)
      if (sgn(row[j]) != 0 && v >= ctx.valuation(row[j]) + depth_between(j, col)) return false;
    return true;
  };
  std::vector<int> pivots;
  for (std::size_t col = d; col-- > 0 && !rows.empty();) {
    std::size_t best = rows.size();
    int best_v = ctx.precision() - 1;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (!significant(rows[k], col)) continue;
      const int v = ctx.valuation(rows[k][col]);
      if (v < best_v) best_v = v, best = k;
    }
    if (best == rows.size()) continue;
    Vector piv = std::move(rows[best]);
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
    const auto [a, uinv] = ctx.split_unit(piv[col]);
    detail::scale(ctx, piv, uinv);
    for (auto& r : rows) {
      if (sgn(r[col]) == 0 || ctx.valuation(r[col]) < a) continue;
      Integer q = r[col] / ctx.power(a);
      detail::axpy(ctx, r, q, piv);
    }
    pivots.push_back(static_cast<int>(col) + 1);
  }
  if (pivots.size() < h.rank())
    throw RankDeficient("triangularisation found " + std::to_string(pivots.size()) + " pivots for rank " +
                        std::to_string(h.rank()));
  std::sort(pivots.begin(), pivots.end());
  return pivots;
}

/// (xi_{j(1)} + ... + xi_{j(r)}) / (sigma + extra_weight).
inline Fraction hdim_exact(const SubgroupSpec& h, const Stratification& strat, const Fraction& extra_weight = 0) {
  if (h.rank() == 0) return 0;
  Fraction num = 0;
  for (int j : echelon_pivots(h, strat)) num += strat.rates().rates[static_cast<std::size_t>(j - 1)];
  Fraction q = num / (strat.rates().sigma + extra_weight);
  q.canonicalize();
  return q;
}

/// Density quotients for i = 1..i_max; strong when the final third of the
/// quotients spans less than the tolerance.
inline DimensionReport hdim_numeric(const SubgroupSpec& h, const SeriesTrace& trace, double tolerance = 0.01) {
  if (h.dim() != trace.dim()) throw DimensionMismatch("subgroup and trace differ in dimension");
  require_same_ring(*h.context(), *trace.ambient.context());
  DimensionReport rep;
  rep.tolerance = tolerance;
  for (int i = 1; i <= trace.i_max; ++i) {
    const auto& lam = trace.terms[static_cast<std::size_t>(i)];
    const auto joined = adjoin(lam, h.generators());
    rep.points.push_back({i, lam.ambient_log_index() - joined.ambient_log_index(), trace.log_index(i)});
  }
  if (!rep.points.empty()) {
    const std::size_t from = rep.points.size() - std::max<std::size_t>(1, rep.points.size() / 3);
    double lo = rep.points[from].quotient(), hi = lo;
    for (std::size_t k = from; k < rep.points.size(); ++k) {
      lo = std::min(lo, rep.points[k].quotient());
      hi = std::max(hi, rep.points[k].quotient());
    }
    rep.tail_spread = hi - lo;
    rep.strong = rep.tail_spread < tolerance;
  }
  return rep;
}

/// Both estimates in one report.
inline DimensionReport hdim_report(const SubgroupSpec& h, const SeriesTrace& trace, const Stratification& strat,
                                   const Fraction& extra_weight = 0, double tolerance = 0.01) {
  auto rep = hdim_numeric(h, trace, tolerance);
  if (h.rank() > 0) rep.pivots = echelon_pivots(h, strat);
  rep.exact = hdim_exact(h, strat, extra_weight);
  return rep;
}

inline constexpr std::size_t kSpectrumCap = 24;
inline constexpr std::size_t kSpectrumSplitCap = 40;

namespace detail {

inline std::set<Fraction> subset_sums(std::vector<Fraction>::const_iterator first,
                                      std::vector<Fraction>::const_iterator last) {
  std::set<Fraction> sums{Fraction(0)};
  for (auto it = first; it != last; ++it) {
    std::vector<Fraction> shifted;
    for (const auto& s : sums) shifted.push_back(s + *it);
    sums.insert(shifted.begin(), shifted.end());
  }
  return sums;
}

}  // namespace detail

/// All values sum_k eps_k xi_k / sigma, eps_k in {0, 1}, ascending and
/// distinct. A nonzero extra weight enters as one more rate (a direction of
/// the group outside the lattice).
inline std::vector<Fraction> spectrum(const RateVector& rates, const Fraction& extra_weight = 0,
                                      std::size_t cap = kSpectrumCap) {
  std::vector<Fraction> xs = rates.rates;
  if (extra_weight != 0) xs.push_back(extra_weight);
  const Fraction sigma = sum_of(xs);
  if (xs.size() > std::max(cap, kSpectrumSplitCap))
    throw EnumerationTooLarge(std::to_string(xs.size()) + " rates exceed the enumeration cap " +
                              std::to_string(std::max(cap, kSpectrumSplitCap)));
  std::set<Fraction> sums;
  if (xs.size() <= cap) {
    sums = detail::subset_sums(xs.begin(), xs.end());
  } else {
    // Meet in the middle: both halves have at most 2^20 subsets.
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    const auto a = detail::subset_sums(xs.begin(), mid), b = detail::subset_sums(mid, xs.end());
    for (const auto& x : a)
      for (const auto& y : b) sums.insert(x + y);
  }
  std::vector<Fraction> out;
  if (sigma == 0) return {Fraction(0)};
  for (const auto& s : sums) {
    Fraction q = s / sigma;
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

inline bool spectrum_contains(const std::vector<Fraction>& spec, const Fraction& q) {
  return std::binary_search(spec.begin(), spec.end(), q);
}

}  // namespace pseries
