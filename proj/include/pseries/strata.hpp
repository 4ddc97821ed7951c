#pragma once

// Growth rates of the lower p-series: rational fits of the elementary divisor
// sequences, exact cycle certificates, frame extraction, c-equivalence checks
// and splitting along rate boundaries.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pseries/fraction.hpp"
#include "pseries/gmodule.hpp"

namespace pseries {

struct RateVector {
  std::vector<Fraction> rates;  // ascending
  Fraction sigma = 0;

  static RateVector from(std::vector<Fraction> rates) {
    std::sort(rates.begin(), rates.end());
    Fraction s = sum_of(rates);
    return {std::move(rates), s};
  }
  std::size_t dim() const { return rates.size(); }
  bool constant() const { return rates.empty() || rates.front() == rates.back(); }
  friend bool operator==(const RateVector& a, const RateVector& b) { return a.rates == b.rates; }
};

struct FitResult {
  Fraction rate;
  int residual = 0;  // max_i |m_i - floor(i q)|
  int spread = 0;    // max - min of m_i - floor(i q): residual up to a constant offset
};

struct CycleCertificate {
  int j = 0;
  int m = 0;
  int n = 0;
  Fraction rate() const { return make_fraction(n, m); }
};

enum class StrataStatus { CertifiedWindow, ExactCycle, Heuristic };

inline const char* to_string(StrataStatus s) {
  switch (s) {
    case StrataStatus::CertifiedWindow: return "certified-window";
    case StrataStatus::ExactCycle: return "exact-cycle";
    case StrataStatus::Heuristic: return "heuristic";
  }
  return "unknown";
}

struct StrataOptions {
  int denom_bound = 0;            // 0: default_denom_bound(i_max)
  std::optional<int> fit_cap;     // default: number of samples / 4
  std::optional<int> c_cap;       // default: max(1, i_hi / 4)
  std::optional<int> anchor;      // force a single anchor index
  int fit_slack = 0;              // spread slack inside which smaller denominators win
};

/// min(64, (i_max - 2) / 2): the largest bound the sample count supports.
inline int default_denom_bound(int i_max) { return std::max(1, std::min(64, (i_max - 2) / 2)); }

class Stratification {
 public:
  Stratification(Lattice ambient, PadicMatrix coords, RateVector rates)
      : ambient_(std::move(ambient)), coords_(std::move(coords)), rates_(std::move(rates)) {}

  const Lattice& ambient() const noexcept { return ambient_; }
  /// Row k holds x_{k+1} in coordinates relative to the basis of the ambient lattice.
  const PadicMatrix& frame_coordinates() const noexcept { return coords_; }
  /// Row k holds x_{k+1} in the standard coordinates.
  PadicMatrix frame() const { return coords_ * ambient_.basis_matrix(); }
  const RateVector& rates() const noexcept { return rates_; }
  std::size_t dim() const { return ambient_.dim(); }

  std::vector<long> exponents(int i) const {
    std::vector<long> out;
    for (const auto& r : rates_.rates) out.push_back(floor_times(i, r));
    return out;
  }

  /// T_i = sum_k p^{floor(i xi_k)} Z_p x_k.
  Lattice term(int i) const {
    const auto& ctx = *ambient_.context();
    auto x = frame();
    auto f = exponents(i);
    Grid rows;
    for (std::size_t k = 0; k < dim(); ++k) {
      auto r = x.row(k);
      detail::scale(ctx, r, ctx.power(static_cast<int>(std::min<long>(f[k], ctx.precision()))));
      rows.push_back(std::move(r));
    }
    return Lattice::from_generators(ambient_.context(), dim(), rows);
  }

  /// span(x_1..x_e) + p^depth L.
  Lattice prefix(std::size_t e, int depth) const {
    Grid rows;
    auto x = frame();
    for (std::size_t k = 0; k < e; ++k) rows.push_back(x.row(k));
    return adjoin(ambient_.scaled(depth), rows);
  }

  int c = 0;
  int window_lo = 1;
  int window_hi = 0;
  StrataStatus status = StrataStatus::CertifiedWindow;
  int anchor = 0;  // 0 when the frame comes from a cycle certificate
  /// Entry e-1 for 1 <= e < d: verified invariance depth of the prefix span
  /// at a rate boundary, or nullopt where xi_e = xi_{e+1}.
  std::vector<std::optional<int>> boundary_depths;
  std::optional<CycleCertificate> cycle;

 private:
  Lattice ambient_;
  PadicMatrix coords_;
  RateVector rates_;
};

namespace detail {

inline FitResult score_fit(const std::vector<std::pair<int, int>>& samples, const Fraction& q) {
  long worst = 0, lo = 0, hi = 0;
  bool first = true;
  for (const auto& [i, m] : samples) {
    const long diff = m - floor_times(i, q);
    worst = std::max(worst, std::labs(diff));
    lo = first ? diff : std::min(lo, diff);
    hi = first ? diff : std::max(hi, diff);
    first = false;
  }
  return {q, static_cast<int>(worst), static_cast<int>(hi - lo)};
}

/// Continued fraction convergents of num/den with denominator <= bound.
inline std::vector<Fraction> convergents(long num, long den, int bound) {
  std::vector<Fraction> out;
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  while (den != 0) {
    const long a = num / den;
    const long h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > bound) break;
    out.push_back(make_fraction(h2, k2));
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    const long r = num - a * den;
    num = den;
    den = r;
  }
  return out;
}

}  // namespace detail

/// The fraction n/m with m <= D whose floors m_i - floor(i n/m) vary least
/// (a constant offset is free, so start-up shifts do not favour nearby
/// fractions with large denominators). Candidates must keep the plain
/// residual max_i |m_i - floor(i n/m)| within the cap. Fractions within
/// `slack` of the best spread tie; ties go to the smaller denominator, then
/// the smaller residual, then the smaller value.
inline FitResult fit_rational(const std::vector<std::pair<int, int>>& samples, int denom_bound,
                              std::optional<int> cap = std::nullopt, int slack = 0) {
  if (denom_bound < 1) throw InvalidInput("denominator bound must be positive");
  if (samples.size() < static_cast<std::size_t>(2 * denom_bound + 2))
    throw InvalidInput("fit needs at least 2D + 2 = " + std::to_string(2 * denom_bound + 2) + " samples, got " +
                       std::to_string(samples.size()));
  const int limit = cap.value_or(std::max<int>(1, static_cast<int>(samples.size()) / 4));
  const auto& [i_last, m_last] = *std::max_element(samples.begin(), samples.end());
  if (i_last <= 0) throw InvalidInput("fit samples need positive indices");
  // Any fraction with residual <= limit lies within (limit + 1) / i_last of the endpoint slope.
  const Fraction slope = make_fraction(m_last, i_last);
  const Fraction width = make_fraction(limit + 1, i_last);
  std::vector<Fraction> candidates = detail::convergents(m_last, i_last, denom_bound);
  for (long den = 1; den <= denom_bound; ++den) {
    Fraction lo = (slope - width) * den, hi = (slope + width) * den;
    mpz_class nlo, nhi;
    mpz_cdiv_q(nlo.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(nhi.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    for (long n = std::max(0L, nlo.get_si()); n <= nhi.get_si(); ++n) candidates.push_back(make_fraction(n, den));
  }
  std::vector<FitResult> scored;
  int best_residual = -1, best_spread = -1;
  for (const auto& q : candidates) {
    scored.push_back(detail::score_fit(samples, q));
    const auto& f = scored.back();
    if (best_residual < 0 || f.residual < best_residual) best_residual = f.residual;
    if (f.residual <= limit && (best_spread < 0 || f.spread < best_spread)) best_spread = f.spread;
  }
  if (best_spread < 0)
    throw NoStableFit("best residual " + (scored.empty() ? std::string("n/a") : std::to_string(best_residual)) +
                      " exceeds cap " + std::to_string(limit) + " with denominators <= " +
                      std::to_string(denom_bound));
  std::optional<FitResult> best;
  for (const auto& f : scored) {
    if (f.residual > limit || f.spread > best_spread + slack) continue;
    const bool better = !best || f.rate.get_den() < best->rate.get_den() ||
                        (f.rate.get_den() == best->rate.get_den() &&
                         (f.residual < best->residual || (f.residual == best->residual && f.rate < best->rate)));
    if (better) best = f;
  }
  return *best;
}

/// Fits every coordinate sequence (m_{i,k})_{i=1..i_max} of the trace.
inline RateVector estimate_rates(const SeriesTrace& trace, int denom_bound = 0, std::optional<int> cap = std::nullopt,
                                 int slack = 0) {
  const int d = static_cast<int>(trace.dim());
  const int bound = denom_bound > 0 ? denom_bound : default_denom_bound(trace.i_max);
  std::vector<Fraction> rates;
  for (std::size_t k = 0; k < trace.dim(); ++k) {
    std::vector<std::pair<int, int>> samples;
    for (int i = 1; i <= trace.i_max; ++i) samples.emplace_back(i, trace.profiles[static_cast<std::size_t>(i)][k]);
    try {
      rates.push_back(fit_rational(samples, bound, cap, slack).rate);
    } catch (const Error& e) {
      throw_error(e.kind(), "coordinate " + std::to_string(k + 1) + ": " + e.detail());
    }
    if (rates.back() < make_fraction(1, d) || rates.back() > 1)
      throw RateOutOfRange("coordinate " + std::to_string(k + 1) + " fitted " + format_fraction(rates.back()) +
                           ", outside [1/" + std::to_string(d) + ", 1]");
  }
  return RateVector::from(std::move(rates));
}

namespace detail {

/// Canonical basis of p^{-u} lambda where u is the largest k with lambda in p^k L.
inline Grid normalized_shape(const Lattice& lambda, int u) {
  const auto& pu = lambda.context()->power(u);
  Grid g = lambda.basis();
  for (auto& r : g)
    for (auto& x : r) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), pu.get_mpz_t());
  return g;
}

}  // namespace detail

/// First repetition of normalised shapes, verified as lambda_{j+m} = p^n lambda_j.
inline std::optional<CycleCertificate> detect_cycle(const SeriesTrace& trace) {
  if (!trace.ambient.is_ambient()) {
    // Shapes are compared in standard coordinates, which is only faithful when L is the ambient lattice.
    return std::nullopt;
  }
  std::map<Grid, int> seen;
  for (int i = 0; i <= trace.i_max; ++i) {
    const auto& lam = trace.terms[static_cast<std::size_t>(i)];
    const int u = trace.profiles[static_cast<std::size_t>(i)].front();
    auto [it, inserted] = seen.emplace(detail::normalized_shape(lam, u), i);
    if (inserted) continue;
    const int j = it->second, m = i - j;
    const int n = u - trace.profiles[static_cast<std::size_t>(j)].front();
    if (n < 1 || n > m) continue;
    if (trace.terms[static_cast<std::size_t>(j)].scaled(n) == lam) return CycleCertificate{j, m, n};
  }
  return std::nullopt;
}

namespace detail {

/// Smallest c >= 0 with p^c v in m (p^N v is always in m).
inline int order_modulo(const Lattice& m, Vector v) {
  const auto& ctx = *m.context();
  for (int c = 0; c < ctx.precision(); ++c) {
    if (m.contains(v)) return c;
    scale(ctx, v, ctx.prime());
  }
  return ctx.precision();
}

/// Smallest c with p^c T in lambda and p^c lambda in T, via element orders.
inline int equivalence_constant(const Lattice& lambda, const Lattice& t) {
  int c = 0;
  for (const auto& b : t.basis()) c = std::max(c, order_modulo(lambda, b));
  for (const auto& b : lambda.basis()) c = std::max(c, order_modulo(t, b));
  return c;
}

inline int min_valuation(const PadicContext& ctx, const Vector& v, std::size_t from) {
  int out = ctx.precision();
  for (std::size_t k = from; k < v.size(); ++k) out = std::min(out, ctx.valuation(v[k]));
  return out;
}

/// Coordinates of each basis vector of `sub` relative to the basis of `l`.
inline PadicMatrix relative_coordinates(const Lattice& sub, const Lattice& l) {
  Grid rows;
  for (const auto& b : sub.basis()) rows.push_back(*l.coordinates(b));
  return {l.context(), rows};
}

inline std::vector<std::optional<int>> boundaries(const RateVector& rates) {
  std::vector<std::optional<int>> out;
  for (std::size_t e = 1; e < rates.dim(); ++e)
    out.push_back(rates.rates[e - 1] < rates.rates[e] ? std::optional<int>(0) : std::nullopt);
  return out;
}

/// Attempts a frame from the Smith decomposition of lambda_anchor. Returns the
/// stratification or a reason for rejection.
inline std::pair<std::optional<Stratification>, std::string> frame_from_anchor(const SeriesTrace& trace,
                                                                               const RateVector& rates,
                                                                               const GroupAction& action, int anchor,
                                                                               const StrataOptions& opt) {
  const auto& l = trace.ambient;
  const auto& ctx = *l.context();
  const std::size_t d = trace.dim();
  auto smith = smith_form(relative_coordinates(trace.terms[static_cast<std::size_t>(anchor)], l));
  const int track_cap = opt.c_cap.value_or(std::max(1, trace.i_max / 4));
  for (std::size_t k = 0; k < d; ++k) {
    const long predicted = floor_times(anchor, rates.rates[k]);
    if (std::labs(smith.exponents[k] - predicted) > track_cap)
      return {std::nullopt, "anchor " + std::to_string(anchor) + ": divisor " + std::to_string(k + 1) + " is " +
                                std::to_string(smith.exponents[k]) + ", rate predicts " + std::to_string(predicted)};
  }
  Stratification s(l, smith.V_inverse, rates);
  s.anchor = anchor;
  s.status = StrataStatus::CertifiedWindow;

  // Window: longest prefix 1..i_hi on which every approximate term is invariant.
  int i_hi = 0;
  while (i_hi < trace.i_max && check_invariance(s.term(i_hi + 1), action)) ++i_hi;
  if (2 * i_hi < trace.i_max)
    return {std::nullopt, "anchor " + std::to_string(anchor) + ": approximate terms stop being invariant at i = " +
                              std::to_string(i_hi + 1)};
  s.window_lo = 1;
  s.window_hi = i_hi;

  // Prefix spans at rate boundaries are invariant modulo p^K with K the gap
  // between the anchor divisors on either side.
  s.boundary_depths = boundaries(rates);
  for (std::size_t e = 1; e < d; ++e) {
    if (!s.boundary_depths[e - 1]) continue;
    const int depth = std::min(smith.exponents[e] - smith.exponents[e - 1], ctx.precision() - 2);
    if (depth < 1 || !check_invariance(s.prefix(e, depth), action))
      return {std::nullopt, "anchor " + std::to_string(anchor) + ": prefix span of " + std::to_string(e) +
                                " frame vectors is not invariant"};
    s.boundary_depths[e - 1] = depth;
  }

  const int c_cap = opt.c_cap.value_or(std::max(1, i_hi / 4));
  int c = 0;
  for (int i = 1; i <= i_hi; ++i) {
    c = std::max(c, equivalence_constant(trace.terms[static_cast<std::size_t>(i)], s.term(i)));
    if (c > c_cap)
      return {std::nullopt, "anchor " + std::to_string(anchor) + ": equivalence constant exceeds " +
                                std::to_string(c_cap) + " at i = " + std::to_string(i)};
  }
  s.c = c;
  return {std::move(s), ""};
}

}  // namespace detail

/// Anchor candidates: the last two multiples of the lcm of the rate
/// denominators that fit in the trace (or i_max itself when none does).
inline std::vector<int> anchor_indices(const RateVector& rates, int i_max) {
  long l = 1;
  for (const auto& r : rates.rates) l = std::lcm(l, r.get_den().get_si());
  std::vector<int> out;
  if (l > i_max) return {i_max};
  const int i2 = static_cast<int>((i_max / l) * l);
  out.push_back(i2);
  if (i2 - l >= 1) out.push_back(static_cast<int>(i2 - l));
  return out;
}

inline Stratification extract_frame(const SeriesTrace& trace, const RateVector& rates, const GroupAction& action,
                                    const StrataOptions& opt = {}) {
  if (rates.dim() != trace.dim()) throw DimensionMismatch("rate vector and trace differ in dimension");
  const auto anchors = opt.anchor ? std::vector<int>{*opt.anchor} : anchor_indices(rates, trace.i_max);
  std::string reasons;
  for (int a : anchors) {
    if (a < 1 || a > trace.i_max) throw InvalidInput("anchor index out of range");
    auto [s, why] = detail::frame_from_anchor(trace, rates, action, a, opt);
    if (s) return std::move(*s);
    reasons += (reasons.empty() ? "" : "; ") + why;
  }
  throw FrameRejected(reasons);
}

/// The constant-rate stratification T_i = p^{floor(i n/m)} L of a cycle.
inline Stratification cycle_stratification(const SeriesTrace& trace, const CycleCertificate& cyc) {
  const std::size_t d = trace.dim();
  Stratification s(trace.ambient, PadicMatrix::identity(trace.ambient.context(), d),
                   RateVector::from(std::vector<Fraction>(d, cyc.rate())));
  s.status = StrataStatus::ExactCycle;
  s.cycle = cyc;
  s.window_lo = 1;
  s.window_hi = trace.i_max;
  s.boundary_depths = detail::boundaries(s.rates());
  for (int i = 1; i <= trace.i_max; ++i)
    s.c = std::max(s.c, detail::equivalence_constant(trace.terms[static_cast<std::size_t>(i)], s.term(i)));
  return s;
}

/// Window-wide equivalence constant recomputed through S_i = lambda_i + T_i:
/// p^c T_i in lambda_i and p^c lambda_i in T_i hold exactly when p^c S_i lies
/// in both, i.e. c >= both lower levels inside S_i. Nullopt above the cap.
inline std::optional<int> certify_equivalence(const SeriesTrace& trace, const Stratification& strat,
                                              std::optional<int> cap = std::nullopt) {
  const int limit = cap.value_or(std::max(1, strat.window_hi / 4));
  int c = 0;
  for (int i = strat.window_lo; i <= strat.window_hi && i <= trace.i_max; ++i) {
    const auto& lam = trace.terms[static_cast<std::size_t>(i)];
    const auto t = strat.term(i);
    const auto s = sum(lam, t);
    c = std::max({c, levels(lam, s).ell, levels(t, s).ell});
    if (c > limit) return std::nullopt;
  }
  return c;
}

/// Full pipeline on a trace: exact cycle if one is visible, otherwise fitted
/// rates and an extracted frame.
inline Stratification stratify(const SeriesTrace& trace, const GroupAction& action, const StrataOptions& opt = {}) {
  if (auto cyc = detect_cycle(trace)) return cycle_stratification(trace, *cyc);
  const int bound = opt.denom_bound > 0 ? opt.denom_bound : default_denom_bound(trace.i_max);
  auto rates = estimate_rates(trace, bound, opt.fit_cap, opt.fit_slack);
  return extract_frame(trace, rates, action, opt);
}

/// Largest |log_p |L : lambda_i| - floor(i sigma)| over the window.
inline long envelope_deviation(const SeriesTrace& trace, const Stratification& strat) {
  long worst = 0;
  for (int i = strat.window_lo; i <= strat.window_hi; ++i)
    worst = std::max(worst, std::labs(trace.log_index(i) - floor_times(i, strat.rates().sigma)));
  return worst;
}

inline bool envelope_holds(const SeriesTrace& trace, const Stratification& strat) {
  return envelope_deviation(trace, strat) <= static_cast<long>(trace.dim()) * (strat.c + 1);
}

/// Rates re-derived from the frame alone: the order of x_k modulo lambda_i
/// tracks floor(i xi_k).
inline RateVector frame_rates(const SeriesTrace& trace, const Stratification& strat, int denom_bound) {
  const auto x = strat.frame();
  const int hi = std::min(strat.window_hi, trace.i_max);
  std::vector<Fraction> rates;
  for (std::size_t k = 0; k < strat.dim(); ++k) {
    std::vector<std::pair<int, int>> samples;
    for (int i = 1; i <= hi; ++i)
      samples.emplace_back(i, detail::order_modulo(trace.terms[static_cast<std::size_t>(i)], x.row(k)));
    rates.push_back(fit_rational(samples, denom_bound).rate);
  }
  return RateVector::from(std::move(rates));
}

struct SplitResult {
  Lattice sub;                  // span(x_1..x_e) + p^depth L
  GroupAction sub_action;       // on the first e frame coordinates
  GroupAction quotient_action;  // on the last d - e frame coordinates
  int depth = 0;                // precision of both induced actions
};

/// Splits at the boundary after the first e frame vectors (1 <= e < d).
inline SplitResult strata_split(const Stratification& strat, const GroupAction& action, std::size_t e) {
  const std::size_t d = strat.dim();
  if (e < 1 || e >= d) throw InvalidInput("split position must lie in [1, d - 1]");
  if (strat.rates().rates[e - 1] == strat.rates().rates[e])
    throw NotABoundary("xi_" + std::to_string(e) + " = xi_" + std::to_string(e + 1) + " = " +
                       format_fraction(strat.rates().rates[e]));
  const auto& recorded = strat.boundary_depths.at(e - 1);
  if (!recorded || *recorded < 1) throw FrameRejected("no verified invariance depth at this boundary");
  const int depth = *recorded;
  auto sub = strat.prefix(e, depth);
  if (!check_invariance(sub, action)) throw NotInvariant("prefix span is not invariant");

  // The action in frame coordinates, read modulo p^depth.
  const auto local = restrict_action(strat.ambient(), action);
  const auto ctx = PadicContext::make(action.prime(), std::min(depth, local.precision()));
  const auto y = strat.frame_coordinates().truncated(ctx);
  const auto yinv = unimodular_inverse(y);
  std::vector<PadicMatrix> sub_gens, quo_gens;
  for (const auto& g : local.generators()) {
    const auto h = y * g.truncated(ctx) * yinv;
    PadicMatrix a(ctx, e, e), b(ctx, d - e, d - e);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        if (r < e && c < e) a.set(r, c, h(r, c));
        if (r >= e && c >= e) b.set(r - e, c - e, h(r, c));
        if (r < e && c >= e && sgn(h(r, c)) != 0)
          throw NotInvariant("frame prefix leaks into the complement modulo p^" + std::to_string(depth));
      }
    sub_gens.push_back(std::move(a));
    quo_gens.push_back(std::move(b));
  }
  return {std::move(sub), GroupAction::make(ctx, e, std::move(sub_gens)),
          GroupAction::make(ctx, d - e, std::move(quo_gens)), depth};
}

/// Vectors fixed by every generator: rows u of the Smith transform with
/// u [g_1 - 1 | ... | g_t - 1] = 0. They span a direct summand.
inline Grid fixed_space(const GroupAction& action) {
  const std::size_t d = action.dim();
  const auto augs = action.augmentations();
  PadicMatrix stacked(action.context(), d, d * augs.size());
  for (std::size_t t = 0; t < augs.size(); ++t)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) stacked.set(r, t * d + c, augs[t](r, c));
  auto s = smith_form(stacked);
  Grid out;
  for (std::size_t k = 0; k < d; ++k)
    if (s.exponents[k] >= action.precision()) out.push_back(s.U.row(k));
  return out;
}

/// Action on L / Z_p v for a fixed primitive vector v, at full precision.
inline GroupAction quotient_by_fixed_vector(const GroupAction& action, const Vector& v) {
  const std::size_t d = action.dim();
  const auto& ctx = action.context();
  // Complete v to a basis: v first, then standard vectors avoiding its unit pivot.
  std::size_t pivot = d;
  for (std::size_t k = 0; k < d && pivot == d; ++k)
    if (sgn(v[k]) != 0 && ctx->valuation(v[k]) == 0) pivot = k;
  if (pivot == d) throw InvalidInput("fixed vector is not primitive");
  Grid basis{v};
  for (std::size_t k = 0; k < d; ++k) {
    if (k == pivot) continue;
    Vector e(d, Integer(0));
    e[k] = 1;
    basis.push_back(std::move(e));
  }
  const PadicMatrix w(ctx, basis);
  const auto winv = unimodular_inverse(w);
  Vector first(d, Integer(0));
  first[0] = 1;
  std::vector<PadicMatrix> gens;
  for (const auto& g : action.generators()) {
    const auto h = w * g * winv;
    if (h.row(0) != first) throw NotInvariant("vector is not fixed by every generator");
    PadicMatrix q(ctx, d - 1, d - 1);
    for (std::size_t r = 1; r < d; ++r)
      for (std::size_t c = 1; c < d; ++c) q.set(r - 1, c - 1, h(r, c));
    gens.push_back(std::move(q));
  }
  return GroupAction::make(ctx, d - 1, std::move(gens));
}

struct InductiveCandidates {
  Vector fixed_vector;
  RateVector quotient_rates;
  Fraction eta = 1;  // rate of the trivial one-dimensional submodule
  std::vector<RateVector> candidates;
  std::optional<std::size_t> selected;  // candidate matching an independently fitted rate vector
  StrataStatus status = StrataStatus::Heuristic;
};

/// One step of the inductive procedure: quotient by a fixed line, fit the
/// quotient rates, and supplement them by eta or by theta for every possible
/// theta among the quotient rates.
inline InductiveCandidates inductive_candidates(const GroupAction& action, const Vector& fixed_vector, int i_max,
                                                int denom_bound = 0) {
  InductiveCandidates out;
  out.fixed_vector = fixed_vector;
  const auto quotient = quotient_by_fixed_vector(action, fixed_vector);
  const auto l = Lattice::ambient(quotient.context(), quotient.dim());
  const auto tr = lower_p_series(l, quotient, i_max);
  out.quotient_rates = estimate_rates(tr, denom_bound);
  std::vector<Fraction> thetas = out.quotient_rates.rates;
  thetas.push_back(out.eta);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  for (const auto& theta : thetas) {
    auto rates = out.quotient_rates.rates;
    rates.push_back(theta);
    auto rv = RateVector::from(std::move(rates));
    if (std::find(out.candidates.begin(), out.candidates.end(), rv) == out.candidates.end())
      out.candidates.push_back(std::move(rv));
  }
  return out;
}

/// Marks the candidate equal to `certified` (if any) as selected.
inline void select_candidate(InductiveCandidates& ic, const RateVector& certified) {
  for (std::size_t k = 0; k < ic.candidates.size(); ++k)
    if (ic.candidates[k] == certified) ic.selected = k;
}

}  // namespace pseries
