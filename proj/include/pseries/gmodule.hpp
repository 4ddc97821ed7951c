#pragma once

// Z_pG-modules given by generator matrices acting on row vectors (x -> x g),
// the lower p-series lambda_i(L) = L . a^i of the p-augmentation ideal, and
// restriction of an action to an invariant sublattice.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pseries/lattice.hpp"

namespace pseries {

class GroupAction {
 public:
  /// Validates shapes, invertibility mod p and the pro-p condition.
  static GroupAction make(Context ctx, std::size_t d, std::vector<PadicMatrix> generators) {
    if (generators.empty()) throw InvalidInput("an action needs at least one generator");
    for (std::size_t t = 0; t < generators.size(); ++t) {
      const auto& g = generators[t];
      require_same_ring(*ctx, *g.context());
      if (g.rows() != d || g.cols() != d)
        throw DimensionMismatch("generator " + std::to_string(t) + " is not " + std::to_string(d) + "x" +
                                std::to_string(d));
      if (g.determinant().valuation() != 0)
        throw InvalidInput("generator " + std::to_string(t) + " is not invertible modulo p");
    }
    GroupAction a(std::move(ctx), d, std::move(generators));
    a.verify_pro_p();
    return a;
  }

  const Context& context() const noexcept { return ctx_; }
  std::size_t dim() const noexcept { return d_; }
  unsigned long prime() const noexcept { return ctx_->prime(); }
  int precision() const noexcept { return ctx_->precision(); }
  const std::vector<PadicMatrix>& generators() const noexcept { return gens_; }
  bool unipotence_verified() const noexcept { return unipotent_; }

  /// g - 1 for every generator.
  std::vector<PadicMatrix> augmentations() const {
    std::vector<PadicMatrix> out;
    const auto id = PadicMatrix::identity(ctx_, d_);
    for (const auto& g : gens_) out.push_back(g - id);
    return out;
  }

  /// The same action read modulo a smaller power of p.
  GroupAction truncated(const Context& coarser) const {
    std::vector<PadicMatrix> gens;
    for (const auto& g : gens_) gens.push_back(g.truncated(coarser));
    return make(coarser, d_, std::move(gens));
  }

 private:
  GroupAction(Context ctx, std::size_t d, std::vector<PadicMatrix> gens)
      : ctx_(std::move(ctx)), d_(d), gens_(std::move(gens)) {}

  /// Over F_p, V_0 = F_p^d and V_{k+1} = sum_t V_k (g_t - 1); the action is
  /// pro-p on L exactly when V_d = 0.
  void verify_pro_p() {
    const auto fp = PadicContext::make(ctx_->prime(), 1);
    std::vector<PadicMatrix> nil;
    for (const auto& a : augmentations()) nil.push_back(a.truncated(fp));
    Grid space = PadicMatrix::identity(fp, d_).grid();
    for (std::size_t k = 0; k < d_ && !space.empty(); ++k) {
      Grid next;
      for (const auto& v : space)
        for (const auto& a : nil) {
          auto w = (PadicMatrix(fp, Grid{v}) * a).row(0);
          if (!detail::is_zero(w)) next.push_back(std::move(w));
        }
      space.clear();
      if (next.empty()) break;
      auto ech = detail::echelon(*fp, next, d_, false);
      for (auto& piv : ech.pivots)
        if (piv) space.push_back(std::move(piv->v));
    }
    if (!space.empty()) throw NotProP("generators are not unipotent modulo p");
    unipotent_ = true;
  }

  Context ctx_;
  std::size_t d_;
  std::vector<PadicMatrix> gens_;
  bool unipotent_ = false;
};

namespace detail {

inline Grid images(const Lattice& m, const PadicMatrix& g) { return (m.basis_matrix() * g).grid(); }

inline void require_action_fits(const Lattice& m, const GroupAction& action) {
  require_same_ring(*m.context(), *action.context());
  if (m.dim() != action.dim()) throw DimensionMismatch("lattice and action have different dimensions");
}

}  // namespace detail

/// Whether M g = M for every generator g. Since each g is invertible, M g has
/// the same index as M, so M g inside M already forces equality.
inline bool check_invariance(const Lattice& m, const GroupAction& action) {
  detail::require_action_fits(m, action);
  for (const auto& g : action.generators())
    for (const auto& row : detail::images(m, g))
      if (!m.contains(row)) return false;
  return true;
}

/// Smallest invariant lattice containing m.
inline Lattice invariant_closure(Lattice m, const GroupAction& action) {
  while (!check_invariance(m, action)) {
    Grid extra;
    for (const auto& g : action.generators()) {
      auto img = detail::images(m, g);
      extra.insert(extra.end(), img.begin(), img.end());
    }
    m = adjoin(m, extra);
  }
  return m;
}

namespace detail {

struct StepResult {
  Lattice next;
  bool saturated;  // true when the single-pass sum had to be closed up
};

inline StepResult lambda_step_impl(const Lattice& m, const GroupAction& action) {
  detail::require_action_fits(m, action);
  if (!check_invariance(m, action)) throw NotInvariant("lambda_step: input lattice is not invariant");
  const auto& ctx = *m.context();
  Grid rows;
  for (auto r : m.basis()) {
    scale(ctx, r, ctx.prime());
    rows.push_back(std::move(r));
  }
  for (const auto& a : action.augmentations()) {
    auto img = images(m, a);
    rows.insert(rows.end(), img.begin(), img.end());
  }
  auto next = Lattice::from_generators(m.context(), m.dim(), rows);
  const bool saturated = !check_invariance(next, action);
  if (saturated) next = invariant_closure(next, action);
  return {std::move(next), saturated};
}

}  // namespace detail

/// p M + sum_t M (g_t - 1).
inline Lattice lambda_step(const Lattice& m, const GroupAction& action) {
  return detail::lambda_step_impl(m, action).next;
}

struct SeriesTrace {
  Lattice ambient;
  std::vector<Lattice> terms;              // lambda_0 = ambient, ..., lambda_{i_max}
  std::vector<std::vector<int>> profiles;  // divisor_profile(lambda_i, ambient)
  int i_max = 0;
  int precision = 0;
  int saturated_steps = 0;  // steps where the single-pass sum was not invariant

  std::size_t dim() const { return ambient.dim(); }
  int log_index(int i) const {
    const auto& prof = profiles.at(static_cast<std::size_t>(i));
    return std::accumulate(prof.begin(), prof.end(), 0);
  }
  /// The sequence (m_{i,k})_{i=0..i_max} for one coordinate k.
  std::vector<int> coordinate(std::size_t k) const {
    std::vector<int> out;
    for (const auto& p : profiles) out.push_back(p.at(k));
    return out;
  }
};

/// Precision needed to carry the series of `l` down to index i_max.
inline int required_precision(const Lattice& l, int i_max) { return i_max + l.lower_level() + 2; }

inline SeriesTrace lower_p_series(const Lattice& l, const GroupAction& action, int i_max) {
  detail::require_action_fits(l, action);
  if (i_max < 0) throw InvalidInput("i_max must be non-negative");
  if (l.precision() < required_precision(l, i_max))
    throw PrecisionExhausted("series to index " + std::to_string(i_max) + " needs precision " +
                             std::to_string(required_precision(l, i_max)) + ", have " +
                             std::to_string(l.precision()));
  if (!check_invariance(l, action)) throw NotInvariant("lower_p_series: starting lattice is not invariant");
  SeriesTrace tr{l, {l}, {std::vector<int>(l.dim(), 0)}, i_max, l.precision(), 0};
  for (int i = 1; i <= i_max; ++i) {
    const Lattice& prev = tr.terms.back();
    try {
      auto step = detail::lambda_step_impl(prev, action);
      if (step.saturated) ++tr.saturated_steps;
      const auto& next = step.next;
      if (!prev.contains(next) || !next.contains(prev.scaled(1)))
        throw NotInvariant("series step is not an elementary abelian descent");
      tr.profiles.push_back(divisor_profile(next, l));
      tr.terms.push_back(next);
    } catch (const Error& e) {
      throw_error(e.kind(), "at i = " + std::to_string(i) + ": " + e.detail());
    }
    if (tr.log_index(i) < i)
      throw NotProP("at i = " + std::to_string(i) + ": index below p^i, the series is not a filtration");
  }
  return tr;
}

/// The action expressed in the basis of an invariant sublattice: B g B^{-1}.
/// Coordinates relative to B are only known modulo p^(N - lower level), so the
/// result lives at that precision.
inline GroupAction restrict_action(const Lattice& sub, const GroupAction& action) {
  detail::require_action_fits(sub, action);
  if (!check_invariance(sub, action)) throw NotInvariant("restrict_action: sublattice is not invariant");
  const int n = sub.precision() - sub.lower_level();
  const auto coarse = PadicContext::make(sub.prime(), n);
  std::vector<PadicMatrix> gens;
  for (const auto& g : action.generators()) {
    Grid rows;
    for (const auto& img : detail::images(sub, g)) rows.push_back(*sub.coordinates(img));
    gens.push_back(PadicMatrix(coarse, rows));
  }
  return GroupAction::make(coarse, sub.dim(), std::move(gens));
}

}  // namespace pseries
