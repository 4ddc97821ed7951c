#pragma once

// Worked examples and seeded random families of Z_pG-modules.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pseries/fraction.hpp"
#include "pseries/gmodule.hpp"

namespace pseries {

struct ExpectedRates {
  std::vector<Fraction> rates;  // ascending
  std::string source;           // "reference-example", "derived" or "immediate"
};

struct SpectrumBounds {
  std::size_t lower = 0;  // distinct values realised by the restricted construction
  std::size_t upper = 0;
};

struct ExampleBundle {
  std::string name;
  GroupAction action;
  Lattice ambient;
  std::optional<ExpectedRates> expected;
  std::optional<SpectrumBounds> spectrum_bounds;
  /// Weight of directions that live outside the lattice (the cyclic factor of
  /// a semidirect product); added to sigma in dimension and spectrum formulas.
  Fraction extra_weight = 0;
  /// Block sizes of the Eisenstein blocks, when the example is built from them.
  std::vector<int> blocks;
};

inline constexpr int kDefaultImax = 64;
inline constexpr int kDefaultPrecision = kDefaultImax + 2;

namespace detail {

/// Multiplication by pi on o = Z_p[pi], pi^e = p, in the basis 1, pi, ..., pi^{e-1}.
inline PadicMatrix pi_matrix(const Context& ctx, int e) {
  const auto n = static_cast<std::size_t>(e);
  PadicMatrix m(ctx, n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) m.set(k, k + 1, 1);
  m.set(n - 1, 0, ctx->prime());
  return m;
}

inline PadicMatrix power(const PadicMatrix& m, int k) {
  auto out = PadicMatrix::identity(m.context(), m.rows());
  for (int j = 0; j < k; ++j) out = out * m;
  return out;
}

/// 1 + pi^a on o.
inline PadicMatrix one_plus_pi(const Context& ctx, int e, int a) {
  return PadicMatrix::identity(ctx, static_cast<std::size_t>(e)) + power(pi_matrix(ctx, e), a);
}

/// Places `blocks[i][j]` (each b x b) into a (n*b) x (n*b) matrix.
inline PadicMatrix assemble(const Context& ctx, const std::vector<std::vector<PadicMatrix>>& blocks, std::size_t b) {
  const std::size_t n = blocks.size();
  PadicMatrix m(ctx, n * b, n * b);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < b; ++r)
        for (std::size_t c = 0; c < b; ++c) m.set(i * b + r, j * b + c, blocks[i][j](r, c));
  return m;
}

inline PadicMatrix block_diagonal(const Context& ctx, const std::vector<PadicMatrix>& blocks) {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.rows();
  PadicMatrix m(ctx, d, d);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) m.set(off + r, off + c, b(r, c));
    off += b.rows();
  }
  return m;
}

inline std::vector<Fraction> repeated(const Fraction& q, int count) { return std::vector<Fraction>(count, q); }

inline constexpr int kFirstPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

}  // namespace detail

/// o^4 with o = Z_p[pi], pi^4 = p, and four generators: diag(1+pi, 1, 1, 1),
/// x1 -> x1 + x2, diag(1, 1, 1+pi^2, 1) and x3 -> x3 + x4 (right action).
/// Z_p-coordinate 4(i-1)+k holds the pi^k component of x_i.
inline ExampleBundle build_remark_module(unsigned long p, int precision = kDefaultPrecision) {
  auto ctx = PadicContext::make(p, precision);
  const auto one = PadicMatrix::identity(ctx, 4), zero = PadicMatrix(ctx, 4, 4);
  std::vector<std::vector<PadicMatrix>> unit(4, std::vector<PadicMatrix>(4, zero));
  for (std::size_t i = 0; i < 4; ++i) unit[i][i] = one;
  auto g1 = unit, g2 = unit, g3 = unit, g4 = unit;
  g1[0][0] = detail::one_plus_pi(ctx, 4, 1);
  g2[0][1] = one;
  g3[2][2] = detail::one_plus_pi(ctx, 4, 2);
  g4[2][3] = one;
  std::vector<PadicMatrix> gens{detail::assemble(ctx, g1, 4), detail::assemble(ctx, g2, 4),
                                detail::assemble(ctx, g3, 4), detail::assemble(ctx, g4, 4)};
  auto rates = detail::repeated(make_fraction(1, 4), 8);
  auto halves = detail::repeated(make_fraction(1, 2), 8);
  rates.insert(rates.end(), halves.begin(), halves.end());
  return {"remark27",
          GroupAction::make(ctx, 16, std::move(gens)),
          Lattice::ambient(ctx, 16),
          ExpectedRates{std::move(rates), "reference-example"},
          std::nullopt,
          0,
          {4, 4, 4, 4}};
}

/// Coordinates of the common fixed space o x2 + o x4 of the remark module.
inline std::vector<std::size_t> remark_fixed_coordinates() { return {4, 5, 6, 7, 12, 13, 14, 15}; }

/// Direct sum of Eisenstein blocks o_j = Z_p[pi_j], pi_j^{q_j} = p, for the
/// first m primes q_j, with one generator acting as 1 + pi_j on each block.
/// The cyclic factor of the semidirect product is recorded as extra weight 1.
inline ExampleBundle build_Gm_lattice(int m, unsigned long p, int precision = kDefaultPrecision) {
  if (m < 1 || m > 10) throw InvalidInput("Gm needs 1 <= m <= 10");
  auto ctx = PadicContext::make(p, precision);
  std::vector<PadicMatrix> blocks;
  std::vector<int> qs;
  std::vector<Fraction> rates;
  std::size_t d = 0;
  std::size_t restricted = 1, upper = 2;
  for (int j = 0; j < m; ++j) {
    const int q = detail::kFirstPrimes[j];
    qs.push_back(q);
    blocks.push_back(detail::one_plus_pi(ctx, q, 1));
    d += static_cast<std::size_t>(q);
    restricted *= static_cast<std::size_t>(q);
    upper *= static_cast<std::size_t>(q + 1);
  }
  // Blocks with larger q have smaller rate; list rates ascending.
  for (int j = m - 1; j >= 0; --j) {
    auto r = detail::repeated(make_fraction(1, qs[static_cast<std::size_t>(j)]), qs[static_cast<std::size_t>(j)]);
    rates.insert(rates.end(), r.begin(), r.end());
  }
  std::vector<PadicMatrix> gens{detail::block_diagonal(ctx, blocks)};
  return {"Gm" + std::to_string(m),
          GroupAction::make(ctx, d, std::move(gens)),
          Lattice::ambient(ctx, d),
          ExpectedRates{std::move(rates), "reference-example"},
          SpectrumBounds{restricted, upper},
          1,
          qs};
}

/// o = Z_p[pi], pi^e = p, with the single generator 1 + pi.
inline ExampleBundle build_eisenstein(int e, unsigned long p, int precision = kDefaultPrecision) {
  if (e < 1) throw InvalidInput("Eisenstein degree must be positive");
  auto ctx = PadicContext::make(p, precision);
  std::vector<PadicMatrix> gens{detail::one_plus_pi(ctx, e, 1)};
  return {"eisenstein" + std::to_string(e),
          GroupAction::make(ctx, static_cast<std::size_t>(e), std::move(gens)),
          Lattice::ambient(ctx, static_cast<std::size_t>(e)),
          ExpectedRates{detail::repeated(make_fraction(1, e), e), "derived"},
          std::nullopt,
          0,
          {e}};
}

/// Identity action on Z_p^d: lambda_i = p^i L.
inline ExampleBundle build_trivial(std::size_t d, unsigned long p, int precision = kDefaultPrecision) {
  auto ctx = PadicContext::make(p, precision);
  return {"trivial",
          GroupAction::make(ctx, d, {PadicMatrix::identity(ctx, d)}),
          Lattice::ambient(ctx, d),
          ExpectedRates{detail::repeated(Fraction(1), static_cast<int>(d)), "immediate"},
          std::nullopt,
          0,
          {}};
}

/// x1 -> x1 + x2, x2 -> x2 on Z_p^2.
inline ExampleBundle build_unipotent2(unsigned long p, int precision = kDefaultPrecision) {
  auto ctx = PadicContext::make(p, precision);
  return {"unipotent2",
          GroupAction::make(ctx, 2, {PadicMatrix::from_ints(ctx, {{1, 1}, {0, 1}})}),
          Lattice::ambient(ctx, 2),
          ExpectedRates{detail::repeated(Fraction(1), 2), "derived"},
          std::nullopt,
          0,
          {}};
}

enum class BlockKind { Identity, OnePlusPi, Jordan };

struct BlockSpec {
  int size = 1;
  BlockKind kind = BlockKind::Identity;
  int exponent = 1;  // a in 1 + pi^a, pi^size = p
};

/// Block-triangular action: generator 0 is block diagonal with blocks drawn
/// from `blocks`, generator 1 is the identity; both get independent random
/// strictly upper coupling blocks with entries in p Z_p. Deterministic in seed.
inline ExampleBundle random_block_action(const std::vector<BlockSpec>& blocks, std::uint64_t seed, unsigned long p,
                                         int precision = kDefaultPrecision, int max_dim = 8) {
  if (blocks.empty()) throw InvalidShape("no blocks");
  int d = 0;
  for (const auto& b : blocks) {
    if (b.size < 1) throw InvalidShape("block sizes must be positive");
    if (b.kind == BlockKind::OnePlusPi && b.exponent < 1) throw InvalidShape("1 + pi^a needs a >= 1");
    d += b.size;
  }
  if (d > max_dim) throw InvalidShape("total dimension " + std::to_string(d) + " exceeds " + std::to_string(max_dim));
  auto ctx = PadicContext::make(p, precision);
  std::mt19937_64 rng(seed);
  std::vector<PadicMatrix> diag;
  std::vector<int> sizes;
  for (const auto& b : blocks) {
    sizes.push_back(b.size);
    switch (b.kind) {
      case BlockKind::Identity: diag.push_back(PadicMatrix::identity(ctx, static_cast<std::size_t>(b.size))); break;
      case BlockKind::OnePlusPi: diag.push_back(detail::one_plus_pi(ctx, b.size, b.exponent)); break;
      case BlockKind::Jordan: {
        auto j = PadicMatrix::identity(ctx, static_cast<std::size_t>(b.size));
        for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(b.size); ++k) j.set(k, k + 1, 1);
        diag.push_back(j);
        break;
      }
    }
  }
  std::uniform_int_distribution<long> entry(0, 3 * static_cast<long>(p));
  auto coupled = [&](PadicMatrix g) {
    std::size_t row0 = 0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      std::size_t col0 = row0 + static_cast<std::size_t>(blocks[bi].size);
      for (std::size_t bj = bi + 1; bj < blocks.size(); ++bj) {
        for (int r = 0; r < blocks[bi].size; ++r)
          for (int c = 0; c < blocks[bj].size; ++c)
            g.set(row0 + static_cast<std::size_t>(r), col0 + static_cast<std::size_t>(c),
                  Integer(entry(rng)) * static_cast<unsigned long>(p));
        col0 += static_cast<std::size_t>(blocks[bj].size);
      }
      row0 += static_cast<std::size_t>(blocks[bi].size);
    }
    return g;
  };
  const auto dd = static_cast<std::size_t>(d);
  std::vector<PadicMatrix> gens{coupled(detail::block_diagonal(ctx, diag)), coupled(PadicMatrix::identity(ctx, dd))};
  return {"random-" + std::to_string(seed), GroupAction::make(ctx, dd, std::move(gens)), Lattice::ambient(ctx, dd),
          std::nullopt, std::nullopt, 0, std::move(sizes)};
}

/// Seeded block layout of total dimension at most max_dim.
inline std::vector<BlockSpec> random_shape(std::uint64_t seed, int max_dim = 6) {
  if (max_dim < 1) throw InvalidShape("max_dim must be positive");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int d = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_dim));
  std::vector<BlockSpec> out;
  int left = d;
  while (left > 0) {
    BlockSpec b;
    b.size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(left, 4)));
    // Half of the blocks are 1 + pi^a, which carry the non-integral rates.
    switch (rng() % 4) {
      case 0: b.kind = BlockKind::Identity; break;
      case 1: b.kind = BlockKind::Jordan; break;
      default:
        b.kind = BlockKind::OnePlusPi;
        b.exponent = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(b.size));
        break;
    }
    left -= b.size;
    out.push_back(b);
  }
  return out;
}

/// Names accepted by catalog_example.
inline std::vector<std::string> catalog_names() {
  return {"remark27", "Gm1", "Gm2", "Gm3", "eisenstein1", "eisenstein2", "eisenstein3", "eisenstein4",
          "trivial", "unipotent2"};
}

namespace detail {

inline std::optional<int> numeric_suffix(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size() || name.size() > prefix.size() + 3)
    return std::nullopt;
  const auto tail = name.substr(prefix.size());
  if (!std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
  return std::stoi(tail);
}

}  // namespace detail

inline ExampleBundle catalog_example(const std::string& name, unsigned long p, int precision = kDefaultPrecision) {
  if (name == "remark27") return build_remark_module(p, precision);
  if (auto m = detail::numeric_suffix(name, "Gm")) return build_Gm_lattice(*m, p, precision);
  if (auto e = detail::numeric_suffix(name, "eisenstein")) return build_eisenstein(*e, p, precision);
  if (name == "trivial") return build_trivial(3, p, precision);
  if (name == "unipotent2") return build_unipotent2(p, precision);
  throw InvalidInput("unknown catalog example '" + name + "'");
}

}  // namespace pseries
