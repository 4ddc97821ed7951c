#pragma once

// JSON and CSV serialisation of lattices, actions, traces, stratifications,
// dimension reports and spectra. Integers that fit in 64 bits are written as
// JSON numbers, larger residues as decimal strings; both are accepted on load.

#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseries/catalog.hpp"
#include "pseries/hausdorff.hpp"
#include "pseries/strata.hpp"

namespace pseries::io {

using json = nlohmann::json;

inline json integer_to_json(const Integer& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_number_unsigned()) return Integer(j.get<unsigned long>());
  if (j.is_string()) {
    Integer x;
    if (x.set_str(j.get<std::string>(), 10) != 0) throw InvalidInput("not an integer: \"" + j.get<std::string>() + "\"");
    return x;
  }
  throw InvalidInput("expected an integer, got " + j.dump());
}

inline json grid_to_json(const Grid& g) {
  json out = json::array();
  for (const auto& row : g) {
    json r = json::array();
    for (const auto& x : row) r.push_back(integer_to_json(x));
    out.push_back(std::move(r));
  }
  return out;
}

inline Grid grid_from_json(const json& j, std::size_t cols, const PadicContext& ctx) {
  if (!j.is_array()) throw InvalidInput("expected a grid (array of rows)");
  Grid g;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols)
      throw InvalidInput("grid row must have " + std::to_string(cols) + " entries");
    Vector v;
    for (const auto& x : row) {
      v.push_back(integer_from_json(x));
      ctx.reduce(v.back());
    }
    g.push_back(std::move(v));
  }
  return g;
}

inline json fraction_to_json(const Fraction& q) { return format_fraction(q); }

inline json fractions_to_json(const std::vector<Fraction>& qs) {
  json out = json::array();
  for (const auto& q : qs) out.push_back(fraction_to_json(q));
  return out;
}

inline std::vector<Fraction> fractions_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected a list of fractions");
  std::vector<Fraction> out;
  for (const auto& x : j) {
    if (x.is_string()) out.push_back(parse_fraction(x.get<std::string>()));
    else if (x.is_number_integer()) out.push_back(Fraction(x.get<long>()));
    else throw InvalidInput("expected a fraction \"n/m\", got " + x.dump());
  }
  return out;
}

/// {p, N, d}: shared header of every document.
struct Header {
  unsigned long p = 0;
  int precision = 0;
  std::size_t d = 0;
};

inline Header header_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("expected a JSON object");
  for (const char* key : {"p", "N", "d"})
    if (!j.contains(key) || !j[key].is_number_integer()) throw InvalidInput(std::string("missing integer field \"") + key + "\"");
  const long p = j["p"].get<long>(), n = j["N"].get<long>(), d = j["d"].get<long>();
  if (p < 2 || n < 1 || d < 1) throw InvalidInput("need p >= 2, N >= 1, d >= 1");
  return {static_cast<unsigned long>(p), static_cast<int>(n), static_cast<std::size_t>(d)};
}

inline json lattice_to_json(const Lattice& l) {
  return {{"p", l.prime()}, {"N", l.precision()}, {"d", l.dim()}, {"basis", grid_to_json(l.basis())}};
}

/// Loads and canonicalises; `ctx` overrides the ring of the document when given.
inline Lattice lattice_from_json(const json& j, Context ctx = nullptr) {
  const auto h = header_from_json(j);
  if (!ctx) ctx = PadicContext::make(h.p, h.precision);
  if (ctx->prime() != h.p) throw IncompatibleContext("lattice over p = " + std::to_string(h.p));
  if (!j.contains("basis")) throw InvalidInput("missing field \"basis\"");
  return Lattice::from_generators(ctx, h.d, grid_from_json(j["basis"], h.d, *ctx));
}

inline json action_to_json(const GroupAction& a, const std::optional<Lattice>& ambient = std::nullopt) {
  json gens = json::array();
  for (const auto& g : a.generators()) gens.push_back(grid_to_json(g.grid()));
  json out{{"p", a.prime()}, {"N", a.precision()}, {"d", a.dim()}, {"generators", std::move(gens)}};
  if (ambient && !ambient->is_ambient()) out["lattice"] = grid_to_json(ambient->basis());
  return out;
}

struct LoadedAction {
  GroupAction action;
  Lattice lattice;
};

/// {p, N, d, generators: [grid, ...], lattice?: grid}; `precision` overrides N.
inline LoadedAction action_from_json(const json& j, std::optional<int> precision = std::nullopt) {
  const auto h = header_from_json(j);
  auto ctx = PadicContext::make(h.p, precision.value_or(h.precision));
  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
    throw InvalidInput("missing or empty field \"generators\"");
  std::vector<PadicMatrix> gens;
  for (const auto& g : j["generators"]) {
    auto grid = grid_from_json(g, h.d, *ctx);
    if (grid.size() != h.d) throw InvalidInput("generator must have " + std::to_string(h.d) + " rows");
    gens.emplace_back(ctx, grid);
  }
  auto lattice = j.contains("lattice") ? Lattice::from_generators(ctx, h.d, grid_from_json(j["lattice"], h.d, *ctx))
                                       : Lattice::ambient(ctx, h.d);
  return {GroupAction::make(ctx, h.d, std::move(gens)), std::move(lattice)};
}

inline json expected_to_json(const ExampleBundle& ex) {
  json out = json::object();
  if (ex.expected) out["rates"] = {{"values", fractions_to_json(ex.expected->rates)}, {"source", ex.expected->source}};
  if (ex.spectrum_bounds) out["spectrum_bounds"] = {{"lower", ex.spectrum_bounds->lower}, {"upper", ex.spectrum_bounds->upper}};
  if (ex.extra_weight != 0) out["extra_weight"] = fraction_to_json(ex.extra_weight);
  return out;
}

/// Rows (i, m_{i,1}, ..., m_{i,d}, log_index) for i = 0..i_max.
inline void trace_to_csv(const SeriesTrace& tr, std::ostream& os) {
  os << "i";
  for (std::size_t k = 1; k <= tr.dim(); ++k) os << ",m" << k;
  os << ",log_index\n";
  for (int i = 0; i <= tr.i_max; ++i) {
    os << i;
    for (int m : tr.profiles[static_cast<std::size_t>(i)]) os << ',' << m;
    os << ',' << tr.log_index(i) << '\n';
  }
}

/// Profiles plus the term bases, so the trace can be reloaded without recomputation.
inline json trace_to_json(const SeriesTrace& tr) {
  json rows = json::array();
  for (int i = 0; i <= tr.i_max; ++i) {
    const auto& prof = tr.profiles[static_cast<std::size_t>(i)];
    rows.push_back({{"i", i},
                    {"m", prof},
                    {"log_index", tr.log_index(i)},
                    {"basis", grid_to_json(tr.terms[static_cast<std::size_t>(i)].basis())}});
  }
  return {{"p", tr.ambient.prime()},
          {"N", tr.precision},
          {"d", tr.dim()},
          {"i_max", tr.i_max},
          {"saturated_steps", tr.saturated_steps},
          {"rows", std::move(rows)}};
}

inline SeriesTrace trace_from_json(const json& j, const Lattice& ambient) {
  const auto h = header_from_json(j);
  const auto& ctx = ambient.context();
  if (h.p != ctx->prime() || h.precision != ctx->precision() || h.d != ambient.dim())
    throw IncompatibleContext("trace and action disagree on p, N or d");
  if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].empty()) throw InvalidInput("trace has no rows");
  SeriesTrace tr{ambient, {}, {}, 0, h.precision, j.value("saturated_steps", 0)};
  for (const auto& row : j["rows"]) {
    if (row.at("i").get<int>() != static_cast<int>(tr.terms.size())) throw InvalidInput("trace rows must run i = 0, 1, ...");
    auto lam = Lattice::from_generators(ctx, h.d, grid_from_json(row.at("basis"), h.d, *ctx));
    tr.profiles.push_back(divisor_profile(lam, ambient));
    if (row.contains("m") && row["m"].get<std::vector<int>>() != tr.profiles.back())
      throw InvalidInput("trace row " + std::to_string(tr.terms.size()) + ": profile does not match its basis");
    tr.terms.push_back(std::move(lam));
  }
  if (!(tr.terms.front() == ambient)) throw InvalidInput("trace must start at the ambient lattice");
  tr.i_max = static_cast<int>(tr.terms.size()) - 1;
  return tr;
}

/// The frame is written as the matrix X whose columns are x_1, ..., x_d.
inline json stratification_to_json(const Stratification& s, const SeriesTrace& trace) {
  json depths = json::array();
  for (const auto& b : s.boundary_depths) depths.push_back(b ? json(*b) : json(nullptr));
  const auto frame_rows = s.frame();
  const long dev = envelope_deviation(trace, s);
  const long bound = static_cast<long>(s.dim()) * (s.c + 1);
  json out{{"rates", fractions_to_json(s.rates().rates)},
           {"sigma", fraction_to_json(s.rates().sigma)},
           {"c", s.c},
           {"window", {s.window_lo, s.window_hi}},
           {"status", to_string(s.status)},
           {"frame", grid_to_json(frame_rows.transpose().grid())},
           {"anchor", s.anchor},
           {"boundary_depths", std::move(depths)},
           {"envelope", {{"max_deviation", dev}, {"bound", bound}, {"holds", dev <= bound}}}};
  if (s.cycle) out["cycle"] = {{"j", s.cycle->j}, {"m", s.cycle->m}, {"n", s.cycle->n}};
  return out;
}

/// Rows (i, observed m_{i,k}, predicted floor(i xi_k)) over the trace.
inline void stratification_to_csv(const Stratification& s, const SeriesTrace& trace, std::ostream& os) {
  os << "i";
  for (std::size_t k = 1; k <= s.dim(); ++k) os << ",m" << k;
  for (std::size_t k = 1; k <= s.dim(); ++k) os << ",pred" << k;
  os << '\n';
  for (int i = 1; i <= trace.i_max; ++i) {
    os << i;
    for (int m : trace.profiles[static_cast<std::size_t>(i)]) os << ',' << m;
    for (long e : s.exponents(i)) os << ',' << e;
    os << '\n';
  }
}

inline std::string decimal(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

inline json dimension_to_json(const DimensionReport& rep) {
  json points = json::array();
  for (const auto& pt : rep.points)
    points.push_back({{"i", pt.i}, {"numerator", pt.numerator}, {"denominator", pt.denominator}, {"quotient", pt.quotient()}});
  json out{{"pivots", rep.pivots},
           {"strong", rep.strong},
           {"tail_spread", rep.tail_spread},
           {"tolerance", rep.tolerance},
           {"final_quotient", rep.final_quotient()},
           {"points", std::move(points)}};
  out["exact"] = rep.exact ? fraction_to_json(*rep.exact) : json(nullptr);
  if (rep.exact) out["exact_decimal"] = to_double(*rep.exact);
  return out;
}

inline void dimension_to_csv(const DimensionReport& rep, std::ostream& os) {
  os << "i,numerator,denominator,quotient\n";
  for (const auto& pt : rep.points)
    os << pt.i << ',' << pt.numerator << ',' << pt.denominator << ',' << decimal(pt.quotient()) << '\n';
}

inline json spectrum_to_json(const std::vector<Fraction>& spec, const RateVector& rates, const Fraction& extra_weight) {
  json decimals = json::array();
  for (const auto& q : spec) decimals.push_back(to_double(q));
  return {{"rates", fractions_to_json(rates.rates)},
          {"extra_weight", fraction_to_json(extra_weight)},
          {"sigma", fraction_to_json(rates.sigma + extra_weight)},
          {"size", spec.size()},
          {"values", fractions_to_json(spec)},
          {"decimals", std::move(decimals)}};
}

inline void spectrum_to_csv(const std::vector<Fraction>& spec, std::ostream& os) {
  os << "value,decimal\n";
  for (const auto& q : spec) os << format_fraction(q) << ',' << decimal(to_double(q)) << '\n';
}

/// {generators: grid} with optional {p, N, d} that must match the action.
inline SubgroupSpec subgroup_from_json(const json& j, const Context& ctx, std::size_t d) {
  if (!j.is_object() || !j.contains("generators")) throw InvalidInput("subgroup document needs \"generators\"");
  if (j.contains("p") && j["p"].get<unsigned long>() != ctx->prime()) throw IncompatibleContext("subgroup over a different prime");
  if (j.contains("d") && j["d"].get<std::size_t>() != d) throw DimensionMismatch("subgroup dimension differs from the action");
  return SubgroupSpec::make(ctx, d, grid_from_json(j["generators"], d, *ctx));
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

}  // namespace pseries::io
