#pragma once

// Command-line front end: series, stratify, hdim, spectrum and catalog verbs.
// `run` parses arguments and maps library errors onto exit codes:
//   0 ok, 2 precision exhausted, 3 invalid input, 4 algorithmic failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pseries/catalog.hpp"
#include "pseries/hausdorff.hpp"
#include "pseries/io.hpp"
#include "pseries/strata.hpp"

namespace pseries::cli {

inline constexpr const char* kToolName = "pseries";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kPrecision = 2, kInvalid = 3, kFailure = 4 };

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PrecisionExhausted: return kPrecision;
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidShape:
    case ErrorKind::NotInvariant:
    case ErrorKind::NotProP:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::IncompatibleContext:
    case ErrorKind::NotContained: return kInvalid;
    default: return kFailure;
  }
}

struct RunConfig {
  std::string input;    // action JSON or a series report
  std::string catalog;  // catalog name, or "random" with a seed
  unsigned long p = 2;
  std::optional<int> precision;
  int imax = 64;
  int denom_bound = 0;  // 0: default for i_max
  double tolerance = 0.01;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
  std::string subgroup;       // path, "full" or "zero"
  std::vector<int> units;     // 1-based standard basis vectors spanning H
  std::string extra_weight;   // overrides the example's extra weight
  bool lattice_only = false;  // drop the example's extra weight
};

/// Everything a command works on: the action, its lattice, the example
/// bundle when it came from the catalog, and a trace when one was loaded.
struct Problem {
  GroupAction action;
  Lattice lattice;
  std::optional<ExampleBundle> bundle;
  std::optional<SeriesTrace> trace;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline int default_precision(const RunConfig& cfg) { return cfg.precision.value_or(cfg.imax + 2); }

inline ExampleBundle catalog_bundle(const RunConfig& cfg) {
  const int n = default_precision(cfg);
  if (cfg.catalog == "random") return random_block_action(random_shape(cfg.seed), cfg.seed, cfg.p, n);
  return catalog_example(cfg.catalog, cfg.p, n);
}

inline Problem load(const RunConfig& cfg) {
  if (cfg.input.empty() == cfg.catalog.empty()) throw InvalidInput("give exactly one of --input and --catalog");
  if (cfg.imax < 1) throw InvalidInput("--imax must be positive");
  if (!cfg.catalog.empty()) {
    auto ex = catalog_bundle(cfg);
    return {ex.action, ex.ambient, ex, std::nullopt};
  }
  const auto doc = io::parse_json(read_file(cfg.input), cfg.input);
  if (doc.is_object() && doc.value("command", "") == "series" && doc.contains("action") && doc.contains("result")) {
    auto loaded = io::action_from_json(doc["action"]);
    auto tr = io::trace_from_json(doc["result"], loaded.lattice);
    return {loaded.action, loaded.lattice, std::nullopt, std::move(tr)};
  }
  auto loaded = io::action_from_json(doc, cfg.precision);
  return {loaded.action, loaded.lattice, std::nullopt, std::nullopt};
}

inline SeriesTrace trace_for(const RunConfig& cfg, const Problem& pr) {
  if (pr.trace) {
    if (cfg.imax > pr.trace->i_max)
      throw InvalidInput("loaded trace stops at i = " + std::to_string(pr.trace->i_max) + " < --imax");
    if (cfg.imax == pr.trace->i_max) return *pr.trace;
    SeriesTrace tr = *pr.trace;
    tr.terms.erase(tr.terms.begin() + cfg.imax + 1, tr.terms.end());
    tr.profiles.erase(tr.profiles.begin() + cfg.imax + 1, tr.profiles.end());
    tr.i_max = cfg.imax;
    return tr;
  }
  return lower_p_series(pr.lattice, pr.action, cfg.imax);
}

inline StrataOptions strata_options(const RunConfig& cfg, std::size_t d) {
  StrataOptions opt;
  if (cfg.denom_bound != 0) {
    if (cfg.denom_bound < static_cast<int>(d))
      throw InvalidInput("--denom-bound " + std::to_string(cfg.denom_bound) + " is below the dimension " +
                         std::to_string(d));
    opt.denom_bound = cfg.denom_bound;
  }
  return opt;
}

inline Fraction extra_weight(const RunConfig& cfg, const Problem& pr) {
  if (!cfg.extra_weight.empty()) return parse_fraction(cfg.extra_weight);
  if (cfg.lattice_only || !pr.bundle) return 0;
  return pr.bundle->extra_weight;
}

inline io::json report(const std::string& command, const RunConfig& cfg, const Problem& pr) {
  io::json config{{"p", pr.action.prime()},
                  {"N", pr.action.precision()},
                  {"d", pr.action.dim()},
                  {"imax", cfg.imax},
                  {"denom_bound", cfg.denom_bound},
                  {"tolerance", cfg.tolerance},
                  {"seed", cfg.seed}};
  if (!cfg.catalog.empty()) config["catalog"] = cfg.catalog;
  if (!cfg.input.empty()) config["input"] = cfg.input;
  io::json out{{"tool", {{"name", kToolName}, {"version", kVersion}}}, {"command", command}, {"config", std::move(config)}};
  if (pr.bundle) {
    out["example"] = pr.bundle->name;
    out["expected"] = io::expected_to_json(*pr.bundle);
  }
  return out;
}

inline SubgroupSpec subgroup_for(const RunConfig& cfg, const Problem& pr) {
  const auto& ctx = pr.action.context();
  const std::size_t d = pr.action.dim();
  if (!cfg.units.empty()) {
    if (!cfg.subgroup.empty()) throw InvalidInput("give only one of --subgroup and --units");
    Grid g;
    for (int k : cfg.units) {
      if (k < 1 || k > static_cast<int>(d)) throw InvalidInput("unit index " + std::to_string(k) + " out of range");
      Vector e(d, Integer(0));
      e[static_cast<std::size_t>(k - 1)] = 1;
      g.push_back(std::move(e));
    }
    return SubgroupSpec::make(ctx, d, std::move(g));
  }
  if (cfg.subgroup == "full") return SubgroupSpec::full(ctx, d);
  if (cfg.subgroup == "zero") return SubgroupSpec::make(ctx, d, {});
  if (cfg.subgroup.empty()) throw InvalidInput("hdim needs --subgroup (path, full or zero) or --units");
  return io::subgroup_from_json(io::parse_json(read_file(cfg.subgroup), cfg.subgroup), ctx, d);
}

inline void emit(const io::json& doc, std::ostream& os) { os << doc.dump(2) << '\n'; }

}  // namespace detail

inline int cmd_series(const RunConfig& cfg, std::ostream& os) {
  const auto pr = detail::load(cfg);
  const auto tr = detail::trace_for(cfg, pr);
  if (cfg.format == "csv") {
    io::trace_to_csv(tr, os);
    return kOk;
  }
  auto doc = detail::report("series", cfg, pr);
  doc["action"] = io::action_to_json(pr.action, pr.lattice);
  doc["result"] = io::trace_to_json(tr);
  detail::emit(doc, os);
  return kOk;
}

inline int cmd_stratify(const RunConfig& cfg, std::ostream& os) {
  const auto pr = detail::load(cfg);
  const auto tr = detail::trace_for(cfg, pr);
  const auto s = stratify(tr, pr.action, detail::strata_options(cfg, pr.action.dim()));
  if (cfg.format == "csv") {
    io::stratification_to_csv(s, tr, os);
    return kOk;
  }
  auto doc = detail::report("stratify", cfg, pr);
  doc["result"] = io::stratification_to_json(s, tr);
  detail::emit(doc, os);
  return kOk;
}

inline int cmd_hdim(const RunConfig& cfg, std::ostream& os) {
  const auto pr = detail::load(cfg);
  const auto tr = detail::trace_for(cfg, pr);
  const auto s = stratify(tr, pr.action, detail::strata_options(cfg, pr.action.dim()));
  const auto h = detail::subgroup_for(cfg, pr);
  const auto extra = detail::extra_weight(cfg, pr);
  const auto rep = hdim_report(h, tr, s, extra, cfg.tolerance);
  if (cfg.format == "csv") {
    io::dimension_to_csv(rep, os);
    return kOk;
  }
  auto doc = detail::report("hdim", cfg, pr);
  doc["result"] = io::dimension_to_json(rep);
  doc["result"]["rank"] = h.rank();
  doc["result"]["extra_weight"] = io::fraction_to_json(extra);
  doc["result"]["rates"] = io::fractions_to_json(s.rates().rates);
  doc["result"]["status"] = to_string(s.status);
  detail::emit(doc, os);
  return kOk;
}

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& os) {
  const auto pr = detail::load(cfg);
  const auto tr = detail::trace_for(cfg, pr);
  const auto s = stratify(tr, pr.action, detail::strata_options(cfg, pr.action.dim()));
  const auto extra = detail::extra_weight(cfg, pr);
  const auto spec = spectrum(s.rates(), extra);
  if (cfg.format == "csv") {
    io::spectrum_to_csv(spec, os);
    return kOk;
  }
  auto doc = detail::report("spectrum", cfg, pr);
  doc["result"] = io::spectrum_to_json(spec, s.rates(), extra);
  doc["result"]["status"] = to_string(s.status);
  detail::emit(doc, os);
  return kOk;
}

inline int cmd_catalog_list(const RunConfig& cfg, std::ostream& os) {
  io::json list = io::json::array();
  if (cfg.format == "csv") os << "name,d,source\n";
  for (const auto& name : catalog_names()) {
    const auto ex = catalog_example(name, cfg.p, 8);
    const std::string source = ex.expected ? ex.expected->source : "";
    if (cfg.format == "csv") os << name << ',' << ex.ambient.dim() << ',' << source << '\n';
    list.push_back({{"name", name}, {"d", ex.ambient.dim()}, {"expected", io::expected_to_json(ex)}});
  }
  if (cfg.format != "csv") detail::emit({{"examples", std::move(list)}}, os);
  return kOk;
}

inline int cmd_catalog_emit(const RunConfig& cfg, const std::string& name, std::ostream& os) {
  RunConfig c = cfg;
  c.catalog = name;
  const auto ex = detail::catalog_bundle(c);
  detail::emit(io::action_to_json(ex.action, ex.ambient), os);
  return kOk;
}

/// Parses argv and runs one verb. Output goes to `out` (or --out), messages to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower p-series, growth rates and Hausdorff spectra of p-adic lattices", kToolName};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig cfg;
  std::string emit_name;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "action JSON or a series JSON report");
    sub->add_option("--catalog", cfg.catalog, "catalog example name, or 'random' with --seed");
    sub->add_option("--p", cfg.p, "prime for catalog examples")->check(CLI::Range(2UL, 1UL << 31));
    sub->add_option("--precision", cfg.precision, "working precision N (default imax + 2)");
    sub->add_option("--imax", cfg.imax, "last index of the series")->check(CLI::PositiveNumber);
    sub->add_option("--denom-bound", cfg.denom_bound, "denominator bound D for rate fitting");
    sub->add_option("--tolerance", cfg.tolerance, "strong-dimension tolerance");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--seed", cfg.seed, "seed for --catalog random");
  };
  auto* series = app.add_subcommand("series", "compute the lower p-series and its elementary divisors");
  auto* strat = app.add_subcommand("stratify", "growth rates, frame and equivalence constant");
  auto* hdim = app.add_subcommand("hdim", "Hausdorff dimension of a subgroup");
  auto* spec = app.add_subcommand("spectrum", "Hausdorff spectrum from the growth rates");
  auto* catalog = app.add_subcommand("catalog", "built-in examples");
  for (auto* sub : {series, strat, hdim, spec}) add_common(sub);
  for (auto* sub : {hdim, spec}) {
    sub->add_option("--extra-weight", cfg.extra_weight, "weight n/m of a direction outside the lattice");
    sub->add_flag("--lattice-only", cfg.lattice_only, "ignore the example's extra weight");
  }
  hdim->add_option("--subgroup", cfg.subgroup, "subgroup JSON {generators: grid}, or full / zero");
  hdim->add_option("--units", cfg.units, "1-based standard basis vectors spanning the subgroup")->delimiter(',');
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list example names");
  auto* emit_cmd = catalog->add_subcommand("emit", "print an example as action JSON");
  emit_cmd->add_option("name", emit_name, "example name")->required();
  for (auto* sub : {list, emit_cmd}) {
    sub->add_option("--p", cfg.p, "prime")->check(CLI::Range(2UL, 1UL << 31));
    sub->add_option("--precision", cfg.precision, "working precision N");
    sub->add_option("--imax", cfg.imax, "default precision is imax + 2");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--seed", cfg.seed, "seed for 'random'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw InvalidInput("cannot write " + cfg.out);
    }
    std::ostream& os = cfg.out.empty() ? out : file;
    if (*series) return cmd_series(cfg, os);
    if (*strat) return cmd_stratify(cfg, os);
    if (*hdim) return cmd_hdim(cfg, os);
    if (*spec) return cmd_spectrum(cfg, os);
    if (*list) return cmd_catalog_list(cfg, os);
    if (*emit_cmd) return cmd_catalog_emit(cfg, emit_name, os);
    return kInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const io::json::exception& e) {
    err << "error: InvalidInput: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace pseries::cli
