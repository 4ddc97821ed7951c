#include "pseries/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pseries;
using io::json;

struct Outcome {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "pseries");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::vector<std::string> strings(const json& j) { return j.get<std::vector<std::string>>(); }

TEST(Cli, SeriesCsvOfTrivialAction) {
  const auto r = run({"series", "--catalog", "trivial", "--imax", "10", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i,m1,m2,m3,log_index");
  int rows = 0;
  while (std::getline(in, line)) {
    const int i = rows++;
    EXPECT_EQ(line, std::to_string(i) + "," + std::to_string(i) + "," + std::to_string(i) + "," + std::to_string(i) +
                        "," + std::to_string(3 * i));
  }
  EXPECT_EQ(rows, 11);
}

TEST(Cli, SeriesJsonCarriesProvenance) {
  const auto r = run({"series", "--catalog", "Gm1", "--imax", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = r.doc();
  EXPECT_EQ(doc["tool"]["name"], "pseries");
  EXPECT_EQ(doc["config"]["N"], 14);
  EXPECT_EQ(doc["expected"]["rates"]["source"], "reference-example");
  EXPECT_EQ(doc["result"]["i_max"], 12);
  EXPECT_EQ(doc["result"]["rows"].size(), 13u);
}

TEST(Cli, StratifyCatalog) {
  auto r = run({"stratify", "--catalog", "Gm2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(strings(r.doc()["result"]["rates"]), (std::vector<std::string>{"1/3", "1/3", "1/3", "1/2", "1/2"}));
  EXPECT_TRUE(r.doc()["result"]["envelope"]["holds"].get<bool>());

  r = run({"stratify", "--catalog", "eisenstein2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(strings(r.doc()["result"]["rates"]), (std::vector<std::string>{"1/2", "1/2"}));

  r = run({"stratify", "--catalog", "trivial", "--imax", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(strings(r.doc()["result"]["rates"]), (std::vector<std::string>{"1", "1", "1"}));
  EXPECT_EQ(r.doc()["result"]["c"], 0);
}

TEST(Cli, StratifyCsvPredictsEveryRow) {
  const auto r = run({"stratify", "--catalog", "unipotent2", "--imax", "20", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i,m1,m2,pred1,pred2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 20);
}

TEST(Cli, HdimOfBlockSubgroup) {
  const auto r = run({"hdim", "--catalog", "Gm2", "--units", "1,3,4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = r.doc()["result"];
  EXPECT_EQ(res["exact"], "7/18");
  EXPECT_EQ(res["rank"], 3);
  EXPECT_EQ(res["extra_weight"], "1");

  const auto lattice = run({"hdim", "--catalog", "Gm2", "--units", "1,3,4", "--lattice-only"});
  ASSERT_EQ(lattice.code, 0) << lattice.err;
  EXPECT_EQ(lattice.doc()["result"]["exact"], "7/12");
}

TEST(Cli, HdimFullZeroAndFile) {
  auto r = run({"hdim", "--catalog", "eisenstein3", "--subgroup", "full"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["result"]["exact"], "1");
  r = run({"hdim", "--catalog", "eisenstein3", "--subgroup", "zero"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["result"]["exact"], "0");

  const auto path = temp_path("subgroup.json");
  write_file(path, R"({"generators": [[0, 0, 1]]})");
  r = run({"hdim", "--catalog", "trivial", "--imax", "12", "--subgroup", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["result"]["exact"], "1/3");
}

TEST(Cli, Spectrum) {
  auto r = run({"spectrum", "--catalog", "trivial", "--imax", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(strings(r.doc()["result"]["values"]), (std::vector<std::string>{"0", "1/3", "2/3", "1"}));

  r = run({"spectrum", "--catalog", "Gm2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["result"]["values"].size(), 17u);
  r = run({"spectrum", "--catalog", "Gm2", "--lattice-only", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 11);
}

TEST(Cli, SeriesJsonRoundTrip) {
  for (const std::string name : {"eisenstein2", "Gm1", "unipotent2"}) {
    const auto path = temp_path("series_" + name + ".json");
    const auto s = run({"series", "--catalog", name, "--imax", "40", "--out", path});
    ASSERT_EQ(s.code, 0) << s.err;
    const auto from_file = run({"stratify", "--input", path, "--imax", "40"});
    const auto direct = run({"stratify", "--catalog", name, "--imax", "40"});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    ASSERT_EQ(direct.code, 0) << direct.err;
    EXPECT_EQ(from_file.doc()["result"], direct.doc()["result"]) << name;

    // A shorter horizon reuses the stored prefix.
    const auto shorter = run({"series", "--input", path, "--imax", "20"});
    const auto direct_short = run({"series", "--catalog", name, "--imax", "20", "--precision", "42"});
    ASSERT_EQ(shorter.code, 0) << shorter.err;
    EXPECT_EQ(shorter.doc()["result"]["rows"], direct_short.doc()["result"]["rows"]);
  }
}

TEST(Cli, ActionFileWithSublattice) {
  const auto emitted = run({"catalog", "emit", "eisenstein2", "--precision", "35"});
  ASSERT_EQ(emitted.code, 0) << emitted.err;
  auto doc = emitted.doc();
  doc["lattice"] = json::array({json::array({2, 0}), json::array({0, 2})});
  const auto path = temp_path("scaled.json");
  write_file(path, doc.dump());
  const auto r = run({"stratify", "--input", path, "--imax", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(strings(r.doc()["result"]["rates"]), (std::vector<std::string>{"1/2", "1/2"}));
}

TEST(Cli, CatalogList) {
  const auto r = run({"catalog", "list"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["examples"].size(), catalog_names().size());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"series", "--catalog", "trivial", "--imax", "10", "--precision", "5"}).code, 2);
  EXPECT_EQ(run({"series", "--catalog", "nonesuch"}).code, 3);
  EXPECT_EQ(run({"stratify", "--catalog", "trivial", "--denom-bound", "2"}).code, 3);
  EXPECT_EQ(run({"stratify"}).code, 3);
  EXPECT_EQ(run({"stratify", "--catalog", "trivial", "--format", "xml"}).code, 3);
  EXPECT_EQ(run({"hdim", "--catalog", "trivial"}).code, 3);
  EXPECT_EQ(run({"hdim", "--catalog", "trivial", "--units", "1,1"}).code, 4);

  const auto bad = temp_path("bad.json");
  write_file(bad, "{ not json");
  const auto r = run({"stratify", "--input", bad});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("InvalidInput"), std::string::npos);

  // Lattice 2Z + Z is not stable under the swap.
  const auto swap = temp_path("swap.json");
  write_file(swap, R"({"p": 2, "N": 20, "d": 2, "generators": [[[0, 1], [1, 0]]], "lattice": [[2, 0], [0, 1]]})");
  EXPECT_EQ(run({"series", "--input", swap, "--imax", "8"}).code, 3);

  // A tampered profile no longer matches the recomputed terms.
  const auto series = temp_path("tampered.json");
  const auto s = run({"series", "--catalog", "Gm1", "--imax", "10"});
  auto doc = s.doc();
  doc["result"]["rows"][5]["m"][0] = 99;
  write_file(series, doc.dump());
  EXPECT_EQ(run({"stratify", "--input", series, "--imax", "10"}).code, 3);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(cli::kVersion), std::string::npos);
}

}  // namespace
