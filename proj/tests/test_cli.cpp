// Runs the built command-line binary and compares with direct library calls.
#include <array>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "hyperblocks/analytics.hpp"
#include "hyperblocks/json_io.hpp"

using namespace hyperblocks;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string("HYPERBLOCKS_WBC='") + testing::wbc_path() + "' '" + HB_CLI_PATH + "' " +
                          args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  r.status = pclose(p);
  return r;
}

Dataset wbc() { return load_csv_file(testing::wbc_path(), CsvSchema::wbc()).dataset; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("cv output equals the library report") {
    const auto r = run("cv --preset wbc --learner hyper --k 3 --variant n2 --folds 10 --seed 7");
    REQUIRE(r.status == 0);
    HyperLearner h;
    h.mhyper.impurity_threshold = 0.0;
    h.learn.k_min = h.learn.k_max = 3;
    h.learn.variant = DistanceVariant::kMean;
    h.learn.seed = 7;
    const auto report = cross_validate(wbc(), h, 10, 7);
    CHECK(parse_json(r.out) == to_json(report));
    CHECK(report.average_accuracy >= 0.94);
  }

  TEST_CASE("id3 cv output equals the library report") {
    const auto r = run("cv --preset wbc --learner id3 --folds 5 --seed 3");
    REQUIRE(r.status == 0);
    CHECK(parse_json(r.out) == to_json(cross_validate(wbc(), Id3Learner{}, 5, 3)));
  }

  TEST_CASE("rules search and evaluation") {
    auto r = run("rules --preset wbc --max-dims 1");
    REQUIRE(r.status == 0);
    CHECK(r.out == "if x2 < 4 then B else M: 635/683 (92.97%)\n");
    r = run("rules --preset wbc --rule \"x6<3\" --then B --else M --json");
    REQUIRE(r.status == 0);
    CHECK(parse_json(r.out)["evaluation"]["correct"] == 623);
  }

  TEST_CASE("convert prints the branch intervals") {
    const auto r = run("convert --branch \"x1>5 & x2<6 & x3>2\" --domain 0:10");
    REQUIRE(r.status == 0);
    CHECK(r.out == "x1: (5, 10]\nx2: [0, 6)\nx3: (2, 10]\n");
  }

  TEST_CASE("export blocks equals discover") {
    const auto r = run("export --preset wbc --what blocks --threshold 0.1");
    REQUIRE(r.status == 0);
    MHyperConfig cfg;
    cfg.impurity_threshold = 0.1;
    CHECK(parse_json(r.out) == to_json(discover(normalize(wbc()), cfg)));
  }

  TEST_CASE("usage errors exit non-zero") {
    CHECK(run("rules --no-such-flag").status != 0);
    CHECK(run("").status != 0);
    CHECK(run("rules --input /nonexistent/file.csv").status != 0);
    CHECK(run("rules --preset wbc --rule \"x99<3\" --then B --else M").status != 0);
  }
}
