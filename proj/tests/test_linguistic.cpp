#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "hyperblocks/error.hpp"
#include "hyperblocks/linguistic.hpp"

using namespace hyperblocks;

TEST_SUITE("linguistic") {
  TEST_CASE("total concentration in the lower third") {
    std::vector<std::vector<double>> pts{{0.0}, {0.1}, {0.3}};
    for (double t : {0.51, 0.75, 1.0}) {
      const auto d = describe(pts, {"X3"}, t);
      CHECK(d.coordinates[0].third == Third::kLower);
      CHECK(d.sentences == std::vector<std::string>{"Coordinate X3 is concentrated in the lower third."});
    }
  }

  TEST_CASE("coordinates in the same third are merged") {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({i == 0 ? 0.1 : 0.9, i == 1 ? 0.5 : 0.95, 0.5});
    const auto d = describe(pts, {"X1", "X2", "X3"}, 0.8);
    REQUIRE(d.groups.size() == 2);
    CHECK(d.groups[0].third == Third::kMiddle);
    CHECK(d.groups[1].third == Third::kUpper);
    CHECK(d.groups[1].coordinates == std::vector<std::size_t>{0, 1});
    CHECK(d.sentences[1] == "Coordinates X1, X2 are concentrated in the upper third.");
  }

  TEST_CASE("uniform values are spread") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> pts(300);
    for (auto& p : pts) p = {u(rng)};
    const auto d = describe(pts, {"X4"}, 0.8);
    CHECK(d.coordinates[0].third == Third::kSpread);
    CHECK(d.sentences == std::vector<std::string>{"Coordinate X4 is spread across its range."});
  }

  TEST_CASE("fractions sum to one with boundary values counted once") {
    const auto d = describe({{0.0}, {1.0 / 3.0}, {2.0 / 3.0}, {1.0}}, {"X1"}, 0.75);
    const auto& f = d.coordinates[0].fractions;
    CHECK(f[0] == 0.25);
    CHECK(f[1] == 0.25);
    CHECK(f[2] == 0.5);
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(describe({}, {"X1"}, 0.75), Error);
    CHECK_THROWS_AS(describe({{0.1}}, {"X1"}, 0.5), Error);
    CHECK_THROWS_AS(describe({{0.1}}, {"X1"}, 1.1), Error);
    CHECK_THROWS_AS(describe({{0.1, 0.2}}, {"X1"}, 0.8), Error);
  }

  TEST_CASE("WBC classes read differently") {
    const auto nd = normalize(load_csv_file(testing::wbc_path(), CsvSchema::wbc()).dataset);
    const auto b = describe_class(nd.data, "B");
    const auto m = describe_class(nd.data, "M");
    CHECK(b.sentences != m.sentences);
    CHECK(b.subject == "class B");
    CHECK(b.coordinates[5].third == Third::kLower);
    CHECK(m.coordinates[5].third != Third::kLower);
    CHECK_THROWS_AS(describe_class(nd.data, "Z"), Error);
    const auto all = describe_dataset(nd.data);
    CHECK_FALSE(all.sentences.empty());
  }
}
