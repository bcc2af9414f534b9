#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hyperblocks/classifier.hpp"
#include "hyperblocks/error.hpp"

using namespace hyperblocks;
using testing::box;
using testing::make_dataset;

namespace {

HyperModel model_of(const std::vector<HyperBlock>& blocks, const Dataset& d, std::size_t k) {
  HBModel hm;
  hm.blocks = blocks;
  NormalizedDataset nd{d, std::vector<CoordinateRange>(d.dimension(), CoordinateRange{0, 1})};
  return make_model(hm, nd, k, DistanceVariant::kCenter, {"M", "B"});
}

}  // namespace

TEST_SUITE("classifier") {
  TEST_CASE("distance variants") {
    const auto d = make_dataset({{{0.0, 0.0}, "A"}, {{1.0, 1.0}, "A"}});
    const auto hb = make_block(box({{0, 1}, {0, 1}}), d);
    const std::vector<double> x{0.5, 0.9}, origin{0.0, 0.0};
    CHECK(distance_to_hb(x, hb, DistanceVariant::kCenter, d) == doctest::Approx(0.4));
    CHECK(distance_to_hb(origin, hb, DistanceVariant::kNearest, d) == 0.0);
    CHECK(distance_to_hb(origin, hb, DistanceVariant::kMean, d) == doctest::Approx(std::sqrt(0.5)));
    const auto empty = testing::bare_block(box({{0, 1}, {0, 1}}));
    CHECK_THROWS_AS(distance_to_hb(origin, empty, DistanceVariant::kMean, d), Error);
    CHECK_THROWS_AS(distance_to_hb(std::vector<double>{0.0}, hb, DistanceVariant::kCenter, d), Error);
    CHECK(distance_variant_from_string("N3") == DistanceVariant::kNearest);
    CHECK_THROWS_AS(distance_variant_from_string("n4"), Error);
  }

  TEST_CASE("R1 inside a pure block") {
    const auto d = make_dataset({{{0.1, 0.1}, "B"}, {{0.2, 0.2}, "B"}, {{0.9, 0.9}, "M"}});
    const auto m = model_of({make_block(box({{0.1, 0.2}, {0.1, 0.2}}), d),
                             make_block(box({{0.9, 0.9}, {0.9, 0.9}}), d)},
                            d, 1);
    const auto c = classify(std::vector<double>{0.15, 0.15}, m);
    CHECK(c.outcome == std::optional<std::string>("B"));
    CHECK(c.rule == RuleFired::kR1);
  }

  TEST_CASE("tied mixed block goes to the class priority head") {
    const auto d = make_dataset({{{0.1}, "B"}, {{0.2}, "M"}, {{0.9}, "B"}});
    const auto m = model_of({make_block(box({{0.1, 0.2}}), d), make_block(box({{0.9, 0.9}}), d)}, d, 1);
    const auto c = classify(std::vector<double>{0.15}, m);
    CHECK(c.outcome == std::optional<std::string>("M"));
    CHECK(c.rule == RuleFired::kR1);
  }

  TEST_CASE("R1 conflicts prefer purer, then larger blocks") {
    const auto d = make_dataset({{{0.1}, "B"}, {{0.2}, "B"}, {{0.3}, "M"}, {{0.4}, "M"}, {{0.45}, "M"},
                                 {{0.5}, "B"}});
    const auto mixed = make_block(box({{0.1, 0.5}}), d);  // 3B 3M
    const auto pure_m = make_block(box({{0.3, 0.45}}), d);
    const auto m = model_of({mixed, pure_m}, d, 1);
    const auto c = classify(std::vector<double>{0.4}, m);
    CHECK(c.outcome == std::optional<std::string>("M"));
    CHECK(c.evidence.front().block_index == 1);
    CHECK(c.evidence.size() == 2);
  }

  TEST_CASE("R3 majority of three") {
    const auto d = make_dataset({{{0.10}, "B"}, {{0.12}, "B"}, {{0.14}, "M"}, {{0.9}, "M"}});
    std::vector<HyperBlock> blocks = {make_block(box({{0.10, 0.10}}), d), make_block(box({{0.12, 0.12}}), d),
                                      make_block(box({{0.14, 0.14}}), d), make_block(box({{0.9, 0.9}}), d)};
    const auto c = classify(std::vector<double>{0.3}, model_of(blocks, d, 3));
    CHECK(c.outcome == std::optional<std::string>("B"));
    CHECK(c.rule == RuleFired::kR3);
    CHECK(c.evidence.size() == 3);
  }

  TEST_CASE("R2 nearest block and vote ties") {
    const auto d = make_dataset({{{0.25}, "B"}, {{0.75}, "M"}});
    std::vector<HyperBlock> blocks = {make_block(box({{0.25, 0.25}}), d), make_block(box({{0.75, 0.75}}), d)};
    auto c = classify(std::vector<double>{0.3}, model_of(blocks, d, 1));
    CHECK(c.outcome == std::optional<std::string>("B"));
    CHECK(c.rule == RuleFired::kR2);
    c = classify(std::vector<double>{0.7}, model_of(blocks, d, 2));
    CHECK(c.outcome == std::optional<std::string>("M"));
    CHECK(c.rule == RuleFired::kR2);
    c = classify(std::vector<double>{0.5}, model_of(blocks, d, 2));
    CHECK(c.outcome == std::optional<std::string>("M"));
  }

  TEST_CASE("refusal when too few blocks are near") {
    const auto d = make_dataset({{{0.1}, "B"}, {{0.9}, "M"}});
    std::vector<HyperBlock> blocks = {make_block(box({{0.1, 0.1}}), d), make_block(box({{0.9, 0.9}}), d)};
    auto m = model_of(blocks, d, 3);
    auto c = classify(std::vector<double>{0.5}, m);
    CHECK(c.refused());
    CHECK(c.rule == RuleFired::kRefusal);
    m = model_of(blocks, d, 1);
    m.vicinity_radius = 0.05;
    CHECK(classify(std::vector<double>{0.5}, m).refused());
    CHECK_THROWS_AS(classify(std::vector<double>{0.5, 0.5}, m), Error);
  }

  TEST_CASE("separable clusters learn two pure blocks and the smallest k") {
    std::vector<testing::Row> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({{0.01 * i, 0.02 * i}, "A"});
    for (int i = 0; i < 10; ++i) rows.push_back({{0.9 + 0.01 * i, 0.8 + 0.02 * i}, "B"});
    const auto nd = normalize(make_dataset(rows));
    LearnConfig fixed_cfg;
    fixed_cfg.k_min = fixed_cfg.k_max = 1;
    CHECK(learn(nd, {}, fixed_cfg).hb_model.blocks.size() == 2);
    const auto m = learn(nd, {}, LearnConfig{});
    CHECK(m.hb_model.blocks.size() == 2);
    CHECK(m.k == 1);
    for (const auto& s : m.k_scores) {
      if (s.k <= m.hb_model.blocks.size()) CHECK(s.accuracy == 1.0);
    }
  }

  TEST_CASE("selected k matches an independent re-scoring") {
    const auto d = load_csv_file(testing::wbc_path(), CsvSchema::wbc()).dataset;
    const auto nd = normalize(d);
    const auto folds = stratified_folds(nd.data, 10, 7);
    std::vector<PointId> train;
    for (std::size_t f = 1; f < 10; ++f) train.insert(train.end(), folds[f].begin(), folds[f].end());
    std::sort(train.begin(), train.end());
    const NormalizedDataset tr{nd.data.subset(train), nd.ranges};
    LearnConfig lc;
    lc.seed = 3;
    const auto m = learn(tr, {}, lc);
    REQUIRE(m.k_scores.size() == 3);
    const auto [block_ids, k_ids] = stratified_split(tr.data, lc.split_ratio, lc.seed);
    double best = -1;
    std::size_t best_k = 0;
    for (std::size_t k : {1, 3, 5}) {
      HyperModel probe = m;
      probe.k = k;
      std::size_t correct = 0;
      for (PointId id : k_ids) {
        const auto row = tr.data.row_of(id);
        const auto c = classify(tr.data.values(row), probe);
        correct += c.outcome && *c.outcome == tr.data.label_of(row);
      }
      const double acc = double(correct) / double(k_ids.size());
      const auto it = std::find_if(m.k_scores.begin(), m.k_scores.end(), [k](const KScore& s) { return s.k == k; });
      CHECK(it->accuracy == doctest::Approx(acc));
      if (acc > best) {
        best = acc;
        best_k = k;
      }
    }
    CHECK(m.k == best_k);
  }

  TEST_CASE("accuracy target miss falls back to k_min") {
    std::vector<testing::Row> rows;
    for (int i = 0; i < 20; ++i) rows.push_back({{0.05 * i}, i % 2 ? "A" : "B"});
    LearnConfig lc;
    lc.accuracy_threshold = 1.01;
    const auto m = learn(normalize(make_dataset(rows)), {}, lc);
    CHECK(m.accuracy_target_missed);
    CHECK(m.k == lc.k_min);
  }

  TEST_CASE("learn preconditions") {
    const auto one_class = normalize(make_dataset({{{0.0}, "A"}, {{1.0}, "A"}}));
    CHECK_THROWS_AS(learn(one_class, {}, {}), Error);
    const auto tiny = normalize(make_dataset({{{0.0}, "A"}, {{1.0}, "B"}}));
    CHECK_THROWS_AS(learn(tiny, {}, {}), Error);
  }

  TEST_CASE("small block refusal") {
    const auto d = make_dataset({{{0.1}, "B"}, {{0.2}, "B"}, {{0.9}, "M"}});
    const auto m = model_of({make_block(box({{0.1, 0.2}}), d), make_block(box({{0.9, 0.9}}), d)}, d, 1);
    CHECK(classify_with_small_hb_refusal(m, 1).hb_model.blocks == m.hb_model.blocks);
    const auto pruned = classify_with_small_hb_refusal(m, 2);
    CHECK(pruned.hb_model.blocks.size() == 1);
    CHECK(pruned.hb_model.refused.size() == 1);
    const auto cov = r1_coverage(pruned, d);
    CHECK(cov.covered == 2);
    CHECK(cov.precision() == 1.0);
    CHECK_THROWS_AS(classify_with_small_hb_refusal(m, 0), Error);
  }

  TEST_CASE("default priority for WBC labels") {
    CHECK(default_class_priority({"B", "M"}) == std::vector<std::string>{"M", "B"});
  }
}
