#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "hyperblocks/dtree.hpp"
#include "hyperblocks/error.hpp"

using namespace hyperblocks;
using testing::make_dataset;

namespace {

bool same_conditions(std::vector<Condition> a, std::vector<Condition> b) {
  auto key = [](const Condition& c) { return std::tuple(c.coordinate, int(c.op), c.threshold); };
  auto less = [&](const Condition& x, const Condition& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  return a == b;
}

}  // namespace

TEST_SUITE("dtree") {
  TEST_CASE("branch to intervals") {
    const auto b = parse_branch("x1>5 & x2<6 & x3>2");
    const auto box = branch_to_hb(b, Bounds(4, Interval{0, 10}));
    REQUIRE(box.size() == 4);
    CHECK(box[0] == FlaggedInterval{5, 10, true, false});
    CHECK(box[1] == FlaggedInterval{0, 6, false, true});
    CHECK(box[2] == FlaggedInterval{2, 10, true, false});
    CHECK(box[3] == FlaggedInterval{0, 10, false, false});
  }

  TEST_CASE("empty branch is the full domain") {
    const auto box = branch_to_hb(Branch{}, Bounds(2, Interval{0, 1}));
    CHECK(box == FlaggedBox(2, FlaggedInterval{0, 1, false, false}));
    CHECK(hb_to_branch(box, Bounds(2, Interval{0, 1})).conditions.empty());
  }

  TEST_CASE("contradictory branch is rejected") {
    CHECK_THROWS_AS(branch_to_hb(parse_branch("x1>5 & x1<4"), Bounds(1, Interval{0, 10})), Error);
    CHECK_THROWS_AS(branch_to_hb(parse_branch("x1>5 & x1<5"), Bounds(1, Interval{0, 10})), Error);
    CHECK_THROWS_AS(branch_to_hb(parse_branch("x3>1"), Bounds(2, Interval{0, 10})), Error);
  }

  TEST_CASE("block to the six-predicate conjunction") {
    const FlaggedBox box{{5, 7, true, true}, {3, 6, true, true}, {2, 4, true, true}};
    const auto b = hb_to_branch(box, Bounds(3, Interval{0, 10}));
    CHECK(same_conditions(b.conditions, parse_branch("x1 > 5 & x1 < 7 & x2 < 6 & x2 > 3 & x3 > 2 & x3 < 4").conditions));
    CHECK(render_branch(b) == "x1 > 5 & x1 < 7 & x2 > 3 & x2 < 6 & x3 > 2 & x3 < 4");
    CHECK(branch_to_hb(b, Bounds(3, Interval{0, 10})) == box);
  }

  TEST_CASE("parsing names, unicode comparators and errors") {
    const auto b = parse_branch("size ≤ 3 & x2 ≥ 0.5", {"size", "shape"});
    REQUIRE(b.conditions.size() == 2);
    CHECK(b.conditions[0] == Condition{0, Comparator::kLessEqual, 3});
    CHECK(b.conditions[1] == Condition{1, Comparator::kGreaterEqual, 0.5});
    CHECK_THROWS_AS(parse_branch("y1 > 2"), Error);
    CHECK_THROWS_AS(parse_branch("x1 = 2"), Error);
    CHECK_THROWS_AS(parse_branch("x1 > abc"), Error);
  }

  TEST_CASE("common root of opposite predicates") {
    const auto a = parse_branch("x1 <= 3 & x2 > 1");
    const auto b = parse_branch("x3 < 2 & x1 > 3");
    const auto root = common_root(b, a);
    REQUIRE(root.has_value());
    CHECK(root->coordinate == 0);
    CHECK(root->threshold == 3);
    CHECK(render_branch(root->left_rest) == "x2 > 1");
    CHECK(render_branch(root->right_rest) == "x3 < 2");
    CHECK_FALSE(common_root(a, parse_branch("x1 <= 3")).has_value());
  }

  TEST_CASE("single class trains a single leaf") {
    const auto t = id3_train(make_dataset({{{0.0}, "A"}, {{1.0}, "A"}}));
    CHECK(t.nodes.size() == 1);
    CHECK(t.nodes[0].label == "A");
    CHECK(t.depth() == 0);
    CHECK_THROWS_AS(id3_train(Dataset{}), Error);
    Id3Config bad;
    bad.min_leaf = 0;
    CHECK_THROWS_AS(id3_train(make_dataset({{{0.0}, "A"}}), bad), Error);
  }

  TEST_CASE("XOR needs depth two") {
    const auto d = make_dataset({{{0, 0}, "A"}, {{1, 1}, "A"}, {{0, 1}, "B"}, {{1, 0}, "B"}});
    const auto t = id3_train(d);
    CHECK(t.depth() == 2);
    CHECK(t.branch_count() == 4);
    for (std::size_t r = 0; r < d.size(); ++r) CHECK(predict(t, d.values(r)).label == d.label_of(r));
    CHECK_THROWS_AS(predict(t, std::vector<double>{0.0}), Error);
  }

  TEST_CASE("depth limit") {
    const auto d = make_dataset({{{0, 0}, "A"}, {{1, 1}, "A"}, {{0, 1}, "B"}, {{1, 0}, "B"}});
    Id3Config cfg;
    cfg.max_depth = 1;
    CHECK(id3_train(d, cfg).depth() <= 1);
  }

  TEST_CASE("WBC training fold shape is near the reference") {
    const auto d = normalize(load_csv_file(testing::wbc_path(), CsvSchema::wbc()).dataset).data;
    const auto folds = stratified_folds(d, 10, 7);
    std::vector<PointId> train;
    for (std::size_t f = 1; f < 10; ++f) train.insert(train.end(), folds[f].begin(), folds[f].end());
    std::sort(train.begin(), train.end());
    const auto t = id3_train(d.subset(train));
    CHECK(t.depth() >= 5);
    CHECK(t.depth() <= 11);
    CHECK(t.branch_count() >= 15);
    CHECK(t.branch_count() <= 31);
  }

  TEST_CASE("branches reproduce tree predictions") {
    const auto d = make_dataset({{{0.1, 0.2}, "A"}, {{0.4, 0.9}, "B"}, {{0.8, 0.3}, "A"}, {{0.7, 0.8}, "B"},
                                 {{0.3, 0.5}, "A"}});
    const auto t = id3_train(d);
    const auto bs = branches(t);
    CHECK(bs.size() == t.branch_count());
    for (std::size_t r = 0; r < d.size(); ++r) {
      std::size_t hits = 0;
      for (const auto& b : bs) {
        if (b.holds(d.values(r))) {
          ++hits;
          CHECK(*b.label == predict(t, d.values(r)).label);
        }
      }
      CHECK(hits == 1);
    }
  }

  TEST_CASE("complexity counting") {
    const auto d = make_dataset({{{0.0, 0.0}, "A"}, {{1.0, 0.0}, "B"}});
    const auto t = id3_train(d);
    REQUIRE(t.internal_count() == 1);
    const auto r = complexity(t);
    CHECK(r.numbers_stored == 4);
    CHECK(r.smallest_unit_size == 1);
    CHECK(r.units_below(2) == 2);
    CHECK(r.fraction_below(2) == doctest::Approx(2.0 / 3.0));

    HBModel m;
    HyperBlock hb;
    hb.bounds = Bounds(9, Interval{0, 1});
    hb.members = {0, 1, 2};
    m.blocks.push_back(hb);
    CHECK(complexity(m).numbers_stored == 19);
    CHECK(complexity(m).smallest_unit_size == 3);
    CHECK_THROWS_AS(complexity(HBModel{}), Error);
  }

  TEST_CASE("closed block from a flagged box") {
    const auto d = make_dataset({{{5.0}, "A"}, {{6.0}, "A"}, {{7.0}, "B"}});
    const auto hb = to_hyperblock(FlaggedBox{{5, 7, true, true}}, d);
    CHECK(hb.members == std::vector<PointId>{1});
  }
}
