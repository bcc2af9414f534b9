// Randomized properties over small generated instances.
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "hyperblocks/analytics.hpp"
#include "hyperblocks/classifier.hpp"
#include "hyperblocks/dtree.hpp"
#include "hyperblocks/json_io.hpp"
#include "hyperblocks/mhyper.hpp"

using namespace hyperblocks;

namespace {

constexpr int kInstances = 250;

std::vector<PointId> brute_members(const Bounds& b, const Dataset& d) {
  std::vector<PointId> out;
  for (std::size_t r = 0; r < d.size(); ++r) {
    if (contains(b, d.values(r))) out.push_back(d.id(r));
  }
  return out;
}

bool single_location(const HyperBlock& hb, const Dataset& d) {
  const auto first = d.values(d.row_of(hb.members.front()));
  return std::all_of(hb.members.begin(), hb.members.end(), [&](PointId id) {
    return std::ranges::equal(d.values(d.row_of(id)), first);
  });
}

bool covered(PointId id, const Dataset& d, const std::vector<HyperBlock>& blocks) {
  const auto x = d.values(d.row_of(id));
  return std::any_of(blocks.begin(), blocks.end(), [&](const HyperBlock& b) { return contains(b, x); });
}

std::size_t oracle_best_1d(const Dataset& d) {
  const std::size_t classes = d.class_labels().size();
  std::size_t best = 0;
  for (std::size_t c = 0; c < d.dimension(); ++c) {
    std::vector<double> cuts;
    for (std::size_t r = 0; r < d.size(); ++r) cuts.push_back(d.values(r)[c]);
    cuts.push_back(-1e300);
    for (double t : cuts) {
      std::vector<std::size_t> in(classes), out(classes);
      for (std::size_t r = 0; r < d.size(); ++r) ++(d.values(r)[c] <= t ? in : out)[d.class_of(r)];
      best = std::max(best, *std::max_element(in.begin(), in.end()) + *std::max_element(out.begin(), out.end()));
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("purity, coverage and maximality of merge_pure") {
    std::mt19937_64 rng(101);
    for (int it = 0; it < kInstances; ++it) {
      const auto d = testing::random_dataset(rng, 30, 4, 1 + it % 3);
      const auto blocks = merge_pure(d, {});
      for (const auto& b : blocks) {
        CHECK(b.members == brute_members(b.bounds, d));
        if (b.class_counts.size() > 1) CHECK(single_location(b, d));
      }
      for (PointId id : d.ids()) CHECK(covered(id, d, blocks));
      // A same-class point left out of a pure block was either taken by an
      // earlier block or would have made the envelope impure.
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].kind == BlockKind::kMixed) continue;
        for (std::size_t r = 0; r < d.size(); ++r) {
          if (d.label_of(r) != *blocks[i].dominant_class) continue;
          if (std::binary_search(blocks[i].members.begin(), blocks[i].members.end(), d.id(r))) continue;
          const bool earlier = std::any_of(blocks.begin(), blocks.begin() + i, [&](const HyperBlock& b) {
            return std::binary_search(b.members.begin(), b.members.end(), d.id(r));
          });
          const auto e = envelope(blocks[i], point_block(d, r), d);
          CHECK((earlier || e.class_counts.size() > 1));
        }
      }
    }
  }

  TEST_CASE("merge_dominant threshold soundness, coverage and monotone count") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> thr(0.0, 0.5);
    for (int it = 0; it < kInstances; ++it) {
      const auto d = testing::random_dataset(rng);
      MHyperConfig cfg;
      cfg.impurity_threshold = thr(rng);
      const auto pure = merge_pure(d, cfg);
      const auto m = merge_dominant(pure, d, cfg);
      CHECK(m.blocks.size() <= pure.size());
      for (const auto& b : m.blocks) {
        CHECK(impurity(b) <= cfg.impurity_threshold + 1e-12);
        CHECK(b.members == brute_members(b.bounds, d));
      }
      for (const auto& b : m.refused) CHECK(impurity(b) > cfg.impurity_threshold);
      std::vector<HyperBlock> all = m.blocks;
      all.insert(all.end(), m.refused.begin(), m.refused.end());
      for (PointId id : d.ids()) CHECK(covered(id, d, all));
    }
  }

  TEST_CASE("envelope minimality and monotonicity") {
    std::mt19937_64 rng(303);
    for (int it = 0; it < kInstances; ++it) {
      const auto d = testing::random_dataset(rng);
      std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
      const auto a = point_block(d, pick(rng));
      const auto b = envelope(a, point_block(d, pick(rng)), d);
      const auto c = point_block(d, pick(rng));
      const auto e = envelope(b, c, d);
      for (std::size_t k = 0; k < e.dimension(); ++k) {
        CHECK(e.bounds[k].lo == std::min(b.bounds[k].lo, c.bounds[k].lo));
        CHECK(e.bounds[k].hi == std::max(b.bounds[k].hi, c.bounds[k].hi));
      }
      CHECK(std::includes(e.members.begin(), e.members.end(), b.members.begin(), b.members.end()));
      CHECK(std::includes(e.members.begin(), e.members.end(), c.members.begin(), c.members.end()));
      CHECK(std::includes(b.members.begin(), b.members.end(), a.members.begin(), a.members.end()));
      CHECK(e.members == brute_members(e.bounds, d));
      CHECK(envelope(e.bounds, e.bounds) == e.bounds);
    }
  }

  TEST_CASE("determinism under a fixed order and seed") {
    std::mt19937_64 rng(404);
    for (int it = 0; it < kInstances; ++it) {
      const auto d = testing::random_dataset(rng);
      MHyperConfig cfg;
      cfg.impurity_threshold = 0.2;
      cfg.seed_order = d.ids();
      std::shuffle(cfg.seed_order.begin(), cfg.seed_order.end(), rng);
      const auto nd = normalize(d);
      CHECK(to_json(discover(nd, cfg)).dump() == to_json(discover(nd, cfg)).dump());
      CHECK(merge_pure(d, cfg) == merge_pure(d, cfg));
    }
  }

  TEST_CASE("branch and block round trip") {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> grid(1, 9), coin(0, 1), dims(1, 4);
    for (int it = 0; it < kInstances; ++it) {
      const std::size_t n = dims(rng);
      const Bounds domain(n, Interval{0, 10});
      FlaggedBox box;
      for (std::size_t k = 0; k < n; ++k) {
        int lo = grid(rng), hi = grid(rng);
        if (lo > hi) std::swap(lo, hi);
        if (lo == hi) ++hi;
        box.push_back({double(lo), double(hi), coin(rng) == 1, coin(rng) == 1});
      }
      const auto branch = hb_to_branch(box, domain);
      CHECK(branch_to_hb(branch, domain) == box);
      CHECK(branch_to_hb(parse_branch(render_branch(branch)), domain) == box);
    }
  }

  TEST_CASE("converted tree leaves classify like the tree") {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-0.1, 1.1);
    for (int it = 0; it < kInstances; ++it) {
      const auto d = testing::random_dataset(rng, 30, 4, 2 + it % 2);
      const auto tree = id3_train(d);
      const Bounds domain(d.dimension(), Interval{-1, 2});
      std::vector<std::pair<FlaggedBox, std::string>> boxes;
      for (const auto& b : branches(tree)) boxes.emplace_back(branch_to_hb(b, domain), *b.label);
      for (int s = 0; s < 20; ++s) {
        std::vector<double> x(d.dimension());
        for (auto& v : x) v = s < 10 ? u(rng) : std::round(u(rng) * 10) / 10;
        std::size_t hits = 0;
        std::string label;
        for (const auto& [bx, l] : boxes) {
          if (contains(bx, x)) {
            ++hits;
            label = l;
          }
        }
        CHECK(hits == 1);
        CHECK(label == predict(tree, x).label);
      }
      for (const auto& [bx, l] : boxes) {
        std::vector<PointId> expected;
        for (std::size_t r = 0; r < d.size(); ++r) {
          if (contains(bx, d.values(r))) expected.push_back(d.id(r));
        }
        CHECK(to_hyperblock(bx, d).members == expected);
      }
    }
  }

  TEST_CASE("confusion totals") {
    std::mt19937_64 rng(707);
    int done = 0;
    while (done < kInstances) {
      const auto d = testing::random_dataset(rng);
      if (d.class_labels().size() < 2) continue;
      std::map<std::string, std::size_t> per;
      for (std::size_t r = 0; r < d.size(); ++r) ++per[d.label_of(r)];
      if (std::any_of(per.begin(), per.end(), [](const auto& p) { return p.second < 4; })) continue;
      ++done;
      HyperLearner h;
      h.learn.k_min = h.learn.k_max = 1 + 2 * (done % 2);
      for (const Learner& l : {Learner{h}, Learner{Id3Learner{}}}) {
        const auto r = cross_validate(d, l, 2, static_cast<std::uint64_t>(done));
        std::size_t total = 0;
        for (const auto& f : r.fold_results) {
          CHECK(f.confusion.total() == f.test_size);
          std::size_t refused = 0;
          for (std::size_t c = 0; c < f.confusion.labels().size(); ++c) refused += f.confusion.refused(c);
          CHECK(f.confusion.answered() + refused == f.test_size);
          CHECK(f.confusion.correct() <= f.confusion.answered());
          total += f.confusion.total();
        }
        CHECK(total == d.size());
      }
    }
  }

  TEST_CASE("1-D rule search is optimal") {
    std::mt19937_64 rng(808);
    for (int it = 0; it < kInstances; ++it) {
      const auto d = testing::random_dataset(rng, 30, 4, 2 + it % 2);
      const auto rules = simple_rule_search(d, 1);
      REQUIRE(rules.size() == 1);
      CHECK(evaluate_rule(rules[0], d).correct == oracle_best_1d(d));
    }
  }

  TEST_CASE("quantile bin balance") {
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<int> size(1, 30), qs(1, 8), grid(0, 6);
    std::uniform_real_distribution<double> u(0, 1);
    for (int it = 0; it < kInstances; ++it) {
      const std::size_t m = size(rng), q = qs(rng);
      std::vector<double> distinct(m);
      for (std::size_t i = 0; i < m; ++i) distinct[i] = static_cast<double>(i) + u(rng) * 0.5;
      std::shuffle(distinct.begin(), distinct.end(), rng);
      auto h = quantile_histogram(distinct, q);
      std::size_t lo = m, hi = 0, sum = 0;
      for (const auto& b : h.bins) {
        lo = std::min(lo, b.count);
        hi = std::max(hi, b.count);
        sum += b.count;
      }
      CHECK(sum == m);
      CHECK(hi - lo <= 1);
      CHECK(h.bins.size() <= q);

      std::vector<double> dup(m);
      for (auto& v : dup) v = grid(rng);
      h = quantile_histogram(dup, q);
      sum = 0;
      for (const auto& b : h.bins) sum += b.count;
      CHECK(sum == m);
      for (double v : dup) {
        std::size_t holders = 0;
        for (std::size_t j = 0; j < h.bins.size(); ++j) {
          const bool last = j + 1 == h.bins.size();
          holders += v >= h.bins[j].lo && (last ? v <= h.bins[j].hi : v < h.bins[j].hi);
        }
        CHECK(holders == 1);
      }
    }
  }

  TEST_CASE("classification totality and R1 precedence") {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(0, 1);
    int done = 0;
    while (done < kInstances) {
      const auto d = testing::random_dataset(rng);
      if (d.class_labels().size() < 2) continue;
      ++done;
      const auto nd = normalize(d);
      MHyperConfig cfg;
      cfg.impurity_threshold = 0.25;
      const auto m = make_model(discover(nd, cfg), nd, 1 + 2 * (done % 3), DistanceVariant(done % 3), {});
      for (int s = 0; s < 10; ++s) {
        std::vector<double> x(d.dimension());
        for (auto& v : x) v = u(rng);
        const auto c = classify(x, m);
        CHECK(c.refused() == (c.rule == RuleFired::kRefusal));
        const bool inside = std::any_of(m.hb_model.blocks.begin(), m.hb_model.blocks.end(),
                                        [&](const HyperBlock& b) { return contains(b, x); });
        CHECK(inside == (c.rule == RuleFired::kR1));
      }
    }
  }
}
