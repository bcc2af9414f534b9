#include "hyperblocks/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

std::string_view to_string(DistanceVariant v) {
  switch (v) {
    case DistanceVariant::kCenter: return "n1";
    case DistanceVariant::kMean: return "n2";
    case DistanceVariant::kNearest: return "n3";
  }
  return "n2";
}

DistanceVariant distance_variant_from_string(std::string_view name) {
  if (name == "n1" || name == "N1" || name == "center") return DistanceVariant::kCenter;
  if (name == "n2" || name == "N2" || name == "mean") return DistanceVariant::kMean;
  if (name == "n3" || name == "N3" || name == "nearest") return DistanceVariant::kNearest;
  throw Error(ErrorCode::kInvalidArgument, "unknown distance variant '" + std::string(name) + "'");
}

std::string_view to_string(RuleFired r) {
  switch (r) {
    case RuleFired::kR1: return "R1";
    case RuleFired::kR2: return "R2";
    case RuleFired::kR3: return "R3";
    case RuleFired::kRefusal: return "refusal";
  }
  return "refusal";
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t priority_rank(const std::string& label, const std::vector<std::string>& priority) {
  auto it = std::find(priority.begin(), priority.end(), label);
  return static_cast<std::size_t>(it - priority.begin());
}

}  // namespace

double distance_to_hb(std::span<const double> x, const HyperBlock& hb, DistanceVariant variant,
                      const Dataset& points) {
  if (x.size() != hb.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "point and block dimensions differ");
  }
  if (variant == DistanceVariant::kCenter) {
    const auto c = hb.center();
    return euclidean(x, c);
  }
  if (hb.members.empty()) {
    throw Error(ErrorCode::kEmptyBlock, "mean/nearest distance to an empty block");
  }
  if (variant == DistanceVariant::kMean) {
    std::vector<double> mean(x.size(), 0.0);
    for (PointId id : hb.members) {
      auto v = points.values(points.row_of(id));
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    }
    for (double& m : mean) m /= static_cast<double>(hb.members.size());
    return euclidean(x, mean);
  }
  double best = std::numeric_limits<double>::infinity();
  for (PointId id : hb.members) {
    best = std::min(best, euclidean(x, points.values(points.row_of(id))));
  }
  return best;
}

std::vector<std::string> default_class_priority(const std::vector<std::string>& labels) {
  return {labels.rbegin(), labels.rend()};
}

std::string effective_class(const HyperBlock& hb, const std::vector<std::string>& class_priority) {
  if (hb.dominant_class) return *hb.dominant_class;
  std::size_t best = 0;
  for (const auto& [label, count] : hb.class_counts) best = std::max(best, count);
  std::vector<std::string> tied;
  for (const auto& [label, count] : hb.class_counts) {
    if (count == best) tied.push_back(label);
  }
  if (tied.empty()) {
    throw Error(ErrorCode::kEmptyBlock, "block without members has no class");
  }
  std::stable_sort(tied.begin(), tied.end(), [&](const auto& a, const auto& b) {
    return priority_rank(a, class_priority) < priority_rank(b, class_priority);
  });
  return tied.front();
}

Classification classify(std::span<const double> x, const HyperModel& m) {
  const auto& blocks = m.hb_model.blocks;
  if (x.size() != m.points.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "input dimension differs from model");
  }
  Classification result;

  // R1: the most trustworthy containing block decides.
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!contains(blocks[i], x)) continue;
    result.evidence.push_back({i, 0.0});
    if (!chosen) {
      chosen = i;
      continue;
    }
    const auto& a = blocks[i];
    const auto& b = blocks[*chosen];
    const double ia = impurity(a), ib = impurity(b);
    if (ia != ib) {
      if (ia < ib) chosen = i;
    } else if (a.size() != b.size()) {
      if (a.size() > b.size()) chosen = i;
    } else if (priority_rank(effective_class(a, m.class_priority), m.class_priority) <
               priority_rank(effective_class(b, m.class_priority), m.class_priority)) {
      chosen = i;
    }
  }
  if (chosen) {
    std::stable_partition(result.evidence.begin(), result.evidence.end(),
                          [&](const Evidence& e) { return e.block_index == *chosen; });
    result.outcome = effective_class(blocks[*chosen], m.class_priority);
    result.rule = RuleFired::kR1;
    return result;
  }

  std::vector<Evidence> ranked;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double dist = distance_to_hb(x, blocks[i], m.variant, m.points);
    if (dist <= m.vicinity_radius) ranked.push_back({i, dist});
  }
  if (m.k == 0 || ranked.size() < m.k) {
    result.rule = RuleFired::kRefusal;
    result.evidence = std::move(ranked);
    return result;
  }
  std::sort(ranked.begin(), ranked.end(), [](const Evidence& a, const Evidence& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.block_index < b.block_index;
  });
  ranked.resize(m.k);
  result.evidence = ranked;

  std::map<std::string, std::size_t> votes;
  for (const auto& e : ranked) ++votes[effective_class(blocks[e.block_index], m.class_priority)];
  std::size_t top = 0;
  for (const auto& [label, n] : votes) top = std::max(top, n);
  std::vector<std::string> leaders;
  for (const auto& [label, n] : votes) {
    if (n == top) leaders.push_back(label);
  }
  if (leaders.size() == 1) {
    result.outcome = leaders.front();
    result.rule = m.k == 1 ? RuleFired::kR2 : RuleFired::kR3;
    return result;
  }

  // Vote tie: the nearest block decides; exact distance ties go to priority.
  const double nearest = ranked.front().distance;
  std::vector<std::string> closest;
  for (const auto& e : ranked) {
    if (e.distance == nearest) closest.push_back(effective_class(blocks[e.block_index], m.class_priority));
  }
  std::stable_sort(closest.begin(), closest.end(), [&](const auto& a, const auto& b) {
    return priority_rank(a, m.class_priority) < priority_rank(b, m.class_priority);
  });
  result.outcome = closest.front();
  result.rule = RuleFired::kR2;
  return result;
}

HyperModel make_model(HBModel hb_model, const NormalizedDataset& points, std::size_t k,
                      DistanceVariant variant, std::vector<std::string> class_priority) {
  HyperModel m;
  m.hb_model = std::move(hb_model);
  m.k = k;
  m.k_min = m.k_max = k;
  m.variant = variant;
  m.class_priority = class_priority.empty() ? default_class_priority(points.data.class_labels())
                                            : std::move(class_priority);
  m.points = points.data;
  m.ranges = points.ranges;
  return m;
}

HyperModel learn(const NormalizedDataset& train, const MHyperConfig& cfg,
                 const LearnConfig& learn_cfg) {
  if (train.data.class_labels().size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "learning needs at least two classes");
  }
  if (learn_cfg.k_min == 0 || learn_cfg.k_max < learn_cfg.k_min || learn_cfg.k_step == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid k search range");
  }

  std::vector<PointId> block_ids = train.data.ids();
  std::vector<PointId> k_ids;
  if (!learn_cfg.fixed_k()) {
    auto split = stratified_split(train.data, learn_cfg.split_ratio, learn_cfg.seed);
    block_ids = std::move(split.first);
    k_ids = std::move(split.second);
    if (k_ids.empty() || block_ids.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "degenerate split: empty block or k partition");
    }
  }

  NormalizedDataset block_part{train.data.subset(block_ids), train.ranges};
  MHyperConfig block_cfg = cfg;
  if (!block_cfg.seed_order.empty()) {
    std::erase_if(block_cfg.seed_order, [&](PointId id) {
      return !std::binary_search(block_ids.begin(), block_ids.end(), id);
    });
  }
  HyperModel m = make_model(discover(block_part, block_cfg), train, learn_cfg.k_min,
                            learn_cfg.variant, learn_cfg.class_priority);
  m.k_min = learn_cfg.k_min;
  m.k_max = learn_cfg.k_max;
  m.accuracy_threshold = learn_cfg.accuracy_threshold;
  m.vicinity_radius = learn_cfg.vicinity_radius;

  const auto& blocks = m.hb_model.blocks;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != 1 || blocks.size() < 2) continue;
    const std::size_t row = train.data.row_of(blocks[i].members.front());
    auto x = train.data.values(row);
    std::optional<std::size_t> nearest;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (j == i) continue;
      const double dist = distance_to_hb(x, blocks[j], m.variant, m.points);
      if (dist < best) {
        best = dist;
        nearest = j;
      }
    }
    if (effective_class(blocks[*nearest], m.class_priority) == train.data.label_of(row)) {
      ++m.single_point_check.positive;
    } else {
      ++m.single_point_check.negative;
    }
  }

  if (learn_cfg.fixed_k()) return m;

  std::optional<KScore> best;
  for (std::size_t k = learn_cfg.k_min; k <= learn_cfg.k_max; k += learn_cfg.k_step) {
    m.k = k;
    std::size_t correct = 0;
    for (PointId id : k_ids) {
      const std::size_t row = train.data.row_of(id);
      auto c = classify(train.data.values(row), m);
      if (c.outcome && *c.outcome == train.data.label_of(row)) ++correct;
    }
    KScore score{k, static_cast<double>(correct) / static_cast<double>(k_ids.size())};
    m.k_scores.push_back(score);
    if (!best || score.accuracy > best->accuracy) best = score;
  }
  if (best->accuracy < learn_cfg.accuracy_threshold) {
    m.accuracy_target_missed = true;
    m.k = learn_cfg.k_min;
  } else {
    m.k = best->k;
  }
  return m;
}

HyperModel classify_with_small_hb_refusal(HyperModel m, std::size_t min_block_size) {
  if (min_block_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "minimum block size must be at least 1");
  }
  auto& blocks = m.hb_model.blocks;
  auto split = std::stable_partition(blocks.begin(), blocks.end(), [&](const HyperBlock& b) {
    return b.size() >= min_block_size;
  });
  m.hb_model.refused.insert(m.hb_model.refused.end(), std::make_move_iterator(split),
                            std::make_move_iterator(blocks.end()));
  blocks.erase(split, blocks.end());
  return m;
}

CoverageReport r1_coverage(const HyperModel& m, const Dataset& normalized) {
  CoverageReport r;
  r.total = normalized.size();
  for (std::size_t row = 0; row < normalized.size(); ++row) {
    auto c = classify(normalized.values(row), m);
    if (c.rule != RuleFired::kR1) continue;
    ++r.covered;
    if (*c.outcome == normalized.label_of(row)) ++r.correct;
  }
  return r;
}

}  // namespace hyperblocks
