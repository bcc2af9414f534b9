#include "hyperblocks/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

namespace {

BlockKind kind_from_string(const std::string& s) {
  if (s == "seed") return BlockKind::kSeed;
  if (s == "pure") return BlockKind::kPure;
  if (s == "mixed") return BlockKind::kMixed;
  throw Error(ErrorCode::kValidation, "unknown block kind '" + s + "'");
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// nlohmann errors are re-raised with a library code.
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("malformed ") + what, e.what());
  }
}

}  // namespace

Json to_json(const HyperBlock& hb) {
  Json bounds = Json::array();
  for (const auto& iv : hb.bounds) bounds.push_back({iv.lo, iv.hi});
  Json counts = Json::object();
  for (const auto& [label, n] : hb.class_counts) counts[label] = n;
  return {{"bounds", bounds},
          {"members", hb.members},
          {"classCounts", counts},
          {"dominant", hb.dominant_class ? Json(*hb.dominant_class) : Json(nullptr)},
          {"kind", std::string(to_string(hb.kind))}};
}

HyperBlock block_from_json(const Json& j) {
  return guarded("block", [&] {
    HyperBlock hb;
    for (const auto& b : j.at("bounds")) {
      Interval iv{b.at(0).get<double>(), b.at(1).get<double>()};
      if (!(iv.lo <= iv.hi)) throw Error(ErrorCode::kValidation, "block interval has lo > hi");
      hb.bounds.push_back(iv);
    }
    hb.members = get_or<std::vector<PointId>>(j, "members", {});
    if (!std::is_sorted(hb.members.begin(), hb.members.end())) {
      throw Error(ErrorCode::kValidation, "block members must be ascending");
    }
    std::size_t total = 0;
    if (j.contains("classCounts")) {
      for (const auto& [label, n] : j.at("classCounts").items()) {
        hb.class_counts[label] = n.get<std::size_t>();
        total += n.get<std::size_t>();
      }
    }
    if (total != hb.members.size()) {
      throw Error(ErrorCode::kValidation, "class counts do not add up to the member count");
    }
    if (j.contains("dominant") && !j.at("dominant").is_null()) {
      hb.dominant_class = j.at("dominant").get<std::string>();
    }
    hb.kind = j.contains("kind") ? kind_from_string(j.at("kind").get<std::string>())
              : hb.class_counts.size() > 1 ? BlockKind::kMixed
                                           : BlockKind::kPure;
    return hb;
  });
}

Json to_json(const MHyperConfig& cfg) {
  return {{"impurityThreshold", cfg.impurity_threshold},
          {"seedOrder", cfg.seed_order},
          {"allowOverlap", cfg.allow_overlap},
          {"combineMode", std::string(to_string(cfg.combine_mode))},
          {"faceEpsilon", cfg.face_epsilon}};
}

MHyperConfig mhyper_config_from_json(const Json& j) {
  return guarded("config", [&] {
    MHyperConfig cfg;
    cfg.impurity_threshold = get_or(j, "impurityThreshold", cfg.impurity_threshold);
    cfg.seed_order = get_or<std::vector<PointId>>(j, "seedOrder", {});
    cfg.allow_overlap = get_or(j, "allowOverlap", cfg.allow_overlap);
    cfg.combine_mode = combine_mode_from_string(get_or<std::string>(j, "combineMode", "envelope"));
    cfg.face_epsilon = get_or(j, "faceEpsilon", cfg.face_epsilon);
    cfg.validate();
    return cfg;
  });
}

Json to_json(const HBModel& m) {
  Json blocks = Json::array(), refused = Json::array();
  for (const auto& b : m.blocks) blocks.push_back(to_json(b));
  for (const auto& b : m.refused) refused.push_back(to_json(b));
  return {{"blocks", blocks},
          {"refused", refused},
          {"config", to_json(m.config)},
          {"fingerprint", m.fingerprint}};
}

HBModel hb_model_from_json(const Json& j) {
  return guarded("block model", [&] {
    HBModel m;
    for (const auto& b : j.at("blocks")) m.blocks.push_back(block_from_json(b));
    if (j.contains("refused")) {
      for (const auto& b : j.at("refused")) m.refused.push_back(block_from_json(b));
    }
    if (j.contains("config")) m.config = mhyper_config_from_json(j.at("config"));
    m.fingerprint = get_or<std::string>(j, "fingerprint", "");
    const std::size_t n = m.blocks.empty() ? 0 : m.blocks.front().dimension();
    for (const auto& b : m.blocks) {
      if (b.dimension() != n) throw Error(ErrorCode::kDimensionMismatch, "blocks differ in dimension");
    }
    return m;
  });
}

Json to_json(const Dataset& d) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < d.size(); ++r) {
    auto v = d.values(r);
    rows.push_back(std::vector<double>(v.begin(), v.end()));
  }
  std::vector<std::string> labels, sources;
  for (std::size_t r = 0; r < d.size(); ++r) {
    labels.push_back(d.label_of(r));
    sources.push_back(d.source_id(r));
  }
  return {{"coordinates", d.coordinate_names()},
          {"classes", d.class_labels()},
          {"ids", d.ids()},
          {"sourceIds", sources},
          {"values", rows},
          {"labels", labels},
          {"fingerprint", d.fingerprint()}};
}

Dataset dataset_from_json(const Json& j) {
  return guarded("dataset", [&] {
    auto names = j.at("coordinates").get<std::vector<std::string>>();
    std::vector<double> values;
    for (const auto& row : j.at("values")) {
      if (row.size() != names.size()) {
        throw Error(ErrorCode::kDimensionMismatch, "point width differs from coordinate count");
      }
      for (const auto& v : row) values.push_back(v.get<double>());
    }
    return Dataset(std::move(names), j.at("ids").get<std::vector<PointId>>(), std::move(values),
                   j.at("labels").get<std::vector<std::string>>(),
                   get_or<std::vector<std::string>>(j, "sourceIds", {}));
  });
}

Json to_json(const std::vector<CoordinateRange>& ranges) {
  Json out = Json::array();
  for (const auto& r : ranges) out.push_back({{"min", r.raw_min}, {"max", r.raw_max}});
  return out;
}

std::vector<CoordinateRange> ranges_from_json(const Json& j) {
  return guarded("ranges", [&] {
    std::vector<CoordinateRange> out;
    for (const auto& r : j) {
      CoordinateRange cr{r.at("min").get<double>(), r.at("max").get<double>()};
      if (cr.raw_min > cr.raw_max) throw Error(ErrorCode::kValidation, "range has min > max");
      out.push_back(cr);
    }
    return out;
  });
}

Json to_json(const HyperModel& m) {
  Json scores = Json::array();
  for (const auto& s : m.k_scores) scores.push_back({{"k", s.k}, {"accuracy", s.accuracy}});
  return {{"format", "hyperblocks-model/1"},
          {"hbModel", to_json(m.hb_model)},
          {"k", m.k},
          {"variant", std::string(to_string(m.variant))},
          {"classPriority", m.class_priority},
          {"accuracyThreshold", m.accuracy_threshold},
          {"kMin", m.k_min},
          {"kMax", m.k_max},
          {"vicinityRadius", finite_or_null(m.vicinity_radius)},
          {"ranges", to_json(m.ranges)},
          {"points", to_json(m.points)},
          {"singlePointCheck",
           {{"positive", m.single_point_check.positive},
            {"negative", m.single_point_check.negative}}},
          {"kScores", scores},
          {"accuracyTargetMissed", m.accuracy_target_missed}};
}

HyperModel hyper_model_from_json(const Json& j) {
  return guarded("model", [&] {
    HyperModel m;
    m.hb_model = hb_model_from_json(j.at("hbModel"));
    m.k = j.at("k").get<std::size_t>();
    m.variant = distance_variant_from_string(get_or<std::string>(j, "variant", "n2"));
    m.points = dataset_from_json(j.at("points"));
    m.class_priority = get_or<std::vector<std::string>>(j, "classPriority", {});
    if (m.class_priority.empty()) m.class_priority = default_class_priority(m.points.class_labels());
    m.accuracy_threshold = get_or(j, "accuracyThreshold", 0.0);
    m.k_min = get_or(j, "kMin", m.k);
    m.k_max = get_or(j, "kMax", m.k);
    m.vicinity_radius = get_or(j, "vicinityRadius", std::numeric_limits<double>::infinity());
    m.ranges = ranges_from_json(j.at("ranges"));
    if (m.ranges.size() != m.points.dimension()) {
      throw Error(ErrorCode::kDimensionMismatch, "ranges differ from point dimension");
    }
    for (const auto& b : m.hb_model.blocks) {
      if (b.dimension() != m.points.dimension()) {
        throw Error(ErrorCode::kDimensionMismatch, "block dimension differs from points");
      }
    }
    if (j.contains("singlePointCheck")) {
      m.single_point_check.positive = j["singlePointCheck"].value("positive", std::size_t{0});
      m.single_point_check.negative = j["singlePointCheck"].value("negative", std::size_t{0});
    }
    if (j.contains("kScores")) {
      for (const auto& s : j.at("kScores")) {
        m.k_scores.push_back({s.at("k").get<std::size_t>(), s.at("accuracy").get<double>()});
      }
    }
    m.accuracy_target_missed = get_or(j, "accuracyTargetMissed", false);
    return m;
  });
}

Json to_json(const Classification& c) {
  Json ev = Json::array();
  for (const auto& e : c.evidence) ev.push_back({{"block", e.block_index}, {"distance", e.distance}});
  return {{"outcome", c.outcome ? Json(*c.outcome) : Json(nullptr)},
          {"rule", std::string(to_string(c.rule))},
          {"evidence", ev}};
}

namespace {

Json tree_node_json(const DecisionTree& tree, std::size_t i) {
  const auto& n = tree.nodes[i];
  Json counts = Json::object();
  for (std::size_t c = 0; c < n.class_counts.size(); ++c) {
    counts[tree.class_labels[c]] = n.class_counts[c];
  }
  Json out = {{"depth", n.depth}, {"classCounts", counts}, {"label", n.label}};
  if (!n.leaf) {
    out["coordinate"] = tree.coordinate_names[n.coordinate];
    out["threshold"] = n.threshold;
    out["left"] = tree_node_json(tree, n.left);
    out["right"] = tree_node_json(tree, n.right);
  }
  return out;
}

}  // namespace

Json to_json(const DecisionTree& tree) {
  return {{"coordinates", tree.coordinate_names},
          {"classes", tree.class_labels},
          {"depth", tree.depth()},
          {"branches", tree.branch_count()},
          {"root", tree_node_json(tree, 0)}};
}

Json to_json(const Branch& b) {
  Json conds = Json::array();
  for (const auto& c : b.conditions) {
    conds.push_back({{"coordinate", c.coordinate},
                     {"op", std::string(to_string(c.op))},
                     {"threshold", c.threshold}});
  }
  return {{"text", render_branch(b)},
          {"conditions", conds},
          {"label", b.label ? Json(*b.label) : Json(nullptr)}};
}

Json to_json(const FlaggedBox& box) {
  Json out = Json::array();
  for (const auto& iv : box) {
    out.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"loOpen", iv.lo_open}, {"hiOpen", iv.hi_open}});
  }
  return out;
}

Json to_json(const ComplexityReport& r) {
  return {{"numbersStored", r.numbers_stored},
          {"smallestUnitSize", r.smallest_unit_size},
          {"unitSizes", r.unit_sizes},
          {"countingRule", r.counting_rule}};
}

Json to_json(const ConfusionMatrix& cm) {
  const std::size_t n = cm.labels().size();
  Json matrix = Json::array();
  std::vector<std::size_t> refused;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> row;
    for (std::size_t j = 0; j < n; ++j) row.push_back(cm.count(i, j));
    matrix.push_back(row);
    refused.push_back(cm.refused(i));
  }
  return {{"labels", cm.labels()},
          {"matrix", matrix},
          {"refused", refused},
          {"total", cm.total()},
          {"correct", cm.correct()},
          {"accuracy", cm.accuracy()}};
}

Json to_json(const EvaluationReport& r) {
  Json folds = Json::array();
  for (const auto& f : r.fold_results) {
    Json fj = {{"fold", f.fold},
               {"trainSize", f.train_size},
               {"testSize", f.test_size},
               {"accuracy", f.accuracy},
               {"confusion", to_json(f.confusion)}};
    if (r.learner == "hyper") {
      fj["blocks"] = f.block_count;
      fj["k"] = f.selected_k;
    } else {
      fj["depth"] = f.depth;
      fj["branches"] = f.branches;
      fj["nodes"] = f.nodes;
    }
    folds.push_back(std::move(fj));
  }
  Json out = {{"learner", r.learner},
              {"folds", r.folds},
              {"seed", r.seed},
              {"averageAccuracy", r.average_accuracy},
              {"minAccuracy", r.min_accuracy},
              {"maxAccuracy", r.max_accuracy},
              {"closestFold", r.closest_fold},
              {"foldResults", folds}};
  if (r.learner == "hyper") {
    out["averageBlocks"] = r.average_blocks;
  } else {
    out["averageDepth"] = r.average_depth;
    out["averageBranches"] = r.average_branches;
  }
  return out;
}

Json to_json(const ThresholdRule& r) {
  return {{"text", r.to_string()},
          {"conditions", to_json(Branch{r.conjuncts, std::nullopt})["conditions"]},
          {"then", r.then_class},
          {"else", r.else_class}};
}

Json to_json(const RuleEvaluation& r) {
  return {{"correct", r.correct},
          {"total", r.total},
          {"accuracy", r.accuracy},
          {"confusion", to_json(r.confusion)}};
}

Json to_json(const HeatmapReport& r, const std::vector<std::string>& coordinate_names) {
  return {{"coordinates", coordinate_names},
          {"disjointCounts", r.disjoint_counts},
          {"totalPairs", r.total_pairs},
          {"argmax", coordinate_names.at(r.argmax())}};
}

Json to_json(const PairSearchResult& r) {
  return {{"separable", r.separable},
          {"firstBlock", r.first_block},
          {"secondBlock", r.second_block},
          {"reducedDims", r.reduced_dims},
          {"rule", r.rule},
          {"correct", r.correct},
          {"total", r.total},
          {"accuracy", r.accuracy}};
}

Json to_json(const QuantileHistogram& h) {
  Json bins = Json::array(), freq = Json::array();
  for (const auto& b : h.bins) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  for (const auto& [v, n] : h.value_frequencies) freq.push_back({{"value", v}, {"count", n}});
  return {{"bins", bins}, {"frequencies", freq}, {"mean", h.mean}};
}

Json to_json(const LinguisticDescription& d) {
  Json coords = Json::array(), groups = Json::array();
  for (const auto& c : d.coordinates) {
    coords.push_back({{"coordinate", c.name},
                      {"third", std::string(to_string(c.third))},
                      {"concentration", c.concentration},
                      {"fractions", c.fractions}});
  }
  for (const auto& g : d.groups) {
    std::vector<std::string> names;
    for (std::size_t c : g.coordinates) names.push_back(d.coordinates[c].name);
    groups.push_back({{"third", std::string(to_string(g.third))}, {"coordinates", names}});
  }
  return {{"subject", d.subject}, {"coordinates", coords}, {"groups", groups}, {"sentences", d.sentences}};
}

Json to_json(const HyperCube& hc) {
  return {{"center", hc.center},
          {"sideLength", hc.side_length},
          {"block", to_json(hc.block)},
          {"memberCount", hc.block.size()}};
}

Json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"detail", e.detail()}};
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "invalid JSON", e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace hyperblocks
