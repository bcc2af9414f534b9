#include "hyperblocks/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      counts_(labels_.size(), std::vector<std::size_t>(labels_.size(), 0)),
      refused_(labels_.size(), 0) {}

std::size_t ConfusionMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::kNotFound, "unknown class '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(const std::string& actual, const std::optional<std::string>& predicted) {
  const std::size_t a = index_of(actual);
  if (predicted) {
    ++counts_[a][index_of(*predicted)];
  } else {
    ++refused_[a];
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.labels_ != labels_) throw Error(ErrorCode::kInvalidArgument, "label sets differ");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    refused_[i] += other.refused_[i];
    for (std::size_t j = 0; j < labels_.size(); ++j) counts_[i][j] += other.counts_[i][j];
  }
}

std::size_t ConfusionMatrix::answered() const {
  std::size_t n = 0;
  for (const auto& row : counts_) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

std::size_t ConfusionMatrix::total() const {
  return answered() + std::accumulate(refused_.begin(), refused_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) n += counts_[i][i];
  return n;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = answered();
  return n ? static_cast<double>(correct()) / static_cast<double>(n) : 0.0;
}

double ConfusionMatrix::precision(std::size_t cls) const {
  std::size_t col = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) col += counts_[i][cls];
  return col ? static_cast<double>(counts_[cls][cls]) / static_cast<double>(col) : 0.0;
}

double ConfusionMatrix::recall(std::size_t cls) const {
  const std::size_t row = std::accumulate(counts_[cls].begin(), counts_[cls].end(),
                                          refused_[cls]);
  return row ? static_cast<double>(counts_[cls][cls]) / static_cast<double>(row) : 0.0;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "actual\\predicted";
  for (const auto& l : labels_) out << ',' << l;
  out << ",refused\n";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out << labels_[i];
    for (std::size_t j = 0; j < labels_.size(); ++j) out << ',' << counts_[i][j];
    out << ',' << refused_[i] << '\n';
  }
  return out.str();
}

EvaluationReport cross_validate(const Dataset& d, const Learner& learner, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "cross-validation needs at least 2 folds");
  const NormalizedDataset nd = normalize(d);
  const auto folds = stratified_folds(nd.data, k, seed);

  EvaluationReport report;
  report.learner = std::holds_alternative<HyperLearner>(learner) ? "hyper" : "id3";
  report.folds = k;
  report.seed = seed;

  for (std::size_t f = 0; f < k; ++f) {
    std::vector<PointId> train_ids;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_ids.insert(train_ids.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_ids.begin(), train_ids.end());
    const NormalizedDataset train{nd.data.subset(train_ids), nd.ranges};

    FoldResult fr;
    fr.fold = f;
    fr.train_size = train_ids.size();
    fr.test_size = folds[f].size();
    fr.confusion = ConfusionMatrix(nd.data.class_labels());

    if (const auto* hyper = std::get_if<HyperLearner>(&learner)) {
      const HyperModel model = learn(train, hyper->mhyper, hyper->learn);
      fr.block_count = model.hb_model.blocks.size();
      fr.selected_k = model.k;
      for (PointId id : folds[f]) {
        const std::size_t row = nd.data.row_of(id);
        fr.confusion.add(nd.data.label_of(row), classify(nd.data.values(row), model).outcome);
      }
    } else {
      const auto& id3 = std::get<Id3Learner>(learner);
      const DecisionTree tree = id3_train(train.data, id3.id3);
      fr.depth = tree.depth();
      fr.branches = tree.branch_count();
      fr.nodes = tree.nodes.size();
      for (PointId id : folds[f]) {
        const std::size_t row = nd.data.row_of(id);
        fr.confusion.add(nd.data.label_of(row), predict(tree, nd.data.values(row)).label);
      }
    }
    fr.accuracy = fr.confusion.accuracy();
    report.fold_results.push_back(std::move(fr));
  }

  const auto& rs = report.fold_results;
  report.min_accuracy = std::numeric_limits<double>::infinity();
  report.max_accuracy = -std::numeric_limits<double>::infinity();
  for (const auto& fr : rs) {
    report.average_accuracy += fr.accuracy;
    report.min_accuracy = std::min(report.min_accuracy, fr.accuracy);
    report.max_accuracy = std::max(report.max_accuracy, fr.accuracy);
    report.average_blocks += static_cast<double>(fr.block_count);
    report.average_depth += static_cast<double>(fr.depth);
    report.average_branches += static_cast<double>(fr.branches);
  }
  const double n = static_cast<double>(rs.size());
  report.average_accuracy /= n;
  report.average_blocks /= n;
  report.average_depth /= n;
  report.average_branches /= n;
  for (std::size_t f = 1; f < rs.size(); ++f) {
    if (std::abs(rs[f].accuracy - report.average_accuracy) <
        std::abs(rs[report.closest_fold].accuracy - report.average_accuracy)) {
      report.closest_fold = f;
    }
  }
  return report;
}

void ThresholdRule::validate(std::size_t dimension) const {
  std::set<std::size_t> seen;
  for (const auto& c : conjuncts) {
    if (c.coordinate >= dimension) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rule uses unknown coordinate x" + std::to_string(c.coordinate + 1));
    }
    if (!seen.insert(c.coordinate).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rule repeats coordinate x" + std::to_string(c.coordinate + 1));
    }
  }
}

std::string ThresholdRule::to_string() const {
  Branch b{conjuncts, std::nullopt};
  const std::string cond = conjuncts.empty() ? "true" : render_branch(b);
  return "if " + cond + " then " + then_class + " else " + else_class;
}

RuleEvaluation evaluate_rule(const ThresholdRule& r, const Dataset& d) {
  r.validate(d.dimension());
  RuleEvaluation e;
  e.confusion = ConfusionMatrix(d.class_labels());
  const Branch b{r.conjuncts, std::nullopt};
  for (std::size_t row = 0; row < d.size(); ++row) {
    const std::string& predicted = b.holds(d.values(row)) ? r.then_class : r.else_class;
    if (predicted == d.label_of(row)) ++e.correct;
    const bool known = d.class_index(predicted).has_value();
    e.confusion.add(d.label_of(row), known ? std::optional<std::string>(predicted) : std::nullopt);
  }
  e.total = d.size();
  e.accuracy = e.total ? static_cast<double>(e.correct) / static_cast<double>(e.total) : 0.0;
  return e;
}

namespace {

struct SideScore {
  std::size_t correct = 0;
  std::string then_class;
  std::string else_class;
};

// Best achievable correct count when `mask` rows predict one class and the
// rest another; majority per side, label order breaks ties.
SideScore score_partition(const Dataset& d, const std::vector<char>& mask) {
  const std::size_t classes = d.class_labels().size();
  std::vector<std::size_t> in(classes, 0), out(classes, 0);
  for (std::size_t row = 0; row < d.size(); ++row) ++(mask[row] ? in : out)[d.class_of(row)];
  std::vector<std::size_t> all(classes);
  for (std::size_t c = 0; c < classes; ++c) all[c] = in[c] + out[c];
  auto argmax = [](const std::vector<std::size_t>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  const std::size_t overall = argmax(all);
  const bool any_in = std::any_of(in.begin(), in.end(), [](std::size_t c) { return c > 0; });
  const bool any_out = std::any_of(out.begin(), out.end(), [](std::size_t c) { return c > 0; });
  const std::size_t then_c = any_in ? argmax(in) : overall;
  const std::size_t else_c = any_out ? argmax(out) : overall;
  return {in[then_c] + out[else_c], d.class_labels()[then_c], d.class_labels()[else_c]};
}

std::vector<double> distinct_values(const Dataset& d, std::size_t coordinate) {
  std::vector<double> v;
  v.reserve(d.size());
  for (std::size_t row = 0; row < d.size(); ++row) v.push_back(d.values(row)[coordinate]);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::vector<ThresholdRule> simple_rule_search(const Dataset& d, std::size_t max_dims) {
  if (max_dims == 0) throw Error(ErrorCode::kInvalidArgument, "max_dims must be at least 1");
  if (d.empty()) throw Error(ErrorCode::kEmptyDataset, "rule search on an empty dataset");

  std::vector<ThresholdRule> out;
  std::vector<char> current(d.size(), 1);
  std::vector<Condition> conjuncts;
  std::set<std::size_t> used;
  std::vector<char> mask(d.size());

  for (std::size_t dim = 1; dim <= std::min(max_dims, d.dimension()); ++dim) {
    std::optional<std::pair<SideScore, Condition>> best;
    auto consider = [&](const Condition& c) {
      for (std::size_t row = 0; row < d.size(); ++row) {
        mask[row] = current[row] && c.holds(d.values(row)[c.coordinate]);
      }
      SideScore s = score_partition(d, mask);
      if (!best || s.correct > best->first.correct) best.emplace(std::move(s), c);
    };
    for (std::size_t c = 0; c < d.dimension(); ++c) {
      if (used.count(c)) continue;
      const auto values = distinct_values(d, c);
      for (double v : values) consider({c, Comparator::kLess, v});
      if (dim == 1) {
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
          consider({c, Comparator::kLessEqual, 0.5 * (values[i] + values[i + 1])});
        }
      } else {
        for (double v : values) consider({c, Comparator::kGreaterEqual, v});
      }
    }
    if (!best) break;
    conjuncts.push_back(best->second);
    used.insert(best->second.coordinate);
    for (std::size_t row = 0; row < d.size(); ++row) {
      current[row] = current[row] && best->second.holds(d.values(row)[best->second.coordinate]);
    }
    out.push_back({conjuncts, best->first.then_class, best->first.else_class});
  }
  return out;
}

std::size_t HeatmapReport::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(disjoint_counts.begin(), disjoint_counts.end()) - disjoint_counts.begin());
}

HeatmapReport nonoverlap_heatmap(const std::vector<HyperBlock>& blocks) {
  if (blocks.size() < 2) throw Error(ErrorCode::kInvalidArgument, "heatmap needs at least 2 blocks");
  const std::size_t n = blocks.front().dimension();
  HeatmapReport r;
  r.disjoint_counts.assign(n, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      ++r.total_pairs;
      std::vector<char> overlapping(n, 0);
      for (std::size_t c : overlap_coords(blocks[i], blocks[j])) overlapping[c] = 1;
      for (std::size_t c = 0; c < n; ++c) {
        if (!overlapping[c]) ++r.disjoint_counts[c];
      }
    }
  }
  return r;
}

namespace {

double gap_distance(const HyperBlock& hb, std::span<const double> x,
                    const std::vector<std::size_t>& dims) {
  double s = 0.0;
  for (std::size_t c : dims) {
    const double g = std::max({0.0, hb.bounds[c].lo - x[c], x[c] - hb.bounds[c].hi});
    s += g * g;
  }
  return std::sqrt(s);
}

bool inside_dims(const HyperBlock& hb, std::span<const double> x,
                 const std::vector<std::size_t>& dims) {
  return std::all_of(dims.begin(), dims.end(),
                     [&](std::size_t c) { return hb.bounds[c].contains(x[c]); });
}

std::string format_interval(const Interval& iv) {
  std::ostringstream out;
  out << '[' << iv.lo << ", " << iv.hi << ']';
  return out.str();
}

}  // namespace

PairSearchResult best_pair_search(const std::vector<HyperBlock>& blocks, const Dataset& d,
                                  const std::vector<std::string>& class_priority,
                                  PairFallback fallback) {
  std::map<std::string, std::size_t> largest;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].members.empty()) continue;
    const std::string cls = effective_class(blocks[i], class_priority);
    auto it = largest.find(cls);
    if (it == largest.end() || blocks[i].size() > blocks[it->second].size()) largest[cls] = i;
  }
  if (largest.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pair search needs blocks of at least two classes");
  }
  std::vector<std::size_t> picks;
  for (const auto& [cls, i] : largest) picks.push_back(i);
  std::stable_sort(picks.begin(), picks.end(), [&](std::size_t a, std::size_t b) {
    return blocks[a].size() > blocks[b].size();
  });

  PairSearchResult r;
  r.first_block = picks[0];
  r.second_block = picks[1];
  const HyperBlock& a = blocks[r.first_block];
  const HyperBlock& b = blocks[r.second_block];
  std::vector<char> overlapping(a.dimension(), 0);
  for (std::size_t c : overlap_coords(a, b)) overlapping[c] = 1;
  for (std::size_t c = 0; c < a.dimension(); ++c) {
    if (!overlapping[c]) r.reduced_dims.push_back(c);
  }
  r.total = d.size();
  if (r.reduced_dims.empty()) return r;
  r.separable = true;

  const std::string class_a = effective_class(a, class_priority);
  const std::string class_b = effective_class(b, class_priority);
  auto rank = [&](const std::string& s) {
    return std::find(class_priority.begin(), class_priority.end(), s) - class_priority.begin();
  };
  const std::string& preferred = rank(class_a) <= rank(class_b) ? class_a : class_b;

  for (std::size_t row = 0; row < d.size(); ++row) {
    auto x = d.values(row);
    std::string predicted;
    if (inside_dims(a, x, r.reduced_dims)) {
      predicted = class_a;
    } else if (inside_dims(b, x, r.reduced_dims)) {
      predicted = class_b;
    } else if (fallback == PairFallback::kNearestInterval) {
      const double da = gap_distance(a, x, r.reduced_dims);
      const double db = gap_distance(b, x, r.reduced_dims);
      predicted = da < db ? class_a : db < da ? class_b : preferred;
    } else {
      predicted = preferred;
    }
    if (predicted == d.label_of(row)) ++r.correct;
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);

  std::ostringstream rule;
  auto describe = [&](const HyperBlock& hb, const std::string& cls) {
    rule << "if ";
    for (std::size_t k = 0; k < r.reduced_dims.size(); ++k) {
      const std::size_t c = r.reduced_dims[k];
      if (k) rule << " & ";
      rule << 'x' << c + 1 << " in " << format_interval(hb.bounds[c]);
    }
    rule << " then " << cls << "; ";
  };
  describe(a, class_a);
  describe(b, class_b);
  rule << (fallback == PairFallback::kNearestInterval ? "else nearest block" : "else " + preferred);
  r.rule = rule.str();
  return r;
}

QuantileHistogram quantile_histogram(std::vector<double> values, std::size_t q) {
  if (values.empty()) throw Error(ErrorCode::kEmptyBlock, "quantiles of an empty block");
  if (q == 0) throw Error(ErrorCode::kInvalidArgument, "quantile count must be positive");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();

  std::vector<double> edges;
  for (std::size_t b = 0; b < q; ++b) edges.push_back(values[std::min(m - 1, b * m / q)]);
  edges.push_back(values.back());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  QuantileHistogram h;
  if (edges.size() == 1) {
    h.bins.push_back({edges.front(), edges.front(), m});
  } else {
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
      const bool last = j + 2 == edges.size();
      const auto lo = std::lower_bound(values.begin(), values.end(), edges[j]);
      const auto hi = last ? values.end()
                           : std::lower_bound(values.begin(), values.end(), edges[j + 1]);
      h.bins.push_back({edges[j], edges[j + 1], static_cast<std::size_t>(hi - lo)});
    }
  }
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && values[j] == values[i]) ++j;
    h.value_frequencies.emplace_back(values[i], j - i);
    i = j;
  }
  h.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m);
  return h;
}

QuantileHistogram quantile_histogram(const HyperBlock& hb, const Dataset& points,
                                     std::size_t coordinate, std::size_t q) {
  if (coordinate >= hb.dimension()) {
    throw Error(ErrorCode::kInvalidArgument, "coordinate outside the block");
  }
  std::vector<double> values;
  for (PointId id : hb.members) values.push_back(points.values(points.row_of(id))[coordinate]);
  return quantile_histogram(std::move(values), q);
}

}  // namespace hyperblocks
