#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyperblocks/classifier.hpp"
#include "hyperblocks/dataset.hpp"
#include "hyperblocks/dtree.hpp"
#include "hyperblocks/hyperblock.hpp"
#include "hyperblocks/mhyper.hpp"

namespace hyperblocks {

/// Rows are actual classes, columns predicted; refusals are kept per class.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);

  void add(const std::string& actual, const std::optional<std::string>& predicted);
  void merge(const ConfusionMatrix& other);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t count(std::size_t actual, std::size_t predicted) const {
    return counts_[actual][predicted];
  }
  std::size_t refused(std::size_t actual) const { return refused_[actual]; }
  std::size_t total() const;
  std::size_t answered() const;
  std::size_t correct() const;
  /// trace / answered; 0 when nothing was answered.
  double accuracy() const;
  double precision(std::size_t cls) const;
  double recall(std::size_t cls) const;
  std::string to_csv() const;

 private:
  std::size_t index_of(const std::string& label) const;

  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> counts_;
  std::vector<std::size_t> refused_;
};

struct HyperLearner {
  MHyperConfig mhyper;
  LearnConfig learn;
};

struct Id3Learner {
  Id3Config id3;
};

using Learner = std::variant<HyperLearner, Id3Learner>;

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  std::size_t block_count = 0;  // Hyper
  std::size_t selected_k = 0;   // Hyper
  std::size_t depth = 0;        // ID3
  std::size_t branches = 0;     // ID3
  std::size_t nodes = 0;        // ID3
};

struct EvaluationReport {
  std::string learner;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> fold_results;
  double average_accuracy = 0.0;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;
  double average_blocks = 0.0;
  double average_depth = 0.0;
  double average_branches = 0.0;
  std::size_t closest_fold = 0;  // fold whose accuracy is nearest the average
};

/// k-fold stratified cross-validation. Data are min-max normalized once over
/// the whole dataset before folding.
EvaluationReport cross_validate(const Dataset& d, const Learner& learner, std::size_t k,
                                std::uint64_t seed);

/// Conjunction on raw values: if all conjuncts hold then `then_class`.
struct ThresholdRule {
  std::vector<Condition> conjuncts;
  std::string then_class;
  std::string else_class;

  void validate(std::size_t dimension) const;
  std::string to_string() const;
};

struct RuleEvaluation {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

RuleEvaluation evaluate_rule(const ThresholdRule& r, const Dataset& d);

/// Best rule per dimensionality 1..max_dims. The 1-D rule is an exhaustive
/// scan (strict "<" on every distinct value plus "<=" on midpoints); each
/// further conjunct is added greedily. Then/else classes are the majority
/// classes of the two sides.
std::vector<ThresholdRule> simple_rule_search(const Dataset& d, std::size_t max_dims);

struct HeatmapReport {
  std::vector<std::size_t> disjoint_counts;  // per coordinate
  std::size_t total_pairs = 0;

  std::size_t argmax() const;
};

HeatmapReport nonoverlap_heatmap(const std::vector<HyperBlock>& blocks);

/// How points outside both reduced blocks are assigned.
enum class PairFallback {
  kClassPriority,    // head of the class priority
  kNearestInterval,  // closer reduced block (Euclidean gap)
};

struct PairSearchResult {
  bool separable = false;
  std::size_t first_block = 0;   // indices into the input list
  std::size_t second_block = 0;
  std::vector<std::size_t> reduced_dims;
  std::string rule;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

/// Largest block per class for the two most populous classes, restricted to
/// the coordinates where they are disjoint; every point of `d` (normalized)
/// is assigned by membership in the reduced blocks.
PairSearchResult best_pair_search(const std::vector<HyperBlock>& blocks, const Dataset& d,
                                  const std::vector<std::string>& class_priority,
                                  PairFallback fallback = PairFallback::kClassPriority);

struct QuantileBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct QuantileHistogram {
  std::vector<QuantileBin> bins;
  std::vector<std::pair<double, std::size_t>> value_frequencies;
  double mean = 0.0;
};

/// Equal-count bins over one coordinate of the block's members. Edges are
/// member values at ranks floor(b*m/q); repeated edges collapse, so
/// identical values always share a bin. The last bin is closed.
QuantileHistogram quantile_histogram(const HyperBlock& hb, const Dataset& points,
                                     std::size_t coordinate, std::size_t q);
QuantileHistogram quantile_histogram(std::vector<double> values, std::size_t q);

}  // namespace hyperblocks
