#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperblocks/dataset.hpp"
#include "hyperblocks/hyperblock.hpp"
#include "hyperblocks/mhyper.hpp"

namespace hyperblocks {

enum class DistanceVariant {
  kCenter,   // N1: midpoint of the bounds
  kMean,     // N2: coordinate-wise mean of members
  kNearest,  // N3: closest member
};

std::string_view to_string(DistanceVariant v);
DistanceVariant distance_variant_from_string(std::string_view name);

/// Euclidean distance from `x` to a block under `variant`. Member coordinates
/// for N2/N3 are looked up in `points`. Throws kEmptyBlock for N2/N3 on an
/// empty block and kDimensionMismatch on size mismatch.
double distance_to_hb(std::span<const double> x, const HyperBlock& hb, DistanceVariant variant,
                      const Dataset& points);

struct LearnConfig {
  std::size_t k_min = 1;
  std::size_t k_max = 5;
  std::size_t k_step = 2;
  /// Accuracy target on the k-learning split.
  double accuracy_threshold = 0.0;
  DistanceVariant variant = DistanceVariant::kMean;
  /// Share of the training data used to learn blocks; the rest learns k.
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  /// Highest-risk class first. Empty means reverse label order.
  std::vector<std::string> class_priority;
  /// Only blocks within this distance may vote.
  double vicinity_radius = std::numeric_limits<double>::infinity();

  bool fixed_k() const noexcept { return k_min == k_max; }
};

/// Outcome of the single-point-block check: a point that ended up alone in
/// its block is compared with the nearest other block.
struct SinglePointCheck {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

struct KScore {
  std::size_t k = 0;
  double accuracy = 0.0;
};

struct HyperModel {
  HBModel hb_model;
  std::size_t k = 1;
  DistanceVariant variant = DistanceVariant::kMean;
  std::vector<std::string> class_priority;
  double accuracy_threshold = 0.0;
  std::size_t k_min = 1;
  std::size_t k_max = 1;
  double vicinity_radius = std::numeric_limits<double>::infinity();
  /// Normalized training points (member coordinates for N2/N3).
  Dataset points;
  /// Raw -> normalized mapping used for inputs.
  std::vector<CoordinateRange> ranges;

  SinglePointCheck single_point_check;
  std::vector<KScore> k_scores;
  bool accuracy_target_missed = false;
};

enum class RuleFired { kR1, kR2, kR3, kRefusal };

std::string_view to_string(RuleFired r);

struct Evidence {
  std::size_t block_index = 0;
  double distance = 0.0;
};

struct Classification {
  std::optional<std::string> outcome;  // nullopt means refused
  RuleFired rule = RuleFired::kRefusal;
  std::vector<Evidence> evidence;

  bool refused() const noexcept { return !outcome.has_value(); }
};

/// Class a block votes for: its dominant class, or for a tie the first
/// tied class in `class_priority`.
std::string effective_class(const HyperBlock& hb, const std::vector<std::string>& class_priority);

/// Applies R1 (membership), then the k nearest blocks vote (R3, or R2 when a
/// single block decides). `x` must already be normalized.
Classification classify(std::span<const double> x, const HyperModel& m);

/// Steps: split into block-learning and k-learning parts, discover blocks,
/// check single-point blocks, pick k on the held-out part.
HyperModel learn(const NormalizedDataset& train, const MHyperConfig& cfg,
                 const LearnConfig& learn_cfg);

/// Wraps an already discovered block model (no k search).
HyperModel make_model(HBModel hb_model, const NormalizedDataset& points, std::size_t k,
                      DistanceVariant variant, std::vector<std::string> class_priority);

/// Moves blocks with fewer than `min_block_size` members to refused.
HyperModel classify_with_small_hb_refusal(HyperModel m, std::size_t min_block_size);

/// R1-only coverage over a labeled normalized dataset: recall = covered/total
/// and precision = correct/covered.
struct CoverageReport {
  std::size_t total = 0;
  std::size_t covered = 0;
  std::size_t correct = 0;
  double recall() const { return total ? static_cast<double>(covered) / total : 0.0; }
  double precision() const { return covered ? static_cast<double>(correct) / covered : 0.0; }
};

CoverageReport r1_coverage(const HyperModel& m, const Dataset& normalized);

/// Default risk ordering: labels in reverse lexicographic order, so for WBC
/// ("B", "M") malignant comes first.
std::vector<std::string> default_class_priority(const std::vector<std::string>& labels);

}  // namespace hyperblocks
