#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperblocks/dataset.hpp"
#include "hyperblocks/hyperblock.hpp"

namespace hyperblocks {

/// Extra gate a candidate pair must pass before its envelope is considered.
/// kEnvelope applies no gate (plain envelope merging).
enum class CombineMode {
  kEnvelope,
  kCenterInRange,  // M1: each center lies inside the other block
  kSharedPoint,    // M2: at least one dataset point belongs to both
  kSharedFace,     // M3: n-1 intervals equal, remaining centers in range
};

std::string_view to_string(CombineMode mode);
CombineMode combine_mode_from_string(std::string_view name);

struct MHyperConfig {
  double impurity_threshold = 0.1;
  /// Seed scan order as point ids; empty means ascending id order.
  std::vector<PointId> seed_order;
  bool allow_overlap = true;
  CombineMode combine_mode = CombineMode::kEnvelope;
  /// Tolerance for interval equality under kSharedFace.
  double face_epsilon = 0.0;

  void validate() const;
};

struct HBModel {
  std::vector<HyperBlock> blocks;
  std::vector<HyperBlock> refused;
  MHyperConfig config;
  std::string fingerprint;
};

/// Grows maximal pure blocks from single-point seeds.
///
/// Seeds are visited in `cfg.seed_order`; a seed already inside an earlier
/// block is skipped. Each seed scans the still-uncovered points of its class
/// in the same order and absorbs a point whenever the recomputed envelope
/// stays pure. A rejected candidate can never become acceptable later (the
/// envelope only grows), so a single pass equals restart-on-success.
///
/// A seed whose location also holds points of another class cannot be pure;
/// it is emitted as a zero-width mixed block so that coverage still holds.
std::vector<HyperBlock> merge_pure(const NormalizedDataset& d, const MHyperConfig& cfg);
std::vector<HyperBlock> merge_pure(const Dataset& d, const MHyperConfig& cfg);

/// Greedy dominant merging: repeatedly joins the pair whose recomputed
/// envelope has the lowest impurity not above the threshold (ties: smaller
/// envelope volume, then lower indices). Blocks whose bounds fall inside a
/// new envelope are absorbed. Blocks left above the threshold are refused.
HBModel merge_dominant(std::vector<HyperBlock> blocks, const NormalizedDataset& d,
                       const MHyperConfig& cfg);
HBModel merge_dominant(std::vector<HyperBlock> blocks, const Dataset& d,
                       const MHyperConfig& cfg);

/// merge_pure followed by merge_dominant.
HBModel discover(const NormalizedDataset& d, const MHyperConfig& cfg);

/// Drops blocks whose bounds equal an earlier block's bounds (exact).
std::vector<HyperBlock> dedup(std::vector<HyperBlock> blocks);

bool combine_mode_check(const HyperBlock& a, const HyperBlock& b, CombineMode mode,
                        double face_epsilon = 0.0);

}  // namespace hyperblocks
