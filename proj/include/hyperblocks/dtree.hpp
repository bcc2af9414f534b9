#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperblocks/dataset.hpp"
#include "hyperblocks/hyperblock.hpp"
#include "hyperblocks/mhyper.hpp"

namespace hyperblocks {

enum class Comparator { kLess, kLessEqual, kGreater, kGreaterEqual };

std::string_view to_string(Comparator c);

/// One threshold predicate `x[coordinate] <op> threshold`.
struct Condition {
  std::size_t coordinate = 0;
  Comparator op = Comparator::kLess;
  double threshold = 0.0;

  bool holds(double v) const noexcept;
  bool operator==(const Condition&) const = default;
};

/// Conjunction of predicates, e.g. a root-to-leaf path of a tree.
struct Branch {
  std::vector<Condition> conditions;
  std::optional<std::string> label;

  bool holds(std::span<const double> x) const;
};

/// Interval with per-end open/closed flags; used only for tree conversions.
struct FlaggedInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const noexcept {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  bool operator==(const FlaggedInterval&) const = default;
};

using FlaggedBox = std::vector<FlaggedInterval>;

bool contains(const FlaggedBox& box, std::span<const double> x);

/// Box of a branch: unconstrained coordinates take the domain interval,
/// strict predicates give open ends. Throws kInvalidArgument when the
/// constraints leave an empty interval.
FlaggedBox branch_to_hb(const Branch& branch, const Bounds& domain);

/// Canonical conjunction of a box: per coordinate a lower predicate when the
/// lower end is inside the domain (or open at its edge), then an upper one.
Branch hb_to_branch(const FlaggedBox& box, const Bounds& domain);
Branch hb_to_branch(const HyperBlock& hb, const Bounds& domain);

/// Closed HyperBlock for a flagged box; open ends are shrunk by `epsilon`.
HyperBlock to_hyperblock(const FlaggedBox& box, const Dataset& d, double epsilon = 1e-9);

/// Parses "x1>5 & x2<6 & x3>2". Coordinates are x<k> (1-based) or names.
Branch parse_branch(std::string_view text, const std::vector<std::string>& coordinate_names = {});
/// Renders "x1 > 5 & x2 < 6" with shortest round-trip numbers.
std::string render_branch(const Branch& branch);

/// Two branches that test the same threshold in opposite directions can hang
/// under one root: left = (x <= threshold) & left_rest, right = (x > ...).
struct CommonRoot {
  std::size_t coordinate = 0;
  double threshold = 0.0;
  Branch left_rest;
  Branch right_rest;
};

std::optional<CommonRoot> common_root(const Branch& a, const Branch& b);

struct TreeNode {
  bool leaf = true;
  std::size_t coordinate = 0;
  double threshold = 0.0;  // left child: value <= threshold
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t depth = 0;
  std::vector<std::size_t> class_counts;
  std::string label;

  std::size_t size() const;
};

struct DecisionTree {
  std::vector<std::string> coordinate_names;
  std::vector<std::string> class_labels;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t depth() const;
  std::size_t branch_count() const;  // number of leaves
  std::size_t internal_count() const;
};

struct Id3Config {
  std::optional<std::size_t> max_depth;
  std::size_t min_leaf = 1;
};

/// Greedy information-gain tree. Thresholds are midpoints of consecutive
/// distinct values; gain ties go to the lower coordinate, then the lower
/// threshold. Zero-gain splits are taken while a node is impure.
DecisionTree id3_train(const Dataset& d, const Id3Config& cfg = {});

struct TreePrediction {
  std::string label;
  std::size_t leaf = 0;
};

TreePrediction predict(const DecisionTree& tree, std::span<const double> x);

/// Root-to-leaf branches in depth-first, left-first order.
std::vector<Branch> branches(const DecisionTree& tree);

struct ComplexityReport {
  std::size_t numbers_stored = 0;
  std::size_t smallest_unit_size = 0;
  std::vector<std::size_t> unit_sizes;
  std::string counting_rule;

  std::size_t units_below(std::size_t n) const;
  double fraction_below(std::size_t n) const;
};

/// Tree: 2 numbers per internal node (coordinate, threshold) + 1 per leaf;
/// units are all nodes.
ComplexityReport complexity(const DecisionTree& tree);
/// Blocks: 2n bounds + 1 class per block; units are blocks.
ComplexityReport complexity(const HBModel& model);

}  // namespace hyperblocks
