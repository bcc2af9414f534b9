#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperblocks/dataset.hpp"

namespace hyperblocks {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  bool intersects(const Interval& o) const noexcept { return lo <= o.hi && o.lo <= hi; }
  double width() const noexcept { return hi - lo; }
  double center() const noexcept { return 0.5 * (lo + hi); }
  bool operator==(const Interval&) const = default;
};

using Bounds = std::vector<Interval>;

enum class BlockKind { kSeed, kPure, kMixed };

std::string_view to_string(BlockKind kind);

/// Axis-aligned box in normalized units with the dataset points it holds.
///
/// Invariants: lo <= hi per coordinate; every member lies inside the bounds;
/// class_counts sums to the member count; kind is kMixed exactly when more
/// than one class has members, kSeed marks a single-class zero-width block.
struct HyperBlock {
  Bounds bounds;
  std::vector<PointId> members;  // ascending
  std::map<std::string, std::size_t> class_counts;
  std::optional<std::string> dominant_class;
  BlockKind kind = BlockKind::kPure;

  std::size_t dimension() const noexcept { return bounds.size(); }
  std::size_t size() const noexcept { return members.size(); }
  std::vector<double> center() const;
  double volume() const;

  bool operator==(const HyperBlock&) const = default;
};

/// Recomputes members, class counts, dominant class and kind of `bounds`
/// against every point of `d`.
HyperBlock make_block(Bounds bounds, const Dataset& d);

/// Zero-width block at a point of `d` (plus any coincident points).
HyperBlock point_block(const Dataset& d, std::size_t row);

bool contains(const Bounds& bounds, std::span<const double> x);
bool contains(const HyperBlock& hb, std::span<const double> x);

Bounds envelope(const Bounds& a, const Bounds& b);
/// Bounding envelope of two blocks with membership recomputed from `d`.
HyperBlock envelope(const HyperBlock& a, const HyperBlock& b, const Dataset& d);

/// 1 - (largest class count) / (member count). Throws kEmptyBlock.
double impurity(const HyperBlock& hb);

/// Coordinate indices where the closed intervals of `a` and `b` intersect.
std::vector<std::size_t> overlap_coords(const HyperBlock& a, const HyperBlock& b);
std::vector<std::size_t> overlap_coords(const Bounds& a, const Bounds& b);

/// Hypercube of side `side_length` centered at `center`: [c - L/2, c + L/2]
/// per coordinate, clipped to [0,1].
struct HyperCube {
  std::vector<double> center;
  double side_length = 0.0;
  HyperBlock block;
};

HyperCube hypercube_from_seed(std::span<const double> center, double side_length,
                              const Dataset& d);

/// A "distance d from the center line" is a half-side, i.e. L = 2d.
inline double side_from_center_distance(double distance) { return 2.0 * distance; }

}  // namespace hyperblocks
