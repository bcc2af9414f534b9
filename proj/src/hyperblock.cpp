#include "hyperblocks/hyperblock.hpp"

#include <algorithm>
#include <cmath>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

std::string_view to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::kSeed: return "seed";
    case BlockKind::kPure: return "pure";
    case BlockKind::kMixed: return "mixed";
  }
  return "pure";
}

namespace {

void require_same_dimension(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

std::vector<double> HyperBlock::center() const {
  std::vector<double> c(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) c[i] = bounds[i].center();
  return c;
}

double HyperBlock::volume() const {
  double v = 1.0;
  for (const auto& iv : bounds) v *= iv.width();
  return v;
}

bool contains(const Bounds& bounds, std::span<const double> x) {
  require_same_dimension(bounds.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!bounds[i].contains(x[i])) return false;
  }
  return true;
}

bool contains(const HyperBlock& hb, std::span<const double> x) { return contains(hb.bounds, x); }

HyperBlock make_block(Bounds bounds, const Dataset& d) {
  require_same_dimension(bounds.size(), d.dimension());
  for (const auto& iv : bounds) {
    if (!(iv.lo <= iv.hi)) throw Error(ErrorCode::kInvalidArgument, "interval with lo > hi");
  }
  HyperBlock hb;
  hb.bounds = std::move(bounds);
  std::vector<std::size_t> counts(d.class_labels().size(), 0);
  for (std::size_t row = 0; row < d.size(); ++row) {
    if (contains(hb.bounds, d.values(row))) {
      hb.members.push_back(d.id(row));
      ++counts[d.class_of(row)];
    }
  }
  std::sort(hb.members.begin(), hb.members.end());

  std::size_t nonzero = 0;
  std::size_t best = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    ++nonzero;
    hb.class_counts[d.class_labels()[c]] = counts[c];
    best = std::max(best, counts[c]);
  }
  std::size_t at_best = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == best && best > 0) {
      ++at_best;
      hb.dominant_class = d.class_labels()[c];
    }
  }
  if (at_best != 1) hb.dominant_class.reset();

  const bool zero_width = std::all_of(hb.bounds.begin(), hb.bounds.end(),
                                      [](const Interval& iv) { return iv.lo == iv.hi; });
  if (nonzero > 1) {
    hb.kind = BlockKind::kMixed;
  } else {
    hb.kind = zero_width ? BlockKind::kSeed : BlockKind::kPure;
  }
  return hb;
}

HyperBlock point_block(const Dataset& d, std::size_t row) {
  Bounds b;
  for (double v : d.values(row)) b.push_back({v, v});
  return make_block(std::move(b), d);
}

Bounds envelope(const Bounds& a, const Bounds& b) {
  require_same_dimension(a.size(), b.size());
  Bounds out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = {std::min(a[i].lo, b[i].lo), std::max(a[i].hi, b[i].hi)};
  }
  return out;
}

HyperBlock envelope(const HyperBlock& a, const HyperBlock& b, const Dataset& d) {
  return make_block(envelope(a.bounds, b.bounds), d);
}

double impurity(const HyperBlock& hb) {
  if (hb.members.empty()) throw Error(ErrorCode::kEmptyBlock, "impurity of an empty block");
  std::size_t best = 0;
  for (const auto& [label, count] : hb.class_counts) best = std::max(best, count);
  return 1.0 - static_cast<double>(best) / static_cast<double>(hb.members.size());
}

std::vector<std::size_t> overlap_coords(const Bounds& a, const Bounds& b) {
  require_same_dimension(a.size(), b.size());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].intersects(b[i])) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> overlap_coords(const HyperBlock& a, const HyperBlock& b) {
  return overlap_coords(a.bounds, b.bounds);
}

HyperCube hypercube_from_seed(std::span<const double> center, double side_length,
                              const Dataset& d) {
  if (!(side_length > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "hypercube side length must be positive");
  }
  require_same_dimension(center.size(), d.dimension());
  Bounds b(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (!(center[i] >= 0.0 && center[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "hypercube center must lie in [0,1]^n");
    }
    b[i] = {std::max(0.0, center[i] - side_length / 2),
            std::min(1.0, center[i] + side_length / 2)};
  }
  return HyperCube{std::vector<double>(center.begin(), center.end()), side_length,
                   make_block(std::move(b), d)};
}

}  // namespace hyperblocks
