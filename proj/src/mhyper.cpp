#include "hyperblocks/mhyper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

std::string_view to_string(CombineMode mode) {
  switch (mode) {
    case CombineMode::kEnvelope: return "envelope";
    case CombineMode::kCenterInRange: return "center";
    case CombineMode::kSharedPoint: return "shared-point";
    case CombineMode::kSharedFace: return "shared-face";
  }
  return "envelope";
}

CombineMode combine_mode_from_string(std::string_view name) {
  if (name == "envelope" || name == "m1-envelope") return CombineMode::kEnvelope;
  if (name == "center" || name == "m1") return CombineMode::kCenterInRange;
  if (name == "shared-point" || name == "m2") return CombineMode::kSharedPoint;
  if (name == "shared-face" || name == "m3") return CombineMode::kSharedFace;
  throw Error(ErrorCode::kInvalidArgument, "unknown combine mode '" + std::string(name) + "'");
}

void MHyperConfig::validate() const {
  if (!(impurity_threshold >= 0.0 && impurity_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "impurity threshold must lie in [0,1)");
  }
  if (face_epsilon < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative face epsilon");
}

namespace {

// Row scan order for seeds and partners.
std::vector<std::size_t> scan_order(const Dataset& d, const MHyperConfig& cfg) {
  std::vector<std::size_t> order;
  if (cfg.seed_order.empty()) {
    order.resize(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d.id(a) < d.id(b); });
    return order;
  }
  std::set<std::size_t> seen;
  for (PointId id : cfg.seed_order) {
    const std::size_t row = d.row_of(id);
    if (!seen.insert(row).second) {
      throw Error(ErrorCode::kInvalidArgument, "seed order repeats id " + std::to_string(id));
    }
    order.push_back(row);
  }
  if (order.size() != d.size()) {
    throw Error(ErrorCode::kInvalidArgument, "seed order must be a permutation of all ids");
  }
  return order;
}

class BoxScanner {
 public:
  explicit BoxScanner(const Dataset& d) : d_(d), n_(d.dimension()) {}

  bool inside(const std::vector<double>& lo, const std::vector<double>& hi,
              std::size_t row) const {
    const double* v = d_.raw_values().data() + row * n_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (v[i] < lo[i] || v[i] > hi[i]) return false;
    }
    return true;
  }

  // True when every point inside the box has class `cls` and, when
  // `forbidden` is given, none of them is flagged there.
  bool admissible(const std::vector<double>& lo, const std::vector<double>& hi, ClassIndex cls,
                  const std::vector<char>* forbidden) const {
    for (std::size_t row = 0; row < d_.size(); ++row) {
      if (!inside(lo, hi, row)) continue;
      if (d_.class_of(row) != cls) return false;
      if (forbidden && (*forbidden)[row]) return false;
    }
    return true;
  }

 private:
  const Dataset& d_;
  std::size_t n_;
};

Bounds to_bounds(const std::vector<double>& lo, const std::vector<double>& hi) {
  Bounds b(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) b[i] = {lo[i], hi[i]};
  return b;
}

}  // namespace

std::vector<HyperBlock> merge_pure(const Dataset& d, const MHyperConfig& cfg) {
  if (d.empty()) throw Error(ErrorCode::kEmptyDataset, "merge_pure needs a non-empty dataset");
  cfg.validate();
  const auto order = scan_order(d, cfg);
  const BoxScanner scan(d);
  const std::size_t n = d.dimension();

  std::vector<char> covered(d.size(), 0);
  std::vector<HyperBlock> blocks;
  for (std::size_t seed : order) {
    if (covered[seed]) continue;
    const ClassIndex cls = d.class_of(seed);
    auto sv = d.values(seed);
    std::vector<double> lo(sv.begin(), sv.end());
    std::vector<double> hi = lo;
    const std::vector<char>* forbidden = cfg.allow_overlap ? nullptr : &covered;

    if (scan.admissible(lo, hi, cls, nullptr)) {
      std::vector<double> next_lo(n), next_hi(n);
      for (std::size_t cand : order) {
        if (cand == seed || covered[cand] || d.class_of(cand) != cls) continue;
        if (scan.inside(lo, hi, cand)) continue;
        auto cv = d.values(cand);
        for (std::size_t i = 0; i < n; ++i) {
          next_lo[i] = std::min(lo[i], cv[i]);
          next_hi[i] = std::max(hi[i], cv[i]);
        }
        if (scan.admissible(next_lo, next_hi, cls, forbidden)) {
          lo.swap(next_lo);
          hi.swap(next_hi);
        }
      }
    }

    HyperBlock block = make_block(to_bounds(lo, hi), d);
    for (PointId id : block.members) covered[d.row_of(id)] = 1;
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<HyperBlock> merge_pure(const NormalizedDataset& d, const MHyperConfig& cfg) {
  return merge_pure(d.data, cfg);
}

namespace {

bool within_threshold(const HyperBlock& hb, double threshold) {
  if (hb.members.empty()) return false;
  std::size_t best = 0;
  for (const auto& [label, count] : hb.class_counts) best = std::max(best, count);
  const double off = static_cast<double>(hb.members.size() - best);
  return off <= threshold * static_cast<double>(hb.members.size()) + 1e-9;
}

bool bounds_inside(const Bounds& inner, const Bounds& outer) {
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i].lo < outer[i].lo || inner[i].hi > outer[i].hi) return false;
  }
  return true;
}

struct Candidate {
  bool admissible = false;
  double impurity = 0.0;
  double volume = 0.0;
};

}  // namespace

HBModel merge_dominant(std::vector<HyperBlock> blocks, const Dataset& d,
                       const MHyperConfig& cfg) {
  cfg.validate();
  for (const auto& b : blocks) {
    if (b.dimension() != d.dimension()) {
      throw Error(ErrorCode::kDimensionMismatch, "block dimension differs from dataset");
    }
  }

  struct Working {
    std::size_t uid;
    HyperBlock block;
  };
  std::vector<Working> work;
  std::size_t next_uid = 0;
  for (auto& b : blocks) work.push_back({next_uid++, std::move(b)});

  std::map<std::pair<std::size_t, std::size_t>, Candidate> cache;
  auto evaluate = [&](const Working& a, const Working& b) -> const Candidate& {
    auto key = std::make_pair(a.uid, b.uid);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Candidate c;
    if (combine_mode_check(a.block, b.block, cfg.combine_mode, cfg.face_epsilon)) {
      HyperBlock joint = envelope(a.block, b.block, d);
      if (within_threshold(joint, cfg.impurity_threshold)) {
        c.admissible = true;
        c.impurity = impurity(joint);
        c.volume = joint.volume();
      }
    }
    return cache.emplace(key, c).first->second;
  };

  while (true) {
    std::size_t best_i = 0, best_j = 0;
    const Candidate* best = nullptr;
    for (std::size_t i = 0; i < work.size(); ++i) {
      for (std::size_t j = i + 1; j < work.size(); ++j) {
        const Candidate& c = evaluate(work[i], work[j]);
        if (!c.admissible) continue;
        if (!best || c.impurity < best->impurity ||
            (c.impurity == best->impurity && c.volume < best->volume)) {
          best = &c;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (!best) break;

    HyperBlock joint = envelope(work[best_i].block, work[best_j].block, d);
    std::vector<Working> next;
    next.reserve(work.size() - 1);
    for (std::size_t k = 0; k < work.size(); ++k) {
      if (k == best_i) {
        next.push_back({next_uid++, joint});
      } else if (k != best_j && !bounds_inside(work[k].block.bounds, joint.bounds)) {
        next.push_back(std::move(work[k]));
      }
    }
    work = std::move(next);
  }

  HBModel model;
  model.config = cfg;
  model.fingerprint = d.fingerprint();
  for (auto& w : work) {
    if (within_threshold(w.block, cfg.impurity_threshold)) {
      model.blocks.push_back(std::move(w.block));
    } else {
      model.refused.push_back(std::move(w.block));
    }
  }
  return model;
}

HBModel merge_dominant(std::vector<HyperBlock> blocks, const NormalizedDataset& d,
                       const MHyperConfig& cfg) {
  return merge_dominant(std::move(blocks), d.data, cfg);
}

HBModel discover(const NormalizedDataset& d, const MHyperConfig& cfg) {
  return merge_dominant(merge_pure(d, cfg), d, cfg);
}

std::vector<HyperBlock> dedup(std::vector<HyperBlock> blocks) {
  std::vector<HyperBlock> out;
  for (auto& b : blocks) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const HyperBlock& o) { return o.bounds == b.bounds; });
    if (!seen) out.push_back(std::move(b));
  }
  return out;
}

bool combine_mode_check(const HyperBlock& a, const HyperBlock& b, CombineMode mode,
                        double face_epsilon) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "combine check on blocks of different dimension");
  }
  switch (mode) {
    case CombineMode::kEnvelope:
      return true;
    case CombineMode::kCenterInRange:
      return contains(b.bounds, a.center()) && contains(a.bounds, b.center());
    case CombineMode::kSharedPoint: {
      auto ia = a.members.begin();
      auto ib = b.members.begin();
      while (ia != a.members.end() && ib != b.members.end()) {
        if (*ia == *ib) return true;
        if (*ia < *ib) ++ia; else ++ib;
      }
      return false;
    }
    case CombineMode::kSharedFace: {
      std::vector<std::size_t> differing;
      for (std::size_t i = 0; i < a.dimension(); ++i) {
        const bool same = std::abs(a.bounds[i].lo - b.bounds[i].lo) <= face_epsilon &&
                          std::abs(a.bounds[i].hi - b.bounds[i].hi) <= face_epsilon;
        if (!same) differing.push_back(i);
      }
      if (differing.empty()) return true;
      if (differing.size() > 1) return false;
      const std::size_t i = differing.front();
      return b.bounds[i].contains(a.bounds[i].center()) &&
             a.bounds[i].contains(b.bounds[i].center());
    }
  }
  return false;
}

}  // namespace hyperblocks
