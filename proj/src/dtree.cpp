#include "hyperblocks/dtree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::kLess: return "<";
    case Comparator::kLessEqual: return "<=";
    case Comparator::kGreater: return ">";
    case Comparator::kGreaterEqual: return ">=";
  }
  return "<";
}

bool Condition::holds(double v) const noexcept {
  switch (op) {
    case Comparator::kLess: return v < threshold;
    case Comparator::kLessEqual: return v <= threshold;
    case Comparator::kGreater: return v > threshold;
    case Comparator::kGreaterEqual: return v >= threshold;
  }
  return false;
}

bool Branch::holds(std::span<const double> x) const {
  for (const auto& c : conditions) {
    if (c.coordinate >= x.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "predicate coordinate outside the point");
    }
    if (!c.holds(x[c.coordinate])) return false;
  }
  return true;
}

bool contains(const FlaggedBox& box, std::span<const double> x) {
  if (box.size() != x.size()) throw Error(ErrorCode::kDimensionMismatch, "box/point dimension");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!box[i].contains(x[i])) return false;
  }
  return true;
}

FlaggedBox branch_to_hb(const Branch& branch, const Bounds& domain) {
  FlaggedBox box;
  box.reserve(domain.size());
  for (const auto& iv : domain) box.push_back({iv.lo, iv.hi, false, false});

  for (const auto& c : branch.conditions) {
    if (c.coordinate >= box.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "predicate on x" + std::to_string(c.coordinate + 1) + " outside the domain");
    }
    auto& iv = box[c.coordinate];
    const bool strict = c.op == Comparator::kLess || c.op == Comparator::kGreater;
    if (c.op == Comparator::kLess || c.op == Comparator::kLessEqual) {
      if (c.threshold < iv.hi) {
        iv.hi = c.threshold;
        iv.hi_open = strict;
      } else if (c.threshold == iv.hi) {
        iv.hi_open = iv.hi_open || strict;
      }
    } else {
      if (c.threshold > iv.lo) {
        iv.lo = c.threshold;
        iv.lo_open = strict;
      } else if (c.threshold == iv.lo) {
        iv.lo_open = iv.lo_open || strict;
      }
    }
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    const auto& iv = box[i];
    if (iv.lo > iv.hi || (iv.lo == iv.hi && (iv.lo_open || iv.hi_open))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "contradictory constraints on x" + std::to_string(i + 1));
    }
  }
  return box;
}

Branch hb_to_branch(const FlaggedBox& box, const Bounds& domain) {
  if (box.size() != domain.size()) throw Error(ErrorCode::kDimensionMismatch, "box/domain size");
  Branch b;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const auto& iv = box[i];
    if (iv.lo > domain[i].lo || (iv.lo == domain[i].lo && iv.lo_open)) {
      b.conditions.push_back(
          {i, iv.lo_open ? Comparator::kGreater : Comparator::kGreaterEqual, iv.lo});
    }
    if (iv.hi < domain[i].hi || (iv.hi == domain[i].hi && iv.hi_open)) {
      b.conditions.push_back({i, iv.hi_open ? Comparator::kLess : Comparator::kLessEqual, iv.hi});
    }
  }
  return b;
}

Branch hb_to_branch(const HyperBlock& hb, const Bounds& domain) {
  FlaggedBox box;
  for (const auto& iv : hb.bounds) box.push_back({iv.lo, iv.hi, false, false});
  Branch b = hb_to_branch(box, domain);
  b.label = hb.dominant_class;
  return b;
}

HyperBlock to_hyperblock(const FlaggedBox& box, const Dataset& d, double epsilon) {
  Bounds bounds;
  for (const auto& iv : box) {
    Interval closed{iv.lo_open ? iv.lo + epsilon : iv.lo, iv.hi_open ? iv.hi - epsilon : iv.hi};
    if (closed.lo > closed.hi) closed.lo = closed.hi = 0.5 * (iv.lo + iv.hi);
    bounds.push_back(closed);
  }
  return make_block(std::move(bounds), d);
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Condition parse_condition(std::string_view text, const std::vector<std::string>& names) {
  struct Op {
    std::string_view token;
    Comparator op;
  };
  static constexpr Op kOps[] = {
      {"<=", Comparator::kLessEqual}, {">=", Comparator::kGreaterEqual},
      {"≤", Comparator::kLessEqual}, {"≥", Comparator::kGreaterEqual},
      {"<", Comparator::kLess}, {">", Comparator::kGreater},
  };
  for (const auto& candidate : kOps) {
    const auto pos = text.find(candidate.token);
    if (pos == std::string_view::npos) continue;
    const auto lhs = strip(text.substr(0, pos));
    const auto rhs = strip(text.substr(pos + candidate.token.size()));

    std::optional<std::size_t> coord;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (lower(names[i]) == lower(lhs)) coord = i;
    }
    if (!coord && lhs.size() > 1 && (lhs[0] == 'x' || lhs[0] == 'X')) {
      std::size_t k = 0;
      auto [p, ec] = std::from_chars(lhs.data() + 1, lhs.data() + lhs.size(), k);
      if (ec == std::errc{} && p == lhs.data() + lhs.size() && k >= 1) coord = k - 1;
    }
    if (!coord) {
      throw Error(ErrorCode::kParse, "unknown coordinate '" + std::string(lhs) + "'");
    }
    double t = 0.0;
    auto [p, ec] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), t);
    if (ec != std::errc{} || p != rhs.data() + rhs.size()) {
      throw Error(ErrorCode::kParse, "bad threshold '" + std::string(rhs) + "'");
    }
    return {*coord, candidate.op, t};
  }
  throw Error(ErrorCode::kParse, "no comparator in '" + std::string(text) + "'");
}

}  // namespace

Branch parse_branch(std::string_view text, const std::vector<std::string>& coordinate_names) {
  Branch b;
  while (true) {
    const auto amp = text.find('&');
    const auto part = strip(text.substr(0, amp));
    if (!part.empty()) b.conditions.push_back(parse_condition(part, coordinate_names));
    if (amp == std::string_view::npos) break;
    text.remove_prefix(amp + 1);
    if (!text.empty() && text.front() == '&') text.remove_prefix(1);
  }
  return b;
}

std::string render_branch(const Branch& branch) {
  std::string out;
  for (const auto& c : branch.conditions) {
    if (!out.empty()) out += " & ";
    out += "x" + std::to_string(c.coordinate + 1) + " " + std::string(to_string(c.op)) + " " +
           format_number(c.threshold);
  }
  return out;
}

std::optional<CommonRoot> common_root(const Branch& a, const Branch& b) {
  auto is_upper = [](Comparator op) { return op == Comparator::kLessEqual; };
  auto is_lower = [](Comparator op) { return op == Comparator::kGreater; };
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    for (std::size_t j = 0; j < b.conditions.size(); ++j) {
      const auto& ca = a.conditions[i];
      const auto& cb = b.conditions[j];
      if (ca.coordinate != cb.coordinate || ca.threshold != cb.threshold) continue;
      const bool a_left = is_upper(ca.op) && is_lower(cb.op);
      const bool b_left = is_lower(ca.op) && is_upper(cb.op);
      if (!a_left && !b_left) continue;
      Branch ra = a, rb = b;
      ra.conditions.erase(ra.conditions.begin() + static_cast<long>(i));
      rb.conditions.erase(rb.conditions.begin() + static_cast<long>(j));
      if (a_left) return CommonRoot{ca.coordinate, ca.threshold, std::move(ra), std::move(rb)};
      return CommonRoot{ca.coordinate, ca.threshold, std::move(rb), std::move(ra)};
    }
  }
  return std::nullopt;
}

std::size_t TreeNode::size() const {
  return std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t DecisionTree::branch_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf; }));
}

std::size_t DecisionTree::internal_count() const { return nodes.size() - branch_count(); }

namespace {

double entropy(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

class Id3Builder {
 public:
  Id3Builder(const Dataset& d, const Id3Config& cfg, DecisionTree& tree)
      : d_(d), cfg_(cfg), tree_(tree), classes_(d.class_labels().size()) {}

  std::size_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t index = tree_.nodes.size();
    tree_.nodes.emplace_back();
    {
      auto& node = tree_.nodes[index];
      node.depth = depth;
      node.class_counts.assign(classes_, 0);
      for (std::size_t r : rows) ++node.class_counts[d_.class_of(r)];
      const auto best = std::max_element(node.class_counts.begin(), node.class_counts.end());
      node.label = d_.class_labels()[static_cast<std::size_t>(best - node.class_counts.begin())];
    }
    const auto counts = tree_.nodes[index].class_counts;
    const std::size_t nonzero =
        static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                               [](std::size_t c) { return c > 0; }));
    if (nonzero <= 1 || (cfg_.max_depth && depth >= *cfg_.max_depth) ||
        rows.size() < 2 * cfg_.min_leaf) {
      return index;
    }

    auto split = best_split(rows, counts);
    if (!split) return index;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (d_.values(r)[split->coordinate] <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::size_t l = build(std::move(left), depth + 1);
    const std::size_t r = build(std::move(right), depth + 1);
    auto& node = tree_.nodes[index];
    node.leaf = false;
    node.coordinate = split->coordinate;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return index;
  }

 private:
  struct Split {
    std::size_t coordinate;
    double threshold;
    double gain;
  };

  std::optional<Split> best_split(const std::vector<std::size_t>& rows,
                                  const std::vector<std::size_t>& counts) const {
    const double parent = entropy(counts, rows.size());
    std::optional<Split> best;
    std::vector<std::size_t> sorted = rows;
    for (std::size_t c = 0; c < d_.dimension(); ++c) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return d_.values(a)[c] < d_.values(b)[c];
      });
      std::vector<std::size_t> left(classes_, 0);
      std::vector<std::size_t> right = counts;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const std::size_t cls = d_.class_of(sorted[i]);
        ++left[cls];
        --right[cls];
        const double v = d_.values(sorted[i])[c];
        const double next = d_.values(sorted[i + 1])[c];
        if (v == next) continue;
        const std::size_t nl = i + 1, nr = sorted.size() - nl;
        if (nl < cfg_.min_leaf || nr < cfg_.min_leaf) continue;
        const double child = (static_cast<double>(nl) * entropy(left, nl) +
                              static_cast<double>(nr) * entropy(right, nr)) /
                             static_cast<double>(sorted.size());
        const double gain = parent - child;
        if (!best || gain > best->gain + 1e-12) best = Split{c, 0.5 * (v + next), gain};
      }
    }
    return best;
  }

  const Dataset& d_;
  const Id3Config& cfg_;
  DecisionTree& tree_;
  std::size_t classes_;
};

}  // namespace

DecisionTree id3_train(const Dataset& d, const Id3Config& cfg) {
  if (d.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot train on an empty dataset");
  if (cfg.min_leaf == 0) throw Error(ErrorCode::kInvalidArgument, "min_leaf must be positive");
  DecisionTree tree;
  tree.coordinate_names = d.coordinate_names();
  tree.class_labels = d.class_labels();
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  Id3Builder(d, cfg, tree).build(std::move(rows), 0);
  return tree;
}

TreePrediction predict(const DecisionTree& tree, std::span<const double> x) {
  if (x.size() != tree.coordinate_names.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "input dimension differs from tree");
  }
  std::size_t i = 0;
  while (!tree.nodes[i].leaf) {
    const auto& n = tree.nodes[i];
    i = x[n.coordinate] <= n.threshold ? n.left : n.right;
  }
  return {tree.nodes[i].label, i};
}

std::vector<Branch> branches(const DecisionTree& tree) {
  std::vector<Branch> out;
  std::vector<Condition> path;
  auto walk = [&](auto&& self, std::size_t i) -> void {
    const auto& n = tree.nodes[i];
    if (n.leaf) {
      out.push_back({path, n.label});
      return;
    }
    path.push_back({n.coordinate, Comparator::kLessEqual, n.threshold});
    self(self, n.left);
    path.back().op = Comparator::kGreater;
    self(self, n.right);
    path.pop_back();
  };
  if (!tree.nodes.empty()) walk(walk, 0);
  return out;
}

std::size_t ComplexityReport::units_below(std::size_t n) const {
  return static_cast<std::size_t>(
      std::count_if(unit_sizes.begin(), unit_sizes.end(), [n](std::size_t s) { return s < n; }));
}

double ComplexityReport::fraction_below(std::size_t n) const {
  if (unit_sizes.empty()) return 0.0;
  return static_cast<double>(units_below(n)) / static_cast<double>(unit_sizes.size());
}

ComplexityReport complexity(const DecisionTree& tree) {
  if (tree.nodes.empty()) throw Error(ErrorCode::kInvalidArgument, "empty tree");
  ComplexityReport r;
  r.numbers_stored = 2 * tree.internal_count() + tree.branch_count();
  for (const auto& n : tree.nodes) r.unit_sizes.push_back(n.size());
  r.smallest_unit_size = *std::min_element(r.unit_sizes.begin(), r.unit_sizes.end());
  r.counting_rule = "2 per internal node (coordinate, threshold) + 1 per leaf (class); units = all nodes";
  return r;
}

ComplexityReport complexity(const HBModel& model) {
  if (model.blocks.empty()) throw Error(ErrorCode::kInvalidArgument, "model without blocks");
  ComplexityReport r;
  const std::size_t n = model.blocks.front().dimension();
  r.numbers_stored = model.blocks.size() * (2 * n + 1);
  for (const auto& b : model.blocks) r.unit_sizes.push_back(b.size());
  r.smallest_unit_size = *std::min_element(r.unit_sizes.begin(), r.unit_sizes.end());
  r.counting_rule = "2n bounds + 1 class per block; units = blocks";
  return r;
}

}  // namespace hyperblocks
