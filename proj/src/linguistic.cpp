#include "hyperblocks/linguistic.hpp"

#include <algorithm>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

std::string_view to_string(Third t) {
  switch (t) {
    case Third::kLower: return "lower";
    case Third::kMiddle: return "middle";
    case Third::kUpper: return "upper";
    case Third::kSpread: return "spread";
  }
  return "spread";
}

namespace {

std::size_t third_of(double v) {
  if (v < 1.0 / 3.0) return 0;
  if (v < 2.0 / 3.0) return 1;
  return 2;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

LinguisticDescription describe(const std::vector<std::vector<double>>& points,
                               const std::vector<std::string>& coordinate_names,
                               double threshold, std::string subject) {
  if (points.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot describe an empty point set");
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in (0.5, 1]");
  }
  const std::size_t n = coordinate_names.size();
  LinguisticDescription out;
  out.subject = std::move(subject);

  for (std::size_t c = 0; c < n; ++c) {
    std::array<std::size_t, 3> counts{};
    for (const auto& p : points) {
      if (p.size() != n) throw Error(ErrorCode::kDimensionMismatch, "point width differs from names");
      ++counts[third_of(p[c])];
    }
    CoordinateConcentration cc;
    cc.coordinate = c;
    cc.name = coordinate_names[c];
    for (std::size_t t = 0; t < 3; ++t) {
      cc.fractions[t] = static_cast<double>(counts[t]) / static_cast<double>(points.size());
    }
    const auto top = std::max_element(cc.fractions.begin(), cc.fractions.end());
    cc.concentration = *top;
    cc.third = *top >= threshold ? static_cast<Third>(top - cc.fractions.begin()) : Third::kSpread;
    out.coordinates.push_back(std::move(cc));
  }

  for (Third t : {Third::kLower, Third::kMiddle, Third::kUpper}) {
    ThirdGroup g{t, {}};
    std::vector<std::string> names;
    for (const auto& cc : out.coordinates) {
      if (cc.third != t) continue;
      g.coordinates.push_back(cc.coordinate);
      names.push_back(cc.name);
    }
    if (g.coordinates.empty()) continue;
    const std::string where = " concentrated in the " + std::string(to_string(t)) + " third.";
    out.sentences.push_back(names.size() == 1 ? "Coordinate " + names.front() + " is" + where
                                              : "Coordinates " + join_names(names) + " are" + where);
    out.groups.push_back(std::move(g));
  }
  for (const auto& cc : out.coordinates) {
    if (cc.third == Third::kSpread) {
      out.sentences.push_back("Coordinate " + cc.name + " is spread across its range.");
    }
  }
  return out;
}

namespace {

std::vector<std::vector<double>> rows_of(const Dataset& d, const std::vector<std::size_t>& rows) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    auto v = d.values(r);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

}  // namespace

LinguisticDescription describe_dataset(const Dataset& normalized, double threshold) {
  std::vector<std::size_t> rows(normalized.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return describe(rows_of(normalized, rows), normalized.coordinate_names(), threshold, "dataset");
}

LinguisticDescription describe_class(const Dataset& normalized, const std::string& label,
                                     double threshold) {
  const auto cls = normalized.class_index(label);
  if (!cls) throw Error(ErrorCode::kNotFound, "unknown class '" + label + "'");
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < normalized.size(); ++r) {
    if (normalized.class_of(r) == *cls) rows.push_back(r);
  }
  return describe(rows_of(normalized, rows), normalized.coordinate_names(), threshold,
                  "class " + label);
}

LinguisticDescription describe_block(const HyperBlock& hb, const Dataset& normalized,
                                     double threshold) {
  std::vector<std::size_t> rows;
  for (PointId id : hb.members) rows.push_back(normalized.row_of(id));
  if (rows.empty()) throw Error(ErrorCode::kEmptyBlock, "cannot describe an empty block");
  return describe(rows_of(normalized, rows), normalized.coordinate_names(), threshold, "block");
}

}  // namespace hyperblocks
