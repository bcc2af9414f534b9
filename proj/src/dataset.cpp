#include "hyperblocks/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "hyperblocks/error.hpp"

namespace hyperblocks {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kEmptyBlock: return "empty_block";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kValidation: return "validation_error";
  }
  return "error";
}

Dataset::Dataset(std::vector<std::string> coordinate_names,
                 std::vector<PointId> ids, std::vector<double> values,
                 std::vector<std::string> labels,
                 std::vector<std::string> source_ids)
    : coordinate_names_(std::move(coordinate_names)),
      ids_(std::move(ids)),
      values_(std::move(values)) {
  const std::size_t n = coordinate_names_.size();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dataset needs at least one coordinate");
  }
  if (labels.size() != ids_.size() || values_.size() != ids_.size() * n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "every point needs exactly " + std::to_string(n) + " values and a label");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite coordinate value");
    }
  }
  for (std::size_t row = 0; row < ids_.size(); ++row) {
    if (!row_by_id_.emplace(ids_[row], row).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate point id " + std::to_string(ids_[row]));
    }
  }

  std::set<std::string> distinct(labels.begin(), labels.end());
  class_labels_.assign(distinct.begin(), distinct.end());
  class_index_.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = std::lower_bound(class_labels_.begin(), class_labels_.end(), label);
    class_index_.push_back(static_cast<ClassIndex>(it - class_labels_.begin()));
  }

  if (source_ids.empty()) {
    source_ids_.reserve(ids_.size());
    for (PointId id : ids_) source_ids_.push_back(std::to_string(id));
  } else if (source_ids.size() != ids_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "source id count differs from point count");
  } else {
    source_ids_ = std::move(source_ids);
  }
}

std::optional<std::size_t> Dataset::find_row(PointId id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::row_of(PointId id) const {
  if (auto row = find_row(id)) return *row;
  throw Error(ErrorCode::kNotFound, "unknown point id " + std::to_string(id));
}

std::optional<ClassIndex> Dataset::class_index(const std::string& label) const {
  auto it = std::lower_bound(class_labels_.begin(), class_labels_.end(), label);
  if (it == class_labels_.end() || *it != label) return std::nullopt;
  return static_cast<ClassIndex>(it - class_labels_.begin());
}

Dataset Dataset::subset(std::span<const PointId> ids) const {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (PointId id : ids) rows.push_back(row_of(id));
  std::sort(rows.begin(), rows.end());

  std::vector<PointId> out_ids;
  std::vector<double> out_values;
  std::vector<std::string> out_labels;
  std::vector<std::string> out_sources;
  for (std::size_t row : rows) {
    out_ids.push_back(ids_[row]);
    auto v = values(row);
    out_values.insert(out_values.end(), v.begin(), v.end());
    out_labels.push_back(label_of(row));
    out_sources.push_back(source_ids_[row]);
  }
  return Dataset(coordinate_names_, std::move(out_ids), std::move(out_values),
                 std::move(out_labels), std::move(out_sources));
}

namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void text(const std::string& s) {
    bytes(s.data(), s.size());
    const char sep = '\x1f';
    bytes(&sep, 1);
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::string Dataset::fingerprint() const {
  Fnv1a h;
  for (const auto& name : coordinate_names_) h.text(name);
  for (std::size_t row = 0; row < size(); ++row) {
    const std::int64_t id = ids_[row];
    h.bytes(&id, sizeof id);
    for (double v : values(row)) h.bytes(&v, sizeof v);
    h.text(label_of(row));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

std::vector<double> NormalizedDataset::normalize_point(std::span<const double> raw) const {
  if (raw.size() != ranges.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from schema");
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ranges[i].normalize(raw[i]);
  return out;
}

std::vector<double> NormalizedDataset::denormalize_point(std::span<const double> unit) const {
  if (unit.size() != ranges.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from schema");
  }
  std::vector<double> out(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) out[i] = ranges[i].denormalize(unit[i]);
  return out;
}

Dataset apply_ranges(const Dataset& d, const std::vector<CoordinateRange>& ranges) {
  if (ranges.size() != d.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "range count differs from dataset dimension");
  }
  std::vector<double> values;
  values.reserve(d.raw_values().size());
  std::vector<std::string> labels;
  std::vector<std::string> sources;
  for (std::size_t row = 0; row < d.size(); ++row) {
    auto v = d.values(row);
    for (std::size_t i = 0; i < v.size(); ++i) values.push_back(ranges[i].normalize(v[i]));
    labels.push_back(d.label_of(row));
    sources.push_back(d.source_id(row));
  }
  return Dataset(d.coordinate_names(), d.ids(), std::move(values), std::move(labels),
                 std::move(sources));
}

NormalizedDataset normalize(const Dataset& d) {
  if (d.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot normalize an empty dataset");
  const std::size_t n = d.dimension();
  std::vector<CoordinateRange> ranges(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranges[i].raw_min = ranges[i].raw_max = d.values(0)[i];
  }
  for (std::size_t row = 1; row < d.size(); ++row) {
    auto v = d.values(row);
    for (std::size_t i = 0; i < n; ++i) {
      ranges[i].raw_min = std::min(ranges[i].raw_min, v[i]);
      ranges[i].raw_max = std::max(ranges[i].raw_max, v[i]);
    }
  }
  return NormalizedDataset{apply_ranges(d, ranges), std::move(ranges)};
}

CsvSchema CsvSchema::wbc() {
  CsvSchema s;
  s.id_column = 0;
  s.class_column = 10;
  s.missing_marker = "?";
  s.label_map = {{"2", "B"}, {"4", "M"}};
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::optional<double> parse_real(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

LoadResult load_csv(std::istream& source, const CsvSchema& schema) {
  std::vector<std::string> names;
  std::vector<PointId> ids;
  std::vector<double> values;
  std::vector<std::string> labels;
  std::vector<std::string> sources;
  LoadResult result;

  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first_row = true;
  std::string line;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line, schema.delimiter);
    if (schema.class_column >= cells.size() ||
        (schema.id_column && *schema.id_column >= cells.size())) {
      throw Error(ErrorCode::kParse,
                  "row " + std::to_string(line_no) + ": class/id column outside row width");
    }
    auto is_feature = [&](std::size_t c) {
      return c != schema.class_column && (!schema.id_column || c != *schema.id_column);
    };

    if (first_row) {
      first_row = false;
      width = cells.size();
      bool header = false;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (is_feature(c) && cells[c] != schema.missing_marker && !parse_real(cells[c])) {
          header = true;
          break;
        }
      }
      std::size_t feature_no = 0;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!is_feature(c)) continue;
        ++feature_no;
        names.push_back(header && !cells[c].empty() ? cells[c]
                                                   : "X" + std::to_string(feature_no));
      }
      if (header) continue;
    }
    if (cells.size() != width) {
      throw Error(ErrorCode::kParse, "row " + std::to_string(line_no) + ": expected " +
                                         std::to_string(width) + " cells, got " +
                                         std::to_string(cells.size()));
    }

    const PointId id = static_cast<PointId>(result.raw_rows++);
    bool missing = false;
    std::vector<double> row;
    row.reserve(names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!is_feature(c)) continue;
      if (cells[c] == schema.missing_marker) {
        missing = true;
        continue;
      }
      auto v = parse_real(cells[c]);
      if (!v) {
        throw Error(ErrorCode::kParse, "row " + std::to_string(line_no) +
                                           ": non-numeric feature cell '" + cells[c] + "'");
      }
      row.push_back(*v);
    }
    if (missing) {
      ++result.dropped_rows;
      continue;
    }
    const auto& raw_class = cells[schema.class_column];
    auto mapped = schema.label_map.find(raw_class);
    labels.push_back(mapped == schema.label_map.end() ? raw_class : mapped->second);
    ids.push_back(id);
    values.insert(values.end(), row.begin(), row.end());
    sources.push_back(schema.id_column ? cells[*schema.id_column] : std::to_string(id));
  }

  if (ids.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no rows survived loading",
                std::to_string(result.dropped_rows) + " rows dropped");
  }
  result.dataset = Dataset(std::move(names), std::move(ids), std::move(values),
                           std::move(labels), std::move(sources));
  return result;
}

LoadResult load_csv_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  return load_csv(in, schema);
}

namespace {

// Fisher-Yates driven directly by mt19937_64 output, so the permutation does
// not depend on the standard library's shuffle/distribution implementation.
void deterministic_shuffle(std::vector<PointId>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::vector<PointId>> shuffled_by_class(const Dataset& d, std::uint64_t seed) {
  std::vector<std::vector<PointId>> by_class(d.class_labels().size());
  for (std::size_t row = 0; row < d.size(); ++row) by_class[d.class_of(row)].push_back(d.id(row));
  std::mt19937_64 rng(seed);
  for (auto& ids : by_class) {
    std::sort(ids.begin(), ids.end());
    deterministic_shuffle(ids, rng);
  }
  return by_class;
}

}  // namespace

std::vector<std::vector<PointId>> stratified_folds(const Dataset& d, std::size_t k,
                                                   std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "fold count must be positive");
  if (d.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot fold an empty dataset");
  auto by_class = shuffled_by_class(d, seed);
  std::size_t smallest = d.size();
  for (const auto& ids : by_class) smallest = std::min(smallest, ids.size());
  if (k > smallest) {
    throw Error(ErrorCode::kInvalidArgument,
                "fold count " + std::to_string(k) + " exceeds smallest class size " +
                    std::to_string(smallest));
  }

  std::vector<std::vector<PointId>> folds(k);
  std::size_t deal = 0;
  for (const auto& ids : by_class) {
    for (PointId id : ids) folds[deal++ % k].push_back(id);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

std::pair<std::vector<PointId>, std::vector<PointId>> stratified_split(
    const Dataset& d, double first_fraction, std::uint64_t seed) {
  if (!(first_fraction >= 0.0 && first_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split fraction must lie in [0,1]");
  }
  std::pair<std::vector<PointId>, std::vector<PointId>> out;
  for (const auto& ids : shuffled_by_class(d, seed)) {
    const auto take = static_cast<std::size_t>(
        std::llround(first_fraction * static_cast<double>(ids.size())));
    out.first.insert(out.first.end(), ids.begin(), ids.begin() + static_cast<long>(take));
    out.second.insert(out.second.end(), ids.begin() + static_cast<long>(take), ids.end());
  }
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

}  // namespace hyperblocks
