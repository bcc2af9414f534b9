#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperblocks {

using PointId = std::int64_t;
using ClassIndex = std::size_t;

/// Labeled n-D points on a common coordinate schema.
///
/// Values are stored row-major in one buffer; `values(row)` returns a view of
/// a single point. Class labels are kept as an ordered (lexicographic) set and
/// each point refers to its label by index.
class Dataset {
 public:
  Dataset() = default;

  /// Builds a dataset; validates finiteness, row width and id uniqueness.
  Dataset(std::vector<std::string> coordinate_names, std::vector<PointId> ids,
          std::vector<double> values, std::vector<std::string> labels,
          std::vector<std::string> source_ids = {});

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dimension() const noexcept { return coordinate_names_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& coordinate_names() const noexcept {
    return coordinate_names_;
  }
  const std::vector<std::string>& class_labels() const noexcept {
    return class_labels_;
  }
  const std::vector<PointId>& ids() const noexcept { return ids_; }
  const std::vector<double>& raw_values() const noexcept { return values_; }

  PointId id(std::size_t row) const { return ids_[row]; }
  std::span<const double> values(std::size_t row) const {
    return {values_.data() + row * dimension(), dimension()};
  }
  ClassIndex class_of(std::size_t row) const { return class_index_[row]; }
  const std::string& label_of(std::size_t row) const {
    return class_labels_[class_index_[row]];
  }
  const std::string& source_id(std::size_t row) const {
    return source_ids_[row];
  }

  /// Row index of a point id; throws kNotFound.
  std::size_t row_of(PointId id) const;
  std::optional<std::size_t> find_row(PointId id) const;
  std::optional<ClassIndex> class_index(const std::string& label) const;

  /// Keeps the rows whose ids are listed (in dataset order).
  Dataset subset(std::span<const PointId> ids) const;

  /// Stable 64-bit FNV-1a fingerprint over names, ids, values and labels,
  /// rendered as 16 hex digits.
  std::string fingerprint() const;

 private:
  std::vector<std::string> coordinate_names_;
  std::vector<PointId> ids_;
  std::vector<double> values_;
  std::vector<std::string> class_labels_;
  std::vector<ClassIndex> class_index_;
  std::vector<std::string> source_ids_;
  std::map<PointId, std::size_t> row_by_id_;
};

struct CoordinateRange {
  double raw_min = 0.0;
  double raw_max = 0.0;

  bool constant() const noexcept { return raw_max == raw_min; }
  double normalize(double v) const noexcept {
    return constant() ? 0.5 : (v - raw_min) / (raw_max - raw_min);
  }
  double denormalize(double u) const noexcept {
    return constant() ? raw_min : raw_min + u * (raw_max - raw_min);
  }
};

/// Min-max normalized view of a Dataset with the scaling retained.
struct NormalizedDataset {
  Dataset data;
  std::vector<CoordinateRange> ranges;

  /// Applies the stored ranges to an arbitrary raw vector.
  std::vector<double> normalize_point(std::span<const double> raw) const;
  std::vector<double> denormalize_point(std::span<const double> unit) const;
};

NormalizedDataset normalize(const Dataset& d);
/// Normalizes with ranges learned elsewhere (model application).
Dataset apply_ranges(const Dataset& d, const std::vector<CoordinateRange>& ranges);

struct CsvSchema {
  std::optional<std::size_t> id_column;
  std::size_t class_column = 0;
  std::string missing_marker = "?";
  char delimiter = ',';
  /// Raw class cell -> label; cells not in the map keep their text.
  std::map<std::string, std::string> label_map;

  /// UCI breast-cancer-wisconsin layout: id col 0, class col 10, "?" marker,
  /// 2 -> B, 4 -> M.
  static CsvSchema wbc();
};

struct LoadResult {
  Dataset dataset;
  std::size_t raw_rows = 0;
  std::size_t dropped_rows = 0;
};

/// Parses delimited text. A first row with a non-numeric feature cell is
/// taken as a header. Rows with the missing marker in any feature cell are
/// dropped and counted. Point ids are 0-based data-row ordinals.
LoadResult load_csv(std::istream& source, const CsvSchema& schema);
LoadResult load_csv_file(const std::string& path, const CsvSchema& schema);

/// k disjoint, ascending id lists. Ids are sorted, each class is shuffled
/// with mt19937_64(seed) via Fisher-Yates and dealt round-robin across folds,
/// continuing the deal from one class to the next.
std::vector<std::vector<PointId>> stratified_folds(const Dataset& d,
                                                   std::size_t k,
                                                   std::uint64_t seed);

/// Per-class split into (first, second) with round(fraction * class_size)
/// points of each class in `first`, using the same shuffle as the folds.
std::pair<std::vector<PointId>, std::vector<PointId>> stratified_split(
    const Dataset& d, double first_fraction, std::uint64_t seed);

}  // namespace hyperblocks
