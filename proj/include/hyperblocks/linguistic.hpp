#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hyperblocks/dataset.hpp"
#include "hyperblocks/hyperblock.hpp"

namespace hyperblocks {

enum class Third { kLower, kMiddle, kUpper, kSpread };

std::string_view to_string(Third t);

struct CoordinateConcentration {
  std::size_t coordinate = 0;
  std::string name;
  Third third = Third::kSpread;
  /// Largest of the three fractions.
  double concentration = 0.0;
  /// Shares of values in [0,1/3), [1/3,2/3), [2/3,1].
  std::array<double, 3> fractions{};
};

struct ThirdGroup {
  Third third = Third::kLower;
  std::vector<std::size_t> coordinates;
};

struct LinguisticDescription {
  std::string subject;
  std::vector<CoordinateConcentration> coordinates;
  std::vector<ThirdGroup> groups;  // lower, middle, upper; empty groups omitted
  std::vector<std::string> sentences;
};

/// Describes where normalized points concentrate, coordinate by coordinate.
/// `points` is row-major with `coordinate_names.size()` values per point.
LinguisticDescription describe(const std::vector<std::vector<double>>& points,
                               const std::vector<std::string>& coordinate_names,
                               double threshold = 0.75, std::string subject = "dataset");

LinguisticDescription describe_dataset(const Dataset& normalized, double threshold = 0.75);
LinguisticDescription describe_class(const Dataset& normalized, const std::string& label,
                                     double threshold = 0.75);
LinguisticDescription describe_block(const HyperBlock& hb, const Dataset& normalized,
                                     double threshold = 0.75);

}  // namespace hyperblocks
