#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "hyperblocks/dataset.hpp"
#include "hyperblocks/hyperblock.hpp"

namespace testing {

struct Row {
  std::vector<double> values;
  std::string label;
};

inline hyperblocks::Dataset make_dataset(const std::vector<Row>& rows) {
  std::vector<std::string> names;
  const std::size_t n = rows.empty() ? 1 : rows.front().values.size();
  for (std::size_t i = 0; i < n; ++i) names.push_back("X" + std::to_string(i + 1));
  std::vector<hyperblocks::PointId> ids;
  std::vector<double> values;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ids.push_back(static_cast<hyperblocks::PointId>(r));
    values.insert(values.end(), rows[r].values.begin(), rows[r].values.end());
    labels.push_back(rows[r].label);
  }
  return {names, ids, values, labels};
}

inline hyperblocks::Bounds box(std::initializer_list<std::pair<double, double>> ivs) {
  hyperblocks::Bounds b;
  for (const auto& [lo, hi] : ivs) b.push_back({lo, hi});
  return b;
}

inline hyperblocks::HyperBlock bare_block(hyperblocks::Bounds b) {
  hyperblocks::HyperBlock hb;
  hb.bounds = std::move(b);
  return hb;
}

/// Random labelled instance on a coarse grid so that ties and coincident
/// points occur.
inline hyperblocks::Dataset random_dataset(std::mt19937_64& rng, std::size_t max_points = 30,
                                           std::size_t max_dims = 4, std::size_t classes = 2) {
  std::uniform_int_distribution<std::size_t> npts(2, max_points), ndim(1, max_dims);
  std::uniform_int_distribution<int> grid(0, 10), cls(0, static_cast<int>(classes) - 1);
  const std::size_t m = npts(rng), n = ndim(rng);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < m; ++i) {
    Row r;
    for (std::size_t c = 0; c < n; ++c) r.values.push_back(grid(rng) / 10.0);
    r.label = std::string(1, static_cast<char>('A' + cls(rng)));
    rows.push_back(std::move(r));
  }
  return make_dataset(rows);
}

inline std::string wbc_path() {
  if (const char* env = std::getenv("HYPERBLOCKS_WBC")) return env;
  return HB_WBC_PATH;
}

}  // namespace testing
