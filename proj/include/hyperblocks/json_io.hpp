#pragma once

#include <string>

#include "json.hpp"

#include "hyperblocks/analytics.hpp"
#include "hyperblocks/classifier.hpp"
#include "hyperblocks/dataset.hpp"
#include "hyperblocks/dtree.hpp"
#include "hyperblocks/error.hpp"
#include "hyperblocks/hyperblock.hpp"
#include "hyperblocks/linguistic.hpp"
#include "hyperblocks/mhyper.hpp"

namespace hyperblocks {

using Json = nlohmann::json;

Json to_json(const HyperBlock& hb);
/// Parses {"bounds", "members", "classCounts", "dominant", "kind"}; checks
/// lo <= hi and that class counts add up to the member count.
HyperBlock block_from_json(const Json& j);

Json to_json(const MHyperConfig& cfg);
MHyperConfig mhyper_config_from_json(const Json& j);

Json to_json(const HBModel& m);
HBModel hb_model_from_json(const Json& j);

Json to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

Json to_json(const std::vector<CoordinateRange>& ranges);
std::vector<CoordinateRange> ranges_from_json(const Json& j);

/// Self-contained model: blocks, k, variant, priority, ranges and the
/// normalized training points.
Json to_json(const HyperModel& m);
HyperModel hyper_model_from_json(const Json& j);

Json to_json(const Classification& c);
Json to_json(const DecisionTree& tree);
Json to_json(const Branch& b);
Json to_json(const FlaggedBox& box);
Json to_json(const ComplexityReport& r);
Json to_json(const ConfusionMatrix& cm);
Json to_json(const EvaluationReport& r);
Json to_json(const ThresholdRule& r);
Json to_json(const RuleEvaluation& r);
Json to_json(const HeatmapReport& r, const std::vector<std::string>& coordinate_names);
Json to_json(const PairSearchResult& r);
Json to_json(const QuantileHistogram& h);
Json to_json(const LinguisticDescription& d);
Json to_json(const HyperCube& hc);

/// {code, message, detail}
Json error_json(const Error& e);

/// Reads a whole JSON document; parse failures become kParse.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace hyperblocks
