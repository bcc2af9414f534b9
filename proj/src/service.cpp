#include "hyperblocks/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include "hyperblocks/analytics.hpp"
#include "hyperblocks/classifier.hpp"
#include "hyperblocks/error.hpp"
#include "hyperblocks/linguistic.hpp"

namespace hyperblocks {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kEmptyBlock:
    case ErrorCode::kValidation: return 422;
  }
  return 500;
}

Response error_response(int status, std::string code, std::string message) {
  return {status, {{"code", std::move(code)}, {"message", std::move(message)}, {"detail", ""}}};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t query_index(const Query& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) throw Error(ErrorCode::kInvalidArgument, "missing query parameter '" + key + "'");
  std::size_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument, "query parameter '" + key + "' must be a non-negative integer");
  }
  return v;
}

double query_double(const Query& q, const std::string& key, double fallback) {
  auto it = q.find(key);
  if (it == q.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "query parameter '" + key + "' must be a number");
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = parse_json(body);
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "request body must be a JSON object");
  return j;
}

std::vector<std::size_t> active_indices(const Session& s) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < s.active_coordinates.size(); ++c) {
    if (s.active_coordinates[c]) out.push_back(c);
  }
  return out;
}

const HyperBlock& block_at(const Session& s, std::size_t i) {
  if (i >= s.working.blocks.size()) {
    throw Error(ErrorCode::kNotFound, "no block " + std::to_string(i));
  }
  return s.working.blocks[i];
}

Json block_entry(const HyperBlock& hb, std::size_t id) {
  Json j = to_json(hb);
  j["id"] = id;
  j["size"] = hb.size();
  j["impurity"] = hb.members.empty() ? Json(nullptr) : Json(impurity(hb));
  return j;
}

}  // namespace

Service::Service(Dataset raw, std::string dataset_name, std::size_t raw_rows,
                 std::size_t dropped_rows)
    : raw_(std::move(raw)),
      data_(normalize(raw_)),
      name_(std::move(dataset_name)),
      raw_rows_(raw_rows ? raw_rows : raw_.size()),
      dropped_rows_(dropped_rows) {}

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

std::shared_ptr<Session> Service::find_session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'");
  return it->second;
}

Response Service::handle(std::string_view method, std::string_view path, const Query& query,
                         const std::string& body) {
  try {
    const auto seg = split_path(path);
    if (seg.size() < 3 || seg[0] != "api" || seg[1] != "v1") {
      return error_response(404, "not_found", "no route for " + std::string(path));
    }
    auto method_is = [&](std::string_view m) { return method == m; };
    auto wrong_method = [&] {
      return error_response(405, "method_not_allowed",
                            std::string(method) + " not allowed on " + std::string(path));
    };

    if (seg.size() == 3 && seg[2] == "dataset") return method_is("GET") ? get_dataset() : wrong_method();
    if (seg.size() == 3 && seg[2] == "classify") {
      return method_is("POST") ? classify(parse_body(body)) : wrong_method();
    }
    if (seg.size() == 3 && seg[2] == "session") {
      return method_is("POST") ? create_session() : wrong_method();
    }
    if (seg[2] != "session" || seg.size() > 5) {
      return error_response(404, "not_found", "no route for " + std::string(path));
    }
    if (seg.size() == 4) {
      if (method_is("DELETE")) return delete_session(seg[3]);
      if (method_is("GET")) return export_session(*find_session(seg[3]));
      return wrong_method();
    }

    const auto session = find_session(seg[3]);
    const std::string& action = seg[4];
    static const std::set<std::string> posts = {"seed", "discover", "merge", "coordinates"};
    static const std::set<std::string> gets = {"blocks", "heatmap", "linguistic",
                                               "quantiles", "frequencies", "export"};
    if (posts.count(action)) {
      if (!method_is("POST")) return wrong_method();
      const Json j = parse_body(body);
      std::unique_lock lock(session->mutex);
      if (action == "seed") return seed(*session, j);
      if (action == "discover") return discover(*session, j);
      if (action == "merge") return merge(*session, j);
      return set_coordinates(*session, j);
    }
    if (gets.count(action)) {
      if (!method_is("GET")) return wrong_method();
      std::shared_lock lock(session->mutex);
      if (action == "blocks") return blocks(*session);
      if (action == "heatmap") return heatmap(*session);
      if (action == "linguistic") return linguistic(*session, query);
      if (action == "quantiles") return quantiles(*session, query);
      if (action == "frequencies") return frequencies(*session, query);
      return export_session(*session);
    }
    return error_response(404, "not_found", "no route for " + std::string(path));
  } catch (const Error& e) {
    return {status_for(e.code()), error_json(e)};
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

Response Service::get_dataset() const {
  Json j = to_json(data_.data);
  j["name"] = name_;
  j["ranges"] = to_json(data_.ranges);
  j["rawRows"] = raw_rows_;
  j["droppedRows"] = dropped_rows_;
  j["normalized"] = true;
  return {200, std::move(j)};
}

Response Service::create_session() {
  auto s = std::make_shared<Session>();
  s->active_coordinates.assign(data_.data.dimension(), true);
  s->working.fingerprint = data_.data.fingerprint();
  {
    std::unique_lock lock(sessions_mutex_);
    s->id = "s" + std::to_string(next_session_++);
    sessions_[s->id] = s;
  }
  return {201, {{"sessionId", s->id}, {"datasetFingerprint", s->working.fingerprint}}};
}

Response Service::delete_session(const std::string& id) {
  std::unique_lock lock(sessions_mutex_);
  if (sessions_.erase(id) == 0) throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'");
  return {200, {{"deleted", id}}};
}

Response Service::seed(Session& s, const Json& body) {
  if (!body.contains("pointId") || !body.at("pointId").is_number_integer()) {
    throw Error(ErrorCode::kValidation, "seed needs an integer pointId");
  }
  const PointId id = body.at("pointId").get<PointId>();
  const double distance = body.value("distance", 0.2);
  if (!(distance >= 0.0) || !std::isfinite(distance)) {
    throw Error(ErrorCode::kValidation, "distance must be a non-negative number");
  }
  const std::size_t row = data_.data.row_of(id);
  HyperCube cube = hypercube_from_seed(data_.data.values(row), side_from_center_distance(distance),
                                       data_.data);
  s.working.blocks.push_back(cube.block);
  const std::size_t block_id = s.working.blocks.size() - 1;
  s.seeds.push_back({id, distance, block_id});
  Json j = to_json(cube);
  j["blockId"] = block_id;
  j["pointId"] = id;
  j["distance"] = distance;
  return {201, std::move(j)};
}

Response Service::discover(Session& s, const Json& body) {
  MHyperConfig cfg;
  cfg.impurity_threshold = body.value("threshold", cfg.impurity_threshold);
  cfg.combine_mode = combine_mode_from_string(body.value("mode", std::string("envelope")));
  cfg.validate();
  s.working = hyperblocks::discover(data_, cfg);
  s.seeds.clear();
  s.view.side_by_side.clear();
  return blocks(s);
}

Response Service::merge(Session& s, const Json& body) {
  if (!body.contains("blockIds") || !body.at("blockIds").is_array()) {
    throw Error(ErrorCode::kValidation, "merge needs a blockIds array");
  }
  std::set<std::size_t> ids;
  for (const auto& v : body.at("blockIds")) {
    if (!v.is_number_unsigned()) throw Error(ErrorCode::kValidation, "block ids must be non-negative integers");
    ids.insert(v.get<std::size_t>());
  }
  if (ids.size() < 2) throw Error(ErrorCode::kValidation, "merge needs at least two distinct blocks");
  Bounds bounds = block_at(s, *ids.begin()).bounds;
  for (std::size_t i : ids) bounds = envelope(bounds, block_at(s, i).bounds);
  HyperBlock merged = make_block(std::move(bounds), data_.data);

  std::vector<HyperBlock> kept;
  for (std::size_t i = 0; i < s.working.blocks.size(); ++i) {
    if (!ids.count(i)) kept.push_back(std::move(s.working.blocks[i]));
  }
  kept.push_back(merged);
  s.working.blocks = std::move(kept);
  s.seeds.clear();
  s.view.side_by_side.clear();
  const std::size_t id = s.working.blocks.size() - 1;
  return {200, {{"blockId", id}, {"block", block_entry(merged, id)}}};
}

Response Service::set_coordinates(Session& s, const Json& body) {
  if (!body.contains("mask") || !body.at("mask").is_array()) {
    throw Error(ErrorCode::kValidation, "coordinates needs a boolean mask array");
  }
  const auto& mask = body.at("mask");
  if (mask.size() != data_.data.dimension()) {
    throw Error(ErrorCode::kValidation, "mask length must equal the dataset dimension");
  }
  std::vector<bool> next;
  for (const auto& v : mask) {
    if (!v.is_boolean()) throw Error(ErrorCode::kValidation, "mask entries must be booleans");
    next.push_back(v.get<bool>());
  }
  if (std::none_of(next.begin(), next.end(), [](bool b) { return b; })) {
    throw Error(ErrorCode::kValidation, "at least one coordinate must stay active");
  }
  s.active_coordinates = std::move(next);
  std::vector<std::string> names;
  for (std::size_t c : active_indices(s)) names.push_back(data_.data.coordinate_names()[c]);
  return {200, {{"activeCoordinates", s.active_coordinates}, {"activeNames", names}}};
}

Response Service::blocks(const Session& s) const {
  Json list = Json::array(), refused = Json::array();
  for (std::size_t i = 0; i < s.working.blocks.size(); ++i) list.push_back(block_entry(s.working.blocks[i], i));
  for (std::size_t i = 0; i < s.working.refused.size(); ++i) refused.push_back(block_entry(s.working.refused[i], i));
  return {200,
          {{"blocks", list},
           {"refused", refused},
           {"config", to_json(s.working.config)},
           {"fingerprint", s.working.fingerprint},
           {"activeCoordinates", s.active_coordinates}}};
}

Response Service::heatmap(const Session& s) const {
  const HeatmapReport r = nonoverlap_heatmap(s.working.blocks);
  Json counts = Json::array();
  std::vector<std::string> names;
  std::size_t best = 0;
  std::optional<std::size_t> best_c;
  for (std::size_t c : active_indices(s)) {
    names.push_back(data_.data.coordinate_names()[c]);
    counts.push_back(r.disjoint_counts[c]);
    if (!best_c || r.disjoint_counts[c] > best) {
      best = r.disjoint_counts[c];
      best_c = c;
    }
  }
  return {200,
          {{"coordinates", names},
           {"disjointCounts", counts},
           {"totalPairs", r.total_pairs},
           {"argmax", data_.data.coordinate_names()[*best_c]}}};
}

Response Service::linguistic(const Session& s, const Query& q) const {
  const auto active = active_indices(s);
  std::vector<std::string> names;
  for (std::size_t c : active) names.push_back(data_.data.coordinate_names()[c]);
  const double threshold = query_double(q, "threshold", 0.75);
  const auto& d = data_.data;

  auto describe_rows = [&](const std::vector<std::size_t>& rows, const std::string& subject) {
    std::vector<std::vector<double>> pts;
    for (std::size_t r : rows) {
      std::vector<double> p;
      for (std::size_t c : active) p.push_back(d.values(r)[c]);
      pts.push_back(std::move(p));
    }
    return to_json(describe(pts, names, threshold, subject));
  };

  const std::string target = q.count("target") ? q.at("target") : "all";
  if (target == "all") {
    std::vector<std::size_t> rows(d.size());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    return {200, describe_rows(rows, "dataset")};
  }
  if (target == "block") {
    const auto& hb = block_at(s, query_index(q, "block"));
    std::vector<std::size_t> rows;
    for (PointId id : hb.members) rows.push_back(d.row_of(id));
    if (rows.empty()) throw Error(ErrorCode::kEmptyBlock, "block has no members");
    return {200, describe_rows(rows, "block " + q.at("block"))};
  }
  if (target == "class") {
    std::vector<std::string> labels = d.class_labels();
    if (q.count("class")) {
      if (!d.class_index(q.at("class"))) throw Error(ErrorCode::kNotFound, "unknown class '" + q.at("class") + "'");
      labels = {q.at("class")};
    }
    Json out = Json::array();
    for (const auto& label : labels) {
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < d.size(); ++r) {
        if (d.label_of(r) == label) rows.push_back(r);
      }
      out.push_back(describe_rows(rows, "class " + label));
    }
    return {200, {{"descriptions", out}}};
  }
  throw Error(ErrorCode::kInvalidArgument, "target must be block, class or all");
}

Response Service::quantiles(const Session& s, const Query& q) const {
  const std::size_t block = query_index(q, "block");
  const std::size_t coord = query_index(q, "coord");
  const std::size_t bins = q.count("q") ? query_index(q, "q") : s.view.quantile_q;
  Json j = to_json(quantile_histogram(block_at(s, block), data_.data, coord, bins));
  j["block"] = block;
  j["coordinate"] = data_.data.coordinate_names().at(coord);
  return {200, std::move(j)};
}

Response Service::frequencies(const Session& s, const Query& q) const {
  const auto& d = data_.data;
  std::vector<std::size_t> rows;
  if (q.count("block")) {
    for (PointId id : block_at(s, query_index(q, "block")).members) rows.push_back(d.row_of(id));
  } else {
    for (std::size_t r = 0; r < d.size(); ++r) rows.push_back(r);
  }
  const auto active = active_indices(s);
  Json pairs = Json::array();
  for (std::size_t k = 0; k + 1 < active.size(); ++k) {
    const std::size_t a = active[k], b = active[k + 1];
    std::map<std::pair<double, double>, std::size_t> counts;
    for (std::size_t r : rows) ++counts[{d.values(r)[a], d.values(r)[b]}];
    Json segs = Json::array();
    for (const auto& [key, n] : counts) segs.push_back({{"from", key.first}, {"to", key.second}, {"count", n}});
    pairs.push_back({{"from", d.coordinate_names()[a]}, {"to", d.coordinate_names()[b]}, {"segments", segs}});
  }
  return {200, {{"pairs", pairs}}};
}

Response Service::export_session(const Session& s) const {
  Json seeds = Json::array();
  for (const auto& sd : s.seeds) {
    seeds.push_back({{"pointId", sd.point_id}, {"distance", sd.distance}, {"blockId", sd.block_index}});
  }
  return {200,
          {{"sessionId", s.id},
           {"datasetFingerprint", data_.data.fingerprint()},
           {"activeCoordinates", s.active_coordinates},
           {"hbModel", to_json(s.working)},
           {"seeds", seeds},
           {"viewSettings",
            {{"frequencyWidths", s.view.frequency_widths},
             {"quantileQ", s.view.quantile_q},
             {"sideBySide", s.view.side_by_side}}}}};
}

Response Service::classify(const Json& body) const {
  if (!body.contains("model") || !body.contains("points")) {
    throw Error(ErrorCode::kValidation, "classify needs model and points");
  }
  const HyperModel model = hyper_model_from_json(body.at("model"));
  const bool normalized = body.value("normalized", false);
  NormalizedDataset scaling{model.points, model.ranges};
  Json out = Json::array();
  for (const auto& p : body.at("points")) {
    if (!p.is_array()) throw Error(ErrorCode::kValidation, "each point must be an array");
    std::vector<double> x;
    for (const auto& v : p) {
      if (!v.is_number()) throw Error(ErrorCode::kValidation, "point values must be numbers");
      x.push_back(v.get<double>());
    }
    if (x.size() != model.points.dimension()) {
      throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from model");
    }
    if (!normalized) x = scaling.normalize_point(x);
    out.push_back(to_json(hyperblocks::classify(x, model)));
  }
  return {200, {{"results", out}}};
}

int resolve_port(int flag_port) {
  if (const char* env = std::getenv("HYPERBLOCKS_PORT")) {
    int port = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec == std::errc() && ptr == s.data() + s.size() && port > 0 && port < 65536) return port;
  }
  return flag_port;
}

}  // namespace hyperblocks
