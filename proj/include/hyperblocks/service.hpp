#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hyperblocks/dataset.hpp"
#include "hyperblocks/json_io.hpp"
#include "hyperblocks/mhyper.hpp"

namespace hyperblocks {

struct SeedRecord {
  PointId point_id = 0;
  double distance = 0.0;
  std::size_t block_index = 0;
};

struct ViewSettings {
  bool frequency_widths = false;
  std::size_t quantile_q = 4;
  std::vector<std::size_t> side_by_side;
};

/// One analyst's working state. Mutations hold `mutex` exclusively, reads
/// take it shared, so every response sees a consistent snapshot.
struct Session {
  std::string id;
  std::vector<bool> active_coordinates;
  HBModel working;
  std::vector<SeedRecord> seeds;
  ViewSettings view;
  mutable std::shared_mutex mutex;
};

struct Response {
  int status = 200;
  Json body;
};

using Query = std::map<std::string, std::string>;

/// Transport-independent /api/v1 router over one loaded dataset.
class Service {
 public:
  Service(Dataset raw, std::string dataset_name, std::size_t raw_rows = 0,
          std::size_t dropped_rows = 0);

  Response handle(std::string_view method, std::string_view path, const Query& query,
                  const std::string& body);

  const NormalizedDataset& data() const noexcept { return data_; }
  std::size_t session_count() const;

 private:
  std::shared_ptr<Session> find_session(const std::string& id) const;

  Response get_dataset() const;
  Response create_session();
  Response delete_session(const std::string& id);
  Response seed(Session& s, const Json& body);
  Response discover(Session& s, const Json& body);
  Response merge(Session& s, const Json& body);
  Response set_coordinates(Session& s, const Json& body);
  Response blocks(const Session& s) const;
  Response heatmap(const Session& s) const;
  Response linguistic(const Session& s, const Query& q) const;
  Response quantiles(const Session& s, const Query& q) const;
  Response frequencies(const Session& s, const Query& q) const;
  Response export_session(const Session& s) const;
  Response classify(const Json& body) const;

  Dataset raw_;
  NormalizedDataset data_;
  std::string name_;
  std::size_t raw_rows_ = 0;
  std::size_t dropped_rows_ = 0;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// HYPERBLOCKS_PORT wins over `flag_port` when set to a valid port.
int resolve_port(int flag_port);

/// Blocks serving HTTP until the process is stopped. Throws on bind failure.
void serve_http(Service& service, const std::string& host, int port);

}  // namespace hyperblocks
