#include "httplib.h"

#include "hyperblocks/error.hpp"
#include "hyperblocks/service.hpp"

namespace hyperblocks {

void serve_http(Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    Query query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const Response r = service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string pattern = R"(/api/v1/.*)";
  server.Get(pattern, dispatch);
  server.Post(pattern, dispatch);
  server.Delete(pattern, dispatch);
  if (!server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
  server.listen_after_bind();
}

}  // namespace hyperblocks
