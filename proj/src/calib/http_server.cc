#include <httplib.h>

#include "uqbench/calib/service.h"

namespace uqbench::calib {

namespace {

void reply(httplib::Response& res, const ApiResult& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

Json parse_body(const httplib::Request& req, httplib::Response& res, bool& ok) {
  try {
    ok = true;
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    ok = false;
    reply(res, {400, {{"error", std::string("invalid JSON: ") + e.what()}}});
    return nullptr;
  }
}

}  // namespace

void mount(httplib::Server& server, CalibService& service) {
  server.Get("/api/datasets", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, service.datasets());
  });
  server.Get("/api/samples", [&service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.samples(req.get_param_value("dataset"),
                               req.has_param("n") ? req.get_param_value("n") : "150",
                               req.get_param_value("seed")));
  });
  server.Post("/api/preview", [&service](const httplib::Request& req, httplib::Response& res) {
    bool ok = false;
    const auto body = parse_body(req, res, ok);
    if (ok) reply(res, service.preview(body));
  });
  server.Get("/api/calibration", [&service](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_calibration());
  });
  server.Put("/api/calibration", [&service](const httplib::Request& req, httplib::Response& res) {
    bool ok = false;
    const auto body = parse_body(req, res, ok);
    if (ok) reply(res, service.put_calibration(body));
  });
  if (service.options().static_dir) {
    server.set_mount_point("/", service.options().static_dir->string());
  }
}

}  // namespace uqbench::calib
