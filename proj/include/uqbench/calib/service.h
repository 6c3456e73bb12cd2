#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uqbench/core/calibration.h"
#include "uqbench/core/types.h"

namespace httplib {
class Server;
}

namespace uqbench::calib {

struct ApiResult {
  int status = 200;
  Json body;
};

inline constexpr int kThumbnailSide = 128;

struct ServiceOptions {
  // name -> JSONL file of instances; image refs resolve against the file's
  // directory unless image_roots has an entry for the name.
  std::map<std::string, std::filesystem::path> datasets;
  std::map<std::string, std::filesystem::path> image_roots;
  std::filesystem::path calibration = "calibration.json";
  std::optional<std::filesystem::path> static_dir;
  double mask_sigma = 2.0;
};

class CalibService {
 public:
  explicit CalibService(ServiceOptions options);

  ApiResult datasets() const;
  ApiResult samples(const std::string& dataset, const std::string& n,
                    const std::string& seed) const;
  ApiResult preview(const Json& request);
  ApiResult get_calibration() const;
  ApiResult put_calibration(const Json& request);

  const ServiceOptions& options() const { return options_; }

 private:
  struct Dataset {
    std::vector<VqaInstance> instances;
    std::map<std::string, std::size_t> index;
    std::filesystem::path image_dir;
  };

  const Dataset* find(const std::string& name) const;

  ServiceOptions options_;
  std::map<std::string, Dataset> datasets_;
  CalibrationStore store_;
  mutable std::mutex cache_mu_;
  std::map<std::string, Json> cache_;
};

// Deterministic sample of min(n, size) distinct indices.
std::vector<std::size_t> sample_indices(std::size_t size, std::size_t n,
                                        std::uint64_t seed);

// Registers the REST routes (and static files, if configured) on `server`.
void mount(httplib::Server& server, CalibService& service);

}  // namespace uqbench::calib
