#include "uqbench/core/calibration.h"

#include <chrono>
#include <ctime>

#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"

namespace uqbench {

std::map<Kind, double> CalibrationDocument::strengths() const {
  std::map<Kind, double> out;
  for (const auto& e : entries) out[e.kind] = e.strength;
  return out;
}

void to_json(Json& j, const CalibrationEntry& e) {
  j = Json{{"kind", kind_name(e.kind)},
           {"strength", e.strength},
           {"decided_by", e.decided_by},
           {"decided_at", e.decided_at}};
}

void from_json(const Json& j, CalibrationEntry& e) {
  if (!j.is_object()) throw ParameterError("calibration entry is not an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ParameterError("calibration entry without kind");
  }
  e.kind = parse_kind_or_throw(j.at("kind").get<std::string>());
  if (!j.contains("strength") || !j.at("strength").is_number()) {
    throw ParameterError("calibration entry for " + std::string(kind_name(e.kind)) +
                         " without numeric strength");
  }
  e.strength = j.at("strength").get<double>();
  validate_strength(e.kind, e.strength);
  e.decided_by = j.value("decided_by", std::string());
  e.decided_at = j.value("decided_at", std::string());
}

void to_json(Json& j, const CalibrationDocument& d) {
  j = Json{{"revision", d.revision}, {"entries", d.entries}};
}

void from_json(const Json& j, CalibrationDocument& d) {
  d.revision = j.value("revision", 0L);
  d.entries = j.at("entries").get<std::vector<CalibrationEntry>>();
}

CalibrationDocument load_calibration(const std::filesystem::path& path) {
  try {
    return Json::parse(read_file(path)).get<CalibrationDocument>();
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CalibrationStore::CalibrationStore(std::filesystem::path path)
    : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) doc_ = load_calibration(path_);
}

CalibrationDocument CalibrationStore::get() const {
  std::lock_guard lock(mu_);
  return doc_;
}

CalibrationDocument CalibrationStore::save(std::vector<CalibrationEntry> entries) {
  for (auto& e : entries) {
    validate_strength(e.kind, e.strength);
    if (e.decided_at.empty()) e.decided_at = utc_timestamp();
  }
  std::lock_guard lock(mu_);
  CalibrationDocument next{doc_.revision + 1, std::move(entries)};
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  write_file_atomic(path_, Json(next).dump(2) + "\n");
  doc_ = std::move(next);
  return doc_;
}

}  // namespace uqbench
