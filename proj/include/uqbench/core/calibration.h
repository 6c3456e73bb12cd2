#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uqbench/core/types.h"

namespace uqbench {

struct CalibrationEntry {
  Kind kind = Kind::kBlur;
  double strength = 0.0;
  std::string decided_by;
  std::string decided_at;  // ISO 8601, UTC

  bool operator==(const CalibrationEntry&) const = default;
};

// {"revision": n, "entries": [{kind, strength, decided_by, decided_at}]}
struct CalibrationDocument {
  long revision = 0;
  std::vector<CalibrationEntry> entries;

  // Strength per kind; later entries for the same kind win.
  std::map<Kind, double> strengths() const;
  bool operator==(const CalibrationDocument&) const = default;
};

void to_json(Json& j, const CalibrationEntry& e);
// Throws ParameterError for an unknown kind or out-of-range strength.
void from_json(const Json& j, CalibrationEntry& e);
void to_json(Json& j, const CalibrationDocument& d);
void from_json(const Json& j, CalibrationDocument& d);

CalibrationDocument load_calibration(const std::filesystem::path& path);

std::string utc_timestamp();

// File-backed document with serialized writes. Each save bumps the
// revision and replaces the file atomically.
class CalibrationStore {
 public:
  explicit CalibrationStore(std::filesystem::path path);

  CalibrationDocument get() const;
  // Entries are validated first; blank decided_at is stamped with the
  // current time. Returns the stored document.
  CalibrationDocument save(std::vector<CalibrationEntry> entries);

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  CalibrationDocument doc_;
};

}  // namespace uqbench
