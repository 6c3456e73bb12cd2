#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uqbench/backend/backend.h"
#include "uqbench/core/types.h"
#include "uqbench/metrics/metrics.h"

namespace uqbench::runner {

struct PerturbationEntry {
  Kind kind = Kind::kBlur;
  // Unset: calibration file, then the operator default.
  std::optional<double> strength;
};

// JSON document; relative paths resolve against the config file's folder.
//   dataset          instances.jsonl (required)
//   image_root       folder image_refs are relative to (default: dataset's)
//   output_dir       default "out"
//   seed             run seed, default 0
//   perturbations    [{"kind": "blur", "strength": 10}, {"kind": "typos"}]
//   calibration      calibration document supplying default strengths
//   backend          see backend::make_backend (default mock)
//   rewrite_backend  LLM for inv/sbj/amb/ive (default: backend)
//   decoding         {"greedy": {...}, "sample": {...}}
//   estimators       registry names (default all nine)
//   similarity       {"kind": "exact" | "rouge_l" | "table" | "http", ...}
//   mask_provider    {"kind": "sidecar", "dir"?} | {"kind": "http", "url"}
//   mask_sigma       relevance smoothing in grid cells, default 2
//   label_mode       "flip" (default) | "incorrect"
//   workers          instance-level parallelism, default 4
//   max_in_flight    concurrent backend requests, default 8
struct ExperimentConfig {
  std::filesystem::path base_dir;

  std::string dataset;
  std::optional<std::string> image_root;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::vector<PerturbationEntry> perturbations;
  std::optional<std::string> calibration;
  Json backend = Json{{"kind", "mock"}};
  std::optional<Json> rewrite_backend;
  backend::DecodingConfig greedy = backend::DecodingConfig::greedy();
  backend::DecodingConfig sample = backend::DecodingConfig::sample();
  std::vector<Estimator> estimators = all_estimators();
  Json similarity = Json{{"kind", "exact"}};
  Json mask_provider = Json{{"kind", "sidecar"}};
  double mask_sigma = 2.0;
  metrics::LabelMode label_mode = metrics::LabelMode::kFlip;
  int workers = 4;
  int max_in_flight = 8;

  // Throws ParameterError on unknown names, out-of-range strengths, or a
  // kind listed twice.
  static ExperimentConfig from_json(const Json& j, std::filesystem::path base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
  Json to_json() const;

  std::filesystem::path resolve(const std::string& relative) const;
  std::filesystem::path out_dir() const { return resolve(output_dir); }
  std::filesystem::path image_dir() const;

  // Kind + final strength for every configured perturbation.
  std::vector<std::pair<Kind, double>> resolved_perturbations() const;
  bool wants(Estimator e) const;
};

}  // namespace uqbench::runner
