#include "uqbench/runner/config.h"

#include <algorithm>
#include <set>

#include "uqbench/core/calibration.h"
#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"

namespace uqbench::runner {

ExperimentConfig ExperimentConfig::from_json(const Json& j,
                                             std::filesystem::path base_dir) {
  static const std::set<std::string> kKeys = {
      "dataset",   "image_root", "output_dir",  "seed",          "perturbations",
      "calibration", "backend",  "rewrite_backend", "decoding",  "estimators",
      "similarity", "mask_provider", "mask_sigma", "label_mode", "workers",
      "max_in_flight"};
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ParameterError("unknown config key: " + k);
  }
  ExperimentConfig c;
  c.base_dir = std::move(base_dir);
  try {
    if (!j.contains("dataset")) throw ParameterError("config needs a dataset");
    c.dataset = j.at("dataset").get<std::string>();
    if (j.contains("image_root")) c.image_root = j.at("image_root").get<std::string>();
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", std::uint64_t{0});
    std::set<Kind> seen;
    for (const auto& p : j.value("perturbations", Json::array())) {
      PerturbationEntry e;
      e.kind = parse_kind_or_throw(p.at("kind").get<std::string>());
      if (!seen.insert(e.kind).second) {
        throw ParameterError("perturbation kind listed twice: " +
                             std::string(kind_name(e.kind)));
      }
      if (p.contains("strength") && !p.at("strength").is_null()) {
        e.strength = p.at("strength").get<double>();
        validate_strength(e.kind, *e.strength);
      }
      c.perturbations.push_back(e);
    }
    if (j.contains("calibration")) c.calibration = j.at("calibration").get<std::string>();
    if (j.contains("backend")) c.backend = j.at("backend");
    if (j.contains("rewrite_backend")) c.rewrite_backend = j.at("rewrite_backend");
    if (j.contains("decoding")) {
      const auto& d = j.at("decoding");
      if (d.contains("greedy")) c.greedy = d.at("greedy").get<backend::DecodingConfig>();
      if (d.contains("sample")) c.sample = d.at("sample").get<backend::DecodingConfig>();
    }
    c.greedy.validate();
    c.sample.validate();
    if (c.greedy.mode != DecodingMode::kGreedy || c.sample.mode != DecodingMode::kSample) {
      throw ParameterError("decoding.greedy / decoding.sample have the wrong mode");
    }
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& name : j.at("estimators")) {
        const auto e = parse_estimator(name.get<std::string>());
        if (!e) throw ParameterError("unknown estimator: " + name.get<std::string>());
        if (std::find(c.estimators.begin(), c.estimators.end(), *e) == c.estimators.end()) {
          c.estimators.push_back(*e);
        }
      }
    }
    if (j.contains("similarity")) c.similarity = j.at("similarity");
    if (j.contains("mask_provider")) c.mask_provider = j.at("mask_provider");
    c.mask_sigma = j.value("mask_sigma", c.mask_sigma);
    const std::string mode = j.value("label_mode", std::string("flip"));
    if (mode == "flip") {
      c.label_mode = metrics::LabelMode::kFlip;
    } else if (mode == "incorrect") {
      c.label_mode = metrics::LabelMode::kIncorrect;
    } else {
      throw ParameterError("label_mode must be flip or incorrect");
    }
    c.workers = j.value("workers", c.workers);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  } catch (const Json::exception& e) {
    throw ParameterError(std::string("bad config: ") + e.what());
  }
  if (c.workers < 1 || c.max_in_flight < 1) {
    throw ParameterError("workers and max_in_flight must be >= 1");
  }
  if (!(c.mask_sigma >= 0.0)) throw ParameterError("mask_sigma must be >= 0");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  return from_json(j, dir);
}

Json ExperimentConfig::to_json() const {
  Json perts = Json::array();
  for (const auto& p : perturbations) {
    Json e{{"kind", kind_name(p.kind)}};
    if (p.strength) e["strength"] = *p.strength;
    perts.push_back(e);
  }
  Json names = Json::array();
  for (auto e : estimators) names.push_back(estimator_name(e));
  Json j{{"dataset", dataset},
         {"output_dir", output_dir},
         {"seed", seed},
         {"perturbations", perts},
         {"backend", backend},
         {"decoding", {{"greedy", greedy}, {"sample", sample}}},
         {"estimators", names},
         {"similarity", similarity},
         {"mask_provider", mask_provider},
         {"mask_sigma", mask_sigma},
         {"label_mode", label_mode == metrics::LabelMode::kFlip ? "flip" : "incorrect"},
         {"workers", workers},
         {"max_in_flight", max_in_flight}};
  if (image_root) j["image_root"] = *image_root;
  if (calibration) j["calibration"] = *calibration;
  if (rewrite_backend) j["rewrite_backend"] = *rewrite_backend;
  return j;
}

std::filesystem::path ExperimentConfig::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path ExperimentConfig::image_dir() const {
  if (image_root) return resolve(*image_root);
  return resolve(dataset).parent_path();
}

std::vector<std::pair<Kind, double>> ExperimentConfig::resolved_perturbations() const {
  std::map<Kind, double> calibrated;
  if (calibration) calibrated = load_calibration(resolve(*calibration)).strengths();
  std::vector<std::pair<Kind, double>> out;
  for (const auto& p : perturbations) {
    const auto& info = kind_info(p.kind);
    double s = info.default_strength;
    if (info.discrete) {
      s = 0.0;
    } else if (p.strength) {
      s = *p.strength;
    } else if (auto it = calibrated.find(p.kind); it != calibrated.end()) {
      s = it->second;
    }
    out.emplace_back(p.kind, s);
  }
  return out;
}

bool ExperimentConfig::wants(Estimator e) const {
  return std::find(estimators.begin(), estimators.end(), e) != estimators.end();
}

}  // namespace uqbench::runner
