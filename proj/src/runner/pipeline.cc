#include "uqbench/runner/pipeline.h"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>

#include "uqbench/backend/client.h"
#include "uqbench/backend/factory.h"
#include "uqbench/core/digest.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/core/normalize.h"
#include "uqbench/cross/rewrite.h"
#include "uqbench/estimators/estimators.h"
#include "uqbench/runner/apply.h"
#include "uqbench/runner/pool.h"
#include "uqbench/runner/report.h"
#include "uqbench/text/rewrite.h"
#include "uqbench/visual/visual.h"

namespace uqbench::runner {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kOutPrefix = "@out/";

std::string failures_file(Stage s) {
  return "failures." + std::string(stage_name(s)) + ".jsonl";
}

std::vector<std::string> stage_outputs(Stage s) {
  switch (s) {
    case Stage::kPerturb:
      return {"variants.jsonl", "skipped.jsonl", failures_file(s)};
    case Stage::kInfer:
      return {"generations.jsonl", "elicitations.jsonl", failures_file(s)};
    case Stage::kScore:
      return {"scores.jsonl", "labels.jsonl", failures_file(s)};
    case Stage::kEvaluate:
      return {"report.json"};
  }
  return {};
}

std::string file_digest(const fs::path& p) {
  return fs::exists(p) ? sha256_hex(read_file(p)) : "absent";
}

// A backend config plus the content of the fixture it names.
Json backend_fingerprint(const ExperimentConfig& cfg, const Json& b) {
  Json fp = b;
  if (b.contains("fixture")) {
    fp["fixture_sha256"] = file_digest(cfg.resolve(b.at("fixture").get<std::string>()));
  }
  return fp;
}

template <typename T>
std::vector<T> read_optional_jsonl(const fs::path& p) {
  return fs::exists(p) ? read_jsonl<T>(p) : std::vector<T>{};
}

}  // namespace

void to_json(Json& j, const FailureRecord& r) {
  j = Json{{"instance_id", r.instance_id}, {"stage", r.stage}, {"kind", r.kind},
           {"error", r.error}};
}
void from_json(const Json& j, FailureRecord& r) {
  r.instance_id = j.at("instance_id").get<std::string>();
  r.stage = j.at("stage").get<std::string>();
  r.kind = j.value("kind", std::string());
  r.error = j.at("error").get<std::string>();
}
void to_json(Json& j, const SkipRecord& r) {
  j = Json{{"instance_id", r.instance_id}, {"kind", r.kind}, {"reason", r.reason}};
}
void from_json(const Json& j, SkipRecord& r) {
  r.instance_id = j.at("instance_id").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  r.reason = j.at("reason").get<std::string>();
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kPerturb: return "perturb";
    case Stage::kInfer: return "infer";
    case Stage::kScore: return "score";
    case Stage::kEvaluate: return "evaluate";
  }
  return "?";
}

bool answer_correct(const std::string& answer,
                    const std::vector<std::string>& references) {
  const auto a = normalize_answer(answer);
  return std::any_of(references.begin(), references.end(),
                     [&](const std::string& r) { return normalize_answer(r) == a; });
}

int exit_code_for(const std::vector<StageOutcome>& outcomes) {
  return !outcomes.empty() && outcomes.back().failed > 0 ? 2 : 0;
}

struct Experiment::State {
  std::mutex mu;
  std::shared_ptr<backend::Backend> answer;
  std::shared_ptr<backend::Backend> rewrite;
  std::shared_ptr<cross::RelevanceMaskProvider> masks;
  std::shared_ptr<estimators::SimilarityProvider> similarity;
};

Experiment::Experiment(ExperimentConfig config, Services services)
    : cfg_(std::move(config)),
      services_(std::move(services)),
      state_(std::make_unique<State>()) {
  state_->answer = services_.answer;
  state_->rewrite = services_.rewrite;
  state_->masks = services_.masks;
  state_->similarity = services_.similarity;
}

Experiment::~Experiment() = default;

std::string Experiment::config_digest() const {
  return sha256_hex(cfg_.to_json().dump());
}

fs::path Experiment::image_path(const std::string& ref) const {
  if (ref.rfind(kOutPrefix, 0) == 0) return out_dir() / ref.substr(kOutPrefix.size());
  return cfg_.image_dir() / ref;
}

std::vector<std::uint8_t> Experiment::load_image(const std::string& ref) const {
  return visual::read_bytes(image_path(ref));
}

std::vector<VqaInstance> Experiment::load_instances() const {
  auto instances = read_jsonl<VqaInstance>(cfg_.resolve(cfg_.dataset));
  std::set<std::string> ids;
  for (const auto& i : instances) {
    if (!ids.insert(i.id).second) throw DataError("duplicate instance id " + i.id);
  }
  return instances;
}

std::set<std::string> Experiment::failed_before(Stage s) const {
  std::set<std::string> failed;
  for (auto prior : {Stage::kPerturb, Stage::kInfer, Stage::kScore}) {
    if (prior >= s) break;
    for (const auto& f : read_optional_jsonl<FailureRecord>(out_dir() / failures_file(prior))) {
      failed.insert(f.instance_id);
    }
  }
  return failed;
}

void Experiment::check_abort(std::size_t instances, std::size_t failed) const {
  if (instances > 0 && 2 * failed > instances) {
    throw AbortError(std::to_string(failed) + " of " + std::to_string(instances) +
                     " instances failed; see " + "failures.*.jsonl");
  }
}

std::string Experiment::stage_digest(Stage s) const {
  const auto out = out_dir();
  Json in{{"stage", stage_name(s)}};
  auto kinds = Json::array();
  for (const auto& [k, v] : cfg_.resolved_perturbations()) {
    kinds.push_back({{"kind", kind_name(k)}, {"strength", v}});
  }
  Json names = Json::array();
  for (auto e : cfg_.estimators) names.push_back(estimator_name(e));
  const auto dataset = file_digest(cfg_.resolve(cfg_.dataset));
  switch (s) {
    case Stage::kPerturb:
      in["dataset"] = dataset;
      in["perturbations"] = kinds;
      in["seed"] = cfg_.seed;
      in["rewrite_backend"] =
          backend_fingerprint(cfg_, cfg_.rewrite_backend.value_or(cfg_.backend));
      in["mask_provider"] = cfg_.mask_provider;
      in["mask_sigma"] = cfg_.mask_sigma;
      break;
    case Stage::kInfer:
      in["variants"] = file_digest(out / "variants.jsonl");
      in["failures"] = file_digest(out / failures_file(Stage::kPerturb));
      in["backend"] = backend_fingerprint(cfg_, cfg_.backend);
      in["decoding"] = {cfg_.greedy, cfg_.sample};
      in["seed"] = cfg_.seed;
      in["estimators"] = names;
      break;
    case Stage::kScore:
      in["dataset"] = dataset;
      in["variants"] = file_digest(out / "variants.jsonl");
      in["generations"] = file_digest(out / "generations.jsonl");
      in["elicitations"] = file_digest(out / "elicitations.jsonl");
      in["failures"] = file_digest(out / failures_file(Stage::kInfer));
      in["estimators"] = names;
      in["similarity"] = cfg_.similarity;
      if (cfg_.similarity.contains("path")) {
        in["similarity_sha256"] =
            file_digest(cfg_.resolve(cfg_.similarity.at("path").get<std::string>()));
      }
      break;
    case Stage::kEvaluate:
      in["config"] = config_digest();
      in["dataset"] = dataset;
      for (const auto* f : {"variants.jsonl", "skipped.jsonl", "scores.jsonl",
                            "labels.jsonl", "failures.perturb.jsonl",
                            "failures.infer.jsonl", "failures.score.jsonl"}) {
        in[f] = file_digest(out / f);
      }
      break;
  }
  return sha256_hex(in.dump());
}

bool Experiment::up_to_date(Stage s, const std::string& digest) const {
  const auto manifest_path = out_dir() / "manifest.json";
  if (!fs::exists(manifest_path)) return false;
  Json manifest;
  try {
    manifest = Json::parse(read_file(manifest_path));
  } catch (const Json::exception&) {
    return false;
  }
  const std::string name(stage_name(s));
  if (!manifest.contains(name) || manifest.at(name).value("inputs", "") != digest) {
    return false;
  }
  for (const auto& [file, sha] : manifest.at(name).at("outputs").items()) {
    if (file_digest(out_dir() / file) != sha.get<std::string>()) return false;
  }
  return true;
}

void Experiment::record_stage(Stage s, const std::string& digest) const {
  std::lock_guard lock(state_->mu);
  const auto manifest_path = out_dir() / "manifest.json";
  Json manifest = Json::object();
  if (fs::exists(manifest_path)) {
    try {
      manifest = Json::parse(read_file(manifest_path));
    } catch (const Json::exception&) {
      manifest = Json::object();
    }
  }
  Json outputs = Json::object();
  for (const auto& f : stage_outputs(s)) outputs[f] = file_digest(out_dir() / f);
  if (s == Stage::kPerturb && fs::exists(out_dir() / "images")) {
    std::vector<std::string> images;
    for (const auto& e : fs::directory_iterator(out_dir() / "images")) {
      images.push_back("images/" + e.path().filename().string());
    }
    std::sort(images.begin(), images.end());
    for (const auto& f : images) outputs[f] = file_digest(out_dir() / f);
  }
  manifest[std::string(stage_name(s))] = Json{{"inputs", digest}, {"outputs", outputs}};
  // Later stages depend on this one; their entries are now stale.
  for (auto later : {Stage::kInfer, Stage::kScore, Stage::kEvaluate}) {
    if (later > s) manifest.erase(std::string(stage_name(later)));
  }
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
}

StageOutcome Experiment::perturb() {
  const auto instances = load_instances();
  const auto digest = stage_digest(Stage::kPerturb);
  if (up_to_date(Stage::kPerturb, digest)) {
    const auto failed = failed_before(Stage::kInfer);
    check_abort(instances.size(), failed.size());
    return {Stage::kPerturb, true, instances.size(), failed.size()};
  }
  fs::create_directories(out_dir() / "images");
  const auto perturbations = cfg_.resolved_perturbations();
  const bool needs_llm = std::any_of(perturbations.begin(), perturbations.end(), [](auto& p) {
    return p.first == Kind::kInv || p.first == Kind::kSbj || p.first == Kind::kAmb ||
           p.first == Kind::kIve;
  });
  const bool needs_masks = std::any_of(perturbations.begin(), perturbations.end(),
                                       [](auto& p) { return p.first == Kind::kAttentionMask; });
  std::shared_ptr<backend::Backend> llm = state_->rewrite;
  if (!llm && needs_llm) {
    llm = backend::make_backend(cfg_.rewrite_backend.value_or(cfg_.backend), cfg_.base_dir);
  }
  std::optional<backend::GuardedBackend> guarded;
  if (llm) guarded.emplace(*llm, backend::RetryPolicy{}, cfg_.max_in_flight);
  std::shared_ptr<cross::RelevanceMaskProvider> masks = state_->masks;
  if (!masks && needs_masks) {
    const auto kind = cfg_.mask_provider.value("kind", std::string("sidecar"));
    if (kind == "sidecar") {
      std::optional<fs::path> dir;
      if (cfg_.mask_provider.contains("dir")) {
        dir = cfg_.resolve(cfg_.mask_provider.at("dir").get<std::string>());
      }
      masks = std::make_shared<cross::SidecarMaskProvider>(dir);
    } else if (kind == "http") {
      masks = std::make_shared<cross::HttpMaskProvider>(
          cfg_.mask_provider.at("url").get<std::string>());
    } else {
      throw ParameterError("unknown mask provider: " + kind);
    }
  }

  struct Result {
    std::vector<VariantRecord> variants;
    std::vector<SkipRecord> skipped;
    std::optional<FailureRecord> failure;
  };
  std::vector<Result> results(instances.size());
  parallel_for(instances.size(), cfg_.workers, [&](std::size_t i) {
    const auto& inst = instances[i];
    Result& r = results[i];
    std::string current;
    try {
      r.variants.push_back(identity_variant(inst));
      std::optional<std::vector<std::uint8_t>> bytes;
      std::optional<visual::RasterImage> image;
      auto need_image = [&]() -> const visual::RasterImage& {
        if (!bytes) bytes = load_image(inst.image_ref);
        if (!image) image = visual::decode_image(*bytes);
        return *image;
      };
      std::optional<cross::CrossRewriteResult> cross_rewrite;
      for (const auto& [kind, strength] : perturbations) {
        current = std::string(kind_name(kind));
        PerturbationSpec spec{kind, strength, derive_seed(cfg_.seed, inst.id, current)};
        VariantRecord v{inst.id, variant_id(inst.id, spec), spec, inst.image_ref,
                        inst.question};
        auto write_image = [&](const visual::RasterImage& img) {
          const std::string rel = "images/" + v.variant_id + ".png";
          const auto png = visual::encode_png(img);
          write_file_atomic(out_dir() / rel, std::string(png.begin(), png.end()));
          v.image_ref = std::string(kOutPrefix) + rel;
        };
        if (is_deterministic(kind)) {
          auto applied = apply_deterministic(
              kind, strength, spec.seed, inst.question, need_image,
              [&] {
                return masks->relevance(inst.id, image_path(inst.image_ref), *bytes,
                                        inst.question);
              },
              cfg_.mask_sigma);
          if (applied.image) write_image(*applied.image);
          if (applied.question) v.question = std::move(*applied.question);
        } else if (auto tk = as_textual(kind)) {
          v.question = text::rewrite_question(inst.question, *tk, *guarded);
        } else {
          if (!cross_rewrite) {
            if (!bytes) bytes = load_image(inst.image_ref);
            cross_rewrite = cross::rewrite_cross(inst.question, *bytes, *guarded);
          }
          if (kind == Kind::kAmb) {
            if (!cross_rewrite->amb) {
              r.skipped.push_back({inst.id, current, "AMB is null"});
              continue;
            }
            v.question = cross_rewrite->amb->variant_question;
          } else {
            if (!cross_rewrite->ive) {
              r.skipped.push_back({inst.id, current, "IVE is null"});
              continue;
            }
            v.question = cross_rewrite->ive->variant_question;
          }
        }
        r.variants.push_back(std::move(v));
      }
    } catch (const std::exception& e) {
      r.variants.clear();
      r.skipped.clear();
      r.failure = FailureRecord{inst.id, "perturb", current, e.what()};
    }
  });

  std::vector<VariantRecord> variants;
  std::vector<SkipRecord> skipped;
  std::vector<FailureRecord> failures;
  for (auto& r : results) {
    for (auto& v : r.variants) variants.push_back(std::move(v));
    for (auto& s : r.skipped) skipped.push_back(std::move(s));
    if (r.failure) failures.push_back(*r.failure);
  }
  write_jsonl(out_dir() / "variants.jsonl", variants);
  write_jsonl(out_dir() / "skipped.jsonl", skipped);
  write_jsonl(out_dir() / failures_file(Stage::kPerturb), failures);
  record_stage(Stage::kPerturb, digest);
  check_abort(instances.size(), failures.size());
  return {Stage::kPerturb, false, instances.size(), failures.size()};
}

StageOutcome Experiment::infer() {
  const auto digest = stage_digest(Stage::kInfer);
  const auto instances = load_instances();
  const auto failed_earlier = failed_before(Stage::kInfer);
  if (up_to_date(Stage::kInfer, digest)) {
    const auto failed = failed_before(Stage::kScore);
    check_abort(instances.size(), failed.size());
    return {Stage::kInfer, true, instances.size(), failed.size()};
  }
  const auto variants = read_jsonl<VariantRecord>(out_dir() / "variants.jsonl");
  std::shared_ptr<backend::Backend> model = state_->answer;
  if (!model) model = backend::make_backend(cfg_.backend, cfg_.base_dir);
  backend::VlmClient client(
      *model, [this](const std::string& ref) { return load_image(ref); },
      backend::RetryPolicy{}, cfg_.max_in_flight);
  const auto& caps = client.capabilities();
  const bool want_samples = std::any_of(cfg_.estimators.begin(), cfg_.estimators.end(),
                                        estimators::is_sample_based);
  const bool want_ptrue = cfg_.wants(Estimator::kPTrue) && caps.chosen_token_logprobs;
  const bool want_pmi = cfg_.wants(Estimator::kPmi) && caps.sequence_scoring &&
                        caps.chosen_token_logprobs;

  std::map<std::string, std::vector<const VariantRecord*>> by_instance;
  for (const auto& v : variants) by_instance[v.instance_id].push_back(&v);
  std::vector<std::string> order;
  for (const auto& inst : instances) {
    if (!failed_earlier.count(inst.id) && by_instance.count(inst.id)) order.push_back(inst.id);
  }

  struct Result {
    std::vector<GenerationRecord> generations;
    std::vector<ElicitationRecord> elicitations;
    std::optional<FailureRecord> failure;
  };
  std::vector<Result> results(order.size());
  parallel_for(order.size(), cfg_.workers, [&](std::size_t i) {
    Result& r = results[i];
    std::string current;
    try {
      for (const auto* v : by_instance.at(order[i])) {
        current = v->spec ? std::string(kind_name(v->spec->kind)) : "";
        auto greedy = client.generate(*v, cfg_.greedy, cfg_.seed).front();
        if (want_pmi && greedy.token_logprobs) {
          greedy.unconditional_logprobs = client.score_unconditional(greedy);
        }
        if (want_ptrue) {
          try {
            r.elicitations.push_back(client.elicit_ptrue(*v, greedy.text));
          } catch (const ElicitationError&) {
            // PTrue is reported unavailable for this variant.
          }
        }
        r.generations.push_back(std::move(greedy));
        if (want_samples) {
          for (auto& g : client.generate(*v, cfg_.sample, cfg_.seed)) {
            r.generations.push_back(std::move(g));
          }
        }
      }
    } catch (const std::exception& e) {
      r.generations.clear();
      r.elicitations.clear();
      r.failure = FailureRecord{order[i], "infer", current, e.what()};
    }
  });

  std::vector<GenerationRecord> generations;
  std::vector<ElicitationRecord> elicitations;
  std::vector<FailureRecord> failures;
  for (auto& r : results) {
    for (auto& g : r.generations) generations.push_back(std::move(g));
    for (auto& e : r.elicitations) elicitations.push_back(std::move(e));
    if (r.failure) failures.push_back(*r.failure);
  }
  write_jsonl(out_dir() / "generations.jsonl", generations);
  write_jsonl(out_dir() / "elicitations.jsonl", elicitations);
  write_jsonl(out_dir() / failures_file(Stage::kInfer), failures);
  record_stage(Stage::kInfer, digest);
  const auto failed = failed_earlier.size() + failures.size();
  check_abort(instances.size(), failed);
  return {Stage::kInfer, false, instances.size(), failed};
}

StageOutcome Experiment::score() {
  const auto digest = stage_digest(Stage::kScore);
  const auto instances = load_instances();
  const auto failed_earlier = failed_before(Stage::kScore);
  if (up_to_date(Stage::kScore, digest)) {
    const auto failed = failed_before(Stage::kEvaluate);
    check_abort(instances.size(), failed.size());
    return {Stage::kScore, true, instances.size(), failed.size()};
  }
  const auto variants = read_jsonl<VariantRecord>(out_dir() / "variants.jsonl");
  const auto generations = read_jsonl<GenerationRecord>(out_dir() / "generations.jsonl");
  const auto elicitations =
      read_optional_jsonl<ElicitationRecord>(out_dir() / "elicitations.jsonl");

  std::shared_ptr<estimators::SimilarityProvider> similarity = state_->similarity;
  if (!similarity) {
    auto cfg = cfg_.similarity;
    if (cfg.contains("path")) {
      cfg["path"] = cfg_.resolve(cfg.at("path").get<std::string>()).string();
    }
    similarity = std::make_shared<estimators::CachingProvider>(
        estimators::make_similarity_provider(cfg));
  }

  std::map<std::string, std::vector<const GenerationRecord*>> gens;
  for (const auto& g : generations) gens[g.variant_id].push_back(&g);
  std::map<std::string, double> p_true;
  for (const auto& e : elicitations) p_true[e.variant_id] = e.p_true;
  std::map<std::string, std::vector<const VariantRecord*>> by_instance;
  for (const auto& v : variants) by_instance[v.instance_id].push_back(&v);

  std::vector<const VqaInstance*> order;
  for (const auto& inst : instances) {
    if (!failed_earlier.count(inst.id) && by_instance.count(inst.id)) order.push_back(&inst);
  }

  struct Result {
    std::vector<ScoreRecord> scores;
    std::vector<LabelRecord> labels;
    std::optional<FailureRecord> failure;
  };
  std::vector<Result> results(order.size());
  parallel_for(order.size(), cfg_.workers, [&](std::size_t i) {
    const auto& inst = *order[i];
    Result& r = results[i];
    std::string current;
    try {
      std::optional<bool> clean_correct;
      for (const auto* v : by_instance.at(inst.id)) {
        current = v->spec ? std::string(kind_name(v->spec->kind)) : "";
        estimators::EstimatorInputs in;
        in.instance_id = inst.id;
        in.variant_id = v->variant_id;
        if (auto it = gens.find(v->variant_id); it != gens.end()) {
          for (const auto* g : it->second) {
            if (g->mode == DecodingMode::kGreedy) {
              in.greedy = *g;
            } else {
              in.samples.push_back(*g);
            }
          }
        }
        std::sort(in.samples.begin(), in.samples.end(),
                  [](const auto& a, const auto& b) { return a.sample_index < b.sample_index; });
        if (auto it = p_true.find(v->variant_id); it != p_true.end()) in.p_true = it->second;
        if (!in.greedy) throw DataError("no greedy generation for " + v->variant_id);
        for (auto e : cfg_.estimators) {
          r.scores.push_back(estimators::estimate(e, in, *similarity));
        }
        if (inst.reference_answers.empty()) continue;
        const bool correct = answer_correct(in.greedy->text, inst.reference_answers);
        if (!v->spec) {
          clean_correct = correct;
        } else if (clean_correct) {
          r.labels.push_back({inst.id, current, *clean_correct, correct});
        }
      }
    } catch (const std::exception& e) {
      r.scores.clear();
      r.labels.clear();
      r.failure = FailureRecord{inst.id, "score", current, e.what()};
    }
  });

  std::vector<ScoreRecord> scores;
  std::vector<LabelRecord> labels;
  std::vector<FailureRecord> failures;
  for (auto& r : results) {
    for (auto& s : r.scores) scores.push_back(std::move(s));
    for (auto& l : r.labels) labels.push_back(std::move(l));
    if (r.failure) failures.push_back(*r.failure);
  }
  write_jsonl(out_dir() / "scores.jsonl", scores);
  write_jsonl(out_dir() / "labels.jsonl", labels);
  write_jsonl(out_dir() / failures_file(Stage::kScore), failures);
  record_stage(Stage::kScore, digest);
  const auto failed = failed_earlier.size() + failures.size();
  check_abort(instances.size(), failed);
  return {Stage::kScore, false, instances.size(), failed};
}

StageOutcome Experiment::evaluate() {
  const auto digest = stage_digest(Stage::kEvaluate);
  const auto instances = load_instances();
  const auto failed = failed_before(Stage::kEvaluate);
  check_abort(instances.size(), failed.size());
  if (up_to_date(Stage::kEvaluate, digest)) {
    return {Stage::kEvaluate, true, instances.size(), failed.size()};
  }
  EvaluationInput in;
  in.instances = instances;
  in.variants = read_jsonl<VariantRecord>(out_dir() / "variants.jsonl");
  in.scores = read_jsonl<ScoreRecord>(out_dir() / "scores.jsonl");
  in.labels = read_jsonl<LabelRecord>(out_dir() / "labels.jsonl");
  in.failed = failed;
  in.estimators = cfg_.estimators;
  in.label_mode = cfg_.label_mode;
  std::shared_ptr<backend::Backend> model = state_->answer;
  if (!model) model = backend::make_backend(cfg_.backend, cfg_.base_dir);
  in.capabilities = model->capabilities();

  const auto skipped = read_optional_jsonl<SkipRecord>(out_dir() / "skipped.jsonl");
  Json kinds = Json::array();
  Json strengths = Json::object();
  for (const auto& [k, s] : cfg_.resolved_perturbations()) {
    in.kinds.push_back(k);
    kinds.push_back(kind_name(k));
    strengths[std::string(kind_name(k))] = s;
  }
  Json names = Json::array();
  for (auto e : cfg_.estimators) names.push_back(estimator_name(e));
  in.meta = Json{{"config_digest", config_digest()},
                 {"seed", cfg_.seed},
                 {"kinds", kinds},
                 {"strengths", strengths},
                 {"estimators", names},
                 {"decoding", {{"greedy", cfg_.greedy}, {"sample", cfg_.sample}}},
                 {"similarity", cfg_.similarity.value("kind", std::string("exact"))},
                 {"label_mode", cfg_.label_mode == metrics::LabelMode::kFlip ? "flip"
                                                                           : "incorrect"},
                 {"skipped_variants", skipped.size()}};
  const Json report = build_report(in);
  write_file_atomic(out_dir() / "report.json", report.dump(2) + "\n");
  record_stage(Stage::kEvaluate, digest);
  return {Stage::kEvaluate, false, instances.size(), failed.size()};
}

std::vector<StageOutcome> Experiment::run() {
  std::vector<StageOutcome> out;
  out.push_back(perturb());
  out.push_back(infer());
  out.push_back(score());
  out.push_back(evaluate());
  return out;
}

}  // namespace uqbench::runner
