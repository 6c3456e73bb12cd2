#include "uqbench/core/types.h"

#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"

namespace uqbench {
namespace {

const std::array<std::string_view, kNumEstimators> kEstimatorNames = {
    "MSP",    "Perplexity",      "MeanTokenEntropy", "PMI", "PTrue",
    "SemanticEntropy", "LexSim", "DegMat",           "LUQ"};

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string_view subset_tag_name(SubsetTag tag) {
  switch (tag) {
    case SubsetTag::kClean:
      return "clean";
    case SubsetTag::kImage:
      return "image";
    case SubsetTag::kText:
      return "text";
    case SubsetTag::kCross:
      return "cross";
  }
  return "";
}

std::optional<SubsetTag> parse_subset_tag(std::string_view name) {
  if (name == "clean") return SubsetTag::kClean;
  if (name == "image") return SubsetTag::kImage;
  if (name == "text") return SubsetTag::kText;
  if (name == "cross") return SubsetTag::kCross;
  return std::nullopt;
}

void PerturbationSpec::validate() const { validate_strength(kind, strength); }

std::string variant_id(std::string_view instance_id,
                       const std::optional<PerturbationSpec>& spec) {
  if (!spec) return std::string(instance_id) + "__clean";
  std::string material(instance_id);
  material.push_back('\0');
  material.append(family_name(spec->family()));
  material.push_back('\0');
  material.append(kind_name(spec->kind));
  material.push_back('\0');
  // Shortest round-trip decimal, so 0.1 and 0.10000000000000002 differ.
  material.append(Json(spec->strength).dump());
  material.push_back('\0');
  material.append(std::to_string(spec->seed));
  return std::string(instance_id) + "__" + std::string(kind_name(spec->kind)) +
         "-" + sha256_hex(material).substr(0, 16);
}

VariantRecord identity_variant(const VqaInstance& instance) {
  return VariantRecord{instance.id, variant_id(instance.id, std::nullopt),
                       std::nullopt, instance.image_ref, instance.question};
}

std::string_view decoding_mode_name(DecodingMode mode) {
  return mode == DecodingMode::kGreedy ? "greedy" : "sample";
}

const std::vector<Estimator>& all_estimators() {
  static const std::vector<Estimator> kAll = {
      Estimator::kMsp,     Estimator::kPerplexity,      Estimator::kMeanTokenEntropy,
      Estimator::kPmi,     Estimator::kPTrue,           Estimator::kSemanticEntropy,
      Estimator::kLexSim,  Estimator::kDegMat,          Estimator::kLuq};
  return kAll;
}

std::string_view estimator_name(Estimator e) {
  return kEstimatorNames[static_cast<std::size_t>(e)];
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  for (std::size_t i = 0; i < kEstimatorNames.size(); ++i) {
    if (kEstimatorNames[i] == name) return static_cast<Estimator>(i);
  }
  return std::nullopt;
}

void to_json(Json& j, const VqaInstance& v) {
  j = Json{{"id", v.id},
           {"image_ref", v.image_ref},
           {"question", v.question},
           {"reference_answers", v.reference_answers},
           {"dataset", v.dataset}};
  if (v.subset_tag) {
    j["subset_tag"] = subset_tag_name(*v.subset_tag);
  } else {
    j["subset_tag"] = nullptr;
  }
  put_optional(j, "question_type", v.question_type);
}

void from_json(const Json& j, VqaInstance& v) {
  v.id = j.at("id").get<std::string>();
  v.image_ref = j.value("image_ref", std::string());
  v.question = j.at("question").get<std::string>();
  v.reference_answers =
      j.value("reference_answers", std::vector<std::string>{});
  v.dataset = j.value("dataset", std::string());
  v.subset_tag.reset();
  if (auto tag = get_optional<std::string>(j, "subset_tag")) {
    v.subset_tag = parse_subset_tag(*tag);
    if (!v.subset_tag) throw DataError("unknown subset_tag '" + *tag + "'");
  }
  v.question_type = get_optional<std::string>(j, "question_type");
  if (v.id.empty()) throw DataError("instance id is empty");
  if (v.question.empty()) {
    throw DataError("instance " + v.id + " has an empty question");
  }
}

void to_json(Json& j, const PerturbationSpec& v) {
  j = Json{{"family", family_name(v.family())},
           {"kind", kind_name(v.kind)},
           {"strength", v.strength},
           {"seed", v.seed}};
}

void from_json(const Json& j, PerturbationSpec& v) {
  v.kind = parse_kind_or_throw(j.at("kind").get<std::string>());
  v.strength = j.value("strength", 0.0);
  v.seed = j.value("seed", std::uint64_t{0});
  if (auto fam = j.find("family"); fam != j.end()) {
    auto f = parse_family(fam->get<std::string>());
    if (!f || *f != v.family()) {
      throw DataError("kind " + std::string(kind_name(v.kind)) +
                      " does not belong to family " + fam->dump());
    }
  }
}

void to_json(Json& j, const VariantRecord& v) {
  j = Json{{"instance_id", v.instance_id},
           {"variant_id", v.variant_id},
           {"image_ref", v.image_ref},
           {"question", v.question}};
  if (v.spec) {
    j["spec"] = *v.spec;
  } else {
    j["spec"] = "identity";
  }
}

void from_json(const Json& j, VariantRecord& v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.variant_id = j.at("variant_id").get<std::string>();
  v.image_ref = j.at("image_ref").get<std::string>();
  v.question = j.at("question").get<std::string>();
  const auto& spec = j.at("spec");
  if (spec.is_string()) {
    if (spec.get<std::string>() != "identity") {
      throw DataError("variant spec must be an object or \"identity\"");
    }
    v.spec.reset();
  } else {
    v.spec = spec.get<PerturbationSpec>();
  }
}

void to_json(Json& j, const GenerationRecord& v) {
  j = Json{{"instance_id", v.instance_id},
           {"variant_id", v.variant_id},
           {"mode", decoding_mode_name(v.mode)},
           {"text", v.text},
           {"sample_index", v.sample_index},
           {"refusal", v.refusal}};
  put_optional(j, "token_logprobs", v.token_logprobs);
  put_optional(j, "step_entropies", v.step_entropies);
  put_optional(j, "unconditional_logprobs", v.unconditional_logprobs);
}

void from_json(const Json& j, GenerationRecord& v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.variant_id = j.at("variant_id").get<std::string>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "greedy") {
    v.mode = DecodingMode::kGreedy;
  } else if (mode == "sample") {
    v.mode = DecodingMode::kSample;
  } else {
    throw DataError("unknown decoding mode '" + mode + "'");
  }
  v.text = j.at("text").get<std::string>();
  v.sample_index = j.value("sample_index", 0);
  v.refusal = j.value("refusal", false);
  v.token_logprobs = get_optional<std::vector<double>>(j, "token_logprobs");
  v.step_entropies = get_optional<std::vector<double>>(j, "step_entropies");
  v.unconditional_logprobs =
      get_optional<std::vector<double>>(j, "unconditional_logprobs");
}

void to_json(Json& j, const ScoreRecord& v) {
  j = Json{{"instance_id", v.instance_id},
           {"variant_id", v.variant_id},
           {"estimator", estimator_name(v.estimator)},
           {"status", v.status == ScoreStatus::kOk ? "ok" : "unavailable"}};
  put_optional(j, "score", v.score);
  if (!v.meta.empty()) j["meta"] = v.meta;
}

void from_json(const Json& j, ScoreRecord& v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.variant_id = j.at("variant_id").get<std::string>();
  const auto name = j.at("estimator").get<std::string>();
  auto e = parse_estimator(name);
  if (!e) throw DataError("unknown estimator '" + name + "'");
  v.estimator = *e;
  const auto status = j.at("status").get<std::string>();
  if (status == "ok") {
    v.status = ScoreStatus::kOk;
  } else if (status == "unavailable") {
    v.status = ScoreStatus::kUnavailable;
  } else {
    throw DataError("unknown score status '" + status + "'");
  }
  v.score = get_optional<double>(j, "score");
  if (v.score.has_value() != (v.status == ScoreStatus::kOk)) {
    throw DataError("score must be present iff status is ok");
  }
  v.meta = j.value("meta", std::map<std::string, std::string>{});
}

void to_json(Json& j, const ElicitationRecord& v) {
  j = Json{{"instance_id", v.instance_id}, {"variant_id", v.variant_id},
           {"answer", v.answer},           {"token", v.token},
           {"logprob", v.logprob},         {"p_true", v.p_true}};
}

void from_json(const Json& j, ElicitationRecord& v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.variant_id = j.at("variant_id").get<std::string>();
  v.answer = j.at("answer").get<std::string>();
  v.token = j.at("token").get<std::string>();
  v.logprob = j.at("logprob").get<double>();
  v.p_true = j.at("p_true").get<double>();
}

void to_json(Json& j, const LabelRecord& v) {
  j = Json{{"instance_id", v.instance_id},
           {"kind", v.kind},
           {"clean_correct", v.clean_correct},
           {"pert_correct", v.pert_correct}};
}

void from_json(const Json& j, LabelRecord& v) {
  v.instance_id = j.at("instance_id").get<std::string>();
  v.kind = j.value("kind", std::string());
  v.clean_correct = j.at("clean_correct").get<bool>();
  v.pert_correct = j.at("pert_correct").get<bool>();
}

}  // namespace uqbench
