#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uqbench/core/kinds.h"

namespace uqbench {

using Json = nlohmann::json;

enum class SubsetTag { kClean, kImage, kText, kCross };

std::string_view subset_tag_name(SubsetTag tag);
std::optional<SubsetTag> parse_subset_tag(std::string_view name);

// An image-question pair with reference answers.
struct VqaInstance {
  std::string id;
  std::string image_ref;
  std::string question;
  std::vector<std::string> reference_answers;
  std::optional<SubsetTag> subset_tag;
  std::string dataset;
  // Populated for generated CLEVR questions.
  std::optional<std::string> question_type;

  bool operator==(const VqaInstance&) const = default;
};

// One transform T^(k)(.; strength) with its seed.
struct PerturbationSpec {
  Kind kind = Kind::kBlur;
  double strength = 0.0;
  std::uint64_t seed = 0;

  Family family() const { return family_of(kind); }
  // Throws ParameterError when strength is outside the operator's range.
  void validate() const;

  bool operator==(const PerturbationSpec&) const = default;
};

// Deterministic content digest of (instance_id, family, kind, strength,
// seed). The identity variant is `<instance_id>__clean`.
std::string variant_id(std::string_view instance_id,
                       const std::optional<PerturbationSpec>& spec);

struct VariantRecord {
  std::string instance_id;
  std::string variant_id;
  // nullopt is the identity variant.
  std::optional<PerturbationSpec> spec;
  std::string image_ref;
  std::string question;

  bool is_identity() const { return !spec.has_value(); }
  bool operator==(const VariantRecord&) const = default;
};

// The identity variant of `instance`: image and question copied verbatim.
VariantRecord identity_variant(const VqaInstance& instance);

enum class DecodingMode { kGreedy, kSample };

std::string_view decoding_mode_name(DecodingMode mode);

struct GenerationRecord {
  std::string instance_id;
  std::string variant_id;
  DecodingMode mode = DecodingMode::kGreedy;
  std::string text;
  // Chosen-token log-probabilities; absent when the backend exposes none.
  std::optional<std::vector<double>> token_logprobs;
  // Per-step predictive entropies (nats); needs full step distributions.
  std::optional<std::vector<double>> step_entropies;
  // log p(y_t | y_<t) without image or question, for PMI.
  std::optional<std::vector<double>> unconditional_logprobs;
  int sample_index = 0;
  // The backend refused (content policy); kept as data.
  bool refusal = false;

  bool operator==(const GenerationRecord&) const = default;
};

enum class Estimator {
  kMsp,
  kPerplexity,
  kMeanTokenEntropy,
  kPmi,
  kPTrue,
  kSemanticEntropy,
  kLexSim,
  kDegMat,
  kLuq,
};

inline constexpr int kNumEstimators = 9;

const std::vector<Estimator>& all_estimators();
std::string_view estimator_name(Estimator e);
std::optional<Estimator> parse_estimator(std::string_view name);

enum class ScoreStatus { kOk, kUnavailable };

struct ScoreRecord {
  std::string instance_id;
  std::string variant_id;
  Estimator estimator = Estimator::kMsp;
  // Present iff status == kOk.
  std::optional<double> score;
  ScoreStatus status = ScoreStatus::kOk;
  // Free-form annotations, e.g. {"se_mode": "frequency"} or {"clamped": "1"}.
  std::map<std::string, std::string> meta;

  bool operator==(const ScoreRecord&) const = default;
};

// Result of one PTrue elicitation on a greedy answer.
struct ElicitationRecord {
  std::string instance_id;
  std::string variant_id;
  std::string answer;
  std::string token;
  double logprob = 0.0;
  double p_true = 0.0;

  bool operator==(const ElicitationRecord&) const = default;
};

// Correctness of the greedy answer on a clean / perturbed pair. `kind`
// names the perturbation of the perturbed side.
struct LabelRecord {
  std::string instance_id;
  std::string kind;
  bool clean_correct = false;
  bool pert_correct = false;

  bool operator==(const LabelRecord&) const = default;
};

void to_json(Json& j, const VqaInstance& v);
void from_json(const Json& j, VqaInstance& v);
void to_json(Json& j, const PerturbationSpec& v);
void from_json(const Json& j, PerturbationSpec& v);
void to_json(Json& j, const VariantRecord& v);
void from_json(const Json& j, VariantRecord& v);
void to_json(Json& j, const GenerationRecord& v);
void from_json(const Json& j, GenerationRecord& v);
void to_json(Json& j, const ScoreRecord& v);
void from_json(const Json& j, ScoreRecord& v);
void to_json(Json& j, const ElicitationRecord& v);
void from_json(const Json& j, ElicitationRecord& v);
void to_json(Json& j, const LabelRecord& v);
void from_json(const Json& j, LabelRecord& v);

}  // namespace uqbench
