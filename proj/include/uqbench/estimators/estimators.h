#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqbench/core/types.h"
#include "uqbench/estimators/similarity.h"

namespace uqbench::estimators {

inline constexpr double kPTrueFloor = 1e-12;
inline constexpr double kEntailThreshold = 0.5;

// Token-level estimators over one greedy answer. Empty input and length
// mismatches throw DataError.
double msp(std::span<const double> logprobs);
double perplexity(std::span<const double> logprobs);
double mean_token_entropy(std::span<const double> step_entropies);
double pmi(std::span<const double> conditional,
           std::span<const double> unconditional);

struct PTrueScore {
  double score = 0.0;
  bool clamped = false;
};
// -log p, with p floored at kPTrueFloor (clamped = true) and capped at 1.
PTrueScore ptrue(double p_true);

enum class SeMode { kLikelihood, kFrequency };

struct SemanticEntropyResult {
  double score = 0.0;
  SeMode mode = SeMode::kFrequency;
  std::vector<int> cluster_of;  // cluster index per sample
};

// Samples i, j share a cluster when entail(i, j) and entail(j, i) both
// exceed kEntailThreshold; clusters are the connected components of that
// relation. Cluster mass is the summed exp(mean logprob) of its members
// when every sample carries logprobs, else its frequency. Natural log.
SemanticEntropyResult semantic_entropy(
    const std::vector<std::string>& texts,
    const std::vector<std::optional<std::vector<double>>>& logprobs,
    SimilarityProvider& provider);

// Entropy of a discrete distribution (masses normalized first).
double discrete_entropy(std::span<const double> masses);

// -(mean pairwise rouge_l) over i < j.
double lexical_similarity(const std::vector<std::string>& texts);

// sum_i (M - D_ii) / M^2 with D_ii = sum_j W_ij.
double degmat(const SimilarityMatrix& w);

// Splits on '.', '?' or '!' followed by whitespace. Never empty for
// non-empty input: no split point yields the whole (trimmed) text.
std::vector<std::string> split_sentences(const std::string& text);

// 1 - mean_m C(y_m), C(y_m) = mean_{m' != m} mean_t P(s_t^m | y_m').
double luq(const std::vector<std::string>& texts, SimilarityProvider& provider);

// Everything one (instance, variant) offers the estimators.
struct EstimatorInputs {
  std::string instance_id;
  std::string variant_id;
  std::optional<GenerationRecord> greedy;
  std::vector<GenerationRecord> samples;
  std::optional<double> p_true;
};

// Runs one estimator. Missing inputs (no logprobs, no unconditional pass,
// no PTrue elicitation, fewer than 2 samples) give status unavailable with
// meta["reason"]; malformed inputs throw DataError.
ScoreRecord estimate(Estimator e, const EstimatorInputs& in,
                     SimilarityProvider& provider);

// Whether `e` reads the sampled set (as opposed to the greedy answer).
bool is_sample_based(Estimator e);

}  // namespace uqbench::estimators
