#include "uqbench/estimators/estimators.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "uqbench/core/errors.h"

namespace uqbench::estimators {
namespace {

void require_nonempty(std::span<const double> v, const char* what) {
  if (v.empty()) throw DataError(std::string(what) + ": empty sequence");
  for (double x : v) {
    if (std::isnan(x)) throw DataError(std::string(what) + ": NaN input");
  }
}

double sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

ScoreRecord unavailable(const EstimatorInputs& in, Estimator e,
                        std::string reason) {
  ScoreRecord r{in.instance_id, in.variant_id, e, std::nullopt,
                ScoreStatus::kUnavailable, {}};
  r.meta["reason"] = std::move(reason);
  return r;
}

ScoreRecord ok(const EstimatorInputs& in, Estimator e, double score) {
  return ScoreRecord{in.instance_id, in.variant_id, e, score, ScoreStatus::kOk, {}};
}

}  // namespace

double msp(std::span<const double> logprobs) {
  require_nonempty(logprobs, "MSP");
  return -sum(logprobs);
}

double perplexity(std::span<const double> logprobs) {
  require_nonempty(logprobs, "Perplexity");
  return -sum(logprobs) / static_cast<double>(logprobs.size());
}

double mean_token_entropy(std::span<const double> step_entropies) {
  require_nonempty(step_entropies, "MeanTokenEntropy");
  return sum(step_entropies) / static_cast<double>(step_entropies.size());
}

double pmi(std::span<const double> conditional,
           std::span<const double> unconditional) {
  require_nonempty(conditional, "PMI");
  if (conditional.size() != unconditional.size()) {
    throw DataError("PMI: conditional has " + std::to_string(conditional.size()) +
                    " tokens, unconditional " +
                    std::to_string(unconditional.size()));
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < conditional.size(); ++t) {
    acc += conditional[t] - unconditional[t];
  }
  return -acc / static_cast<double>(conditional.size());
}

PTrueScore ptrue(double p_true) {
  if (std::isnan(p_true)) throw DataError("PTrue: NaN probability");
  if (p_true < kPTrueFloor) return {-std::log(kPTrueFloor), true};
  return {-std::log(std::min(p_true, 1.0)), false};
}

double discrete_entropy(std::span<const double> masses) {
  const double total = sum(masses);
  if (!(total > 0.0)) throw DataError("entropy of an all-zero distribution");
  double h = 0.0;
  for (double m : masses) {
    const double q = m / total;
    if (q > 0.0) h -= q * std::log(q);
  }
  return std::max(h, 0.0);
}

SemanticEntropyResult semantic_entropy(
    const std::vector<std::string>& texts,
    const std::vector<std::optional<std::vector<double>>>& logprobs,
    SimilarityProvider& provider) {
  const int m = static_cast<int>(texts.size());
  if (m == 0) throw DataError("SemanticEntropy: no samples");
  if (logprobs.size() != texts.size()) {
    throw DataError("SemanticEntropy: logprob list size differs from samples");
  }
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (find_root(parent, i) == find_root(parent, j)) continue;
      if (provider.entail(texts[i], texts[j]) > kEntailThreshold &&
          provider.entail(texts[j], texts[i]) > kEntailThreshold) {
        parent[find_root(parent, j)] = find_root(parent, i);
      }
    }
  }

  SemanticEntropyResult r;
  r.mode = std::all_of(logprobs.begin(), logprobs.end(),
                       [](const auto& lp) { return lp && !lp->empty(); })
               ? SeMode::kLikelihood
               : SeMode::kFrequency;
  // Clusters numbered by first member so the labels are canonical.
  std::vector<int> label_of_root(m, -1);
  std::vector<double> mass;
  r.cluster_of.resize(m);
  for (int i = 0; i < m; ++i) {
    const int root = find_root(parent, i);
    if (label_of_root[root] < 0) {
      label_of_root[root] = static_cast<int>(mass.size());
      mass.push_back(0.0);
    }
    r.cluster_of[i] = label_of_root[root];
    double w = 1.0;
    if (r.mode == SeMode::kLikelihood) {
      const auto& lp = *logprobs[i];
      w = std::exp(sum(lp) / static_cast<double>(lp.size()));
    }
    mass[r.cluster_of[i]] += w;
  }
  r.score = discrete_entropy(mass);
  return r;
}

double lexical_similarity(const std::vector<std::string>& texts) {
  const std::size_t m = texts.size();
  if (m < 2) throw DataError("LexSim needs at least 2 samples");
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) acc += rouge_l(texts[i], texts[j]);
  }
  return -acc * 2.0 / (static_cast<double>(m) * (m - 1));
}

double degmat(const SimilarityMatrix& w) {
  const std::size_t m = w.size();
  if (m == 0) throw DataError("DegMat: empty matrix");
  double acc = 0.0;
  for (const auto& row : w.values) {
    if (row.size() != m) throw DataError("DegMat: matrix is not square");
    acc += static_cast<double>(m) - sum(row);
  }
  return acc / (static_cast<double>(m) * m);
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '?' || c == '!') &&
        std::isspace(static_cast<unsigned char>(text[i + 1]))) {
      if (auto s = trim(text.substr(start, i + 1 - start)); !s.empty()) {
        out.push_back(std::move(s));
      }
      start = i + 1;
    }
  }
  if (auto s = trim(text.substr(start)); !s.empty()) out.push_back(std::move(s));
  if (out.empty()) out.push_back(text);
  return out;
}

double luq(const std::vector<std::string>& texts, SimilarityProvider& provider) {
  const std::size_t m = texts.size();
  if (m < 2) throw DataError("LUQ needs at least 2 samples");
  double total_c = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto sentences = split_sentences(texts[i]);
    double c = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (const auto& sentence : sentences) s += provider.entail(texts[j], sentence);
      c += s / static_cast<double>(sentences.size());
    }
    total_c += c / static_cast<double>(m - 1);
  }
  return std::clamp(1.0 - total_c / static_cast<double>(m), 0.0, 1.0);
}

bool is_sample_based(Estimator e) {
  switch (e) {
    case Estimator::kSemanticEntropy:
    case Estimator::kLexSim:
    case Estimator::kDegMat:
    case Estimator::kLuq:
      return true;
    default:
      return false;
  }
}

ScoreRecord estimate(Estimator e, const EstimatorInputs& in,
                     SimilarityProvider& provider) {
  if (is_sample_based(e)) {
    if (in.samples.size() < 2) return unavailable(in, e, "fewer than 2 samples");
    std::vector<std::string> texts;
    std::vector<std::optional<std::vector<double>>> lps;
    for (const auto& g : in.samples) {
      texts.push_back(g.text);
      lps.push_back(g.token_logprobs);
    }
    switch (e) {
      case Estimator::kSemanticEntropy: {
        const auto se = semantic_entropy(texts, lps, provider);
        auto r = ok(in, e, se.score);
        r.meta["se_mode"] = se.mode == SeMode::kLikelihood ? "likelihood" : "frequency";
        r.meta["clusters"] = std::to_string(
            *std::max_element(se.cluster_of.begin(), se.cluster_of.end()) + 1);
        return r;
      }
      case Estimator::kLexSim:
        return ok(in, e, lexical_similarity(texts));
      case Estimator::kDegMat:
        return ok(in, e, degmat(symmetrized(build_similarity_matrix(texts, provider))));
      default:
        return ok(in, e, luq(texts, provider));
    }
  }

  if (e == Estimator::kPTrue) {
    if (!in.p_true) return unavailable(in, e, "no PTrue elicitation");
    const auto p = ptrue(*in.p_true);
    auto r = ok(in, e, p.score);
    if (p.clamped) r.meta["clamped"] = "1";
    return r;
  }
  if (!in.greedy) return unavailable(in, e, "no greedy generation");
  const auto& g = *in.greedy;
  switch (e) {
    case Estimator::kMsp:
      if (!g.token_logprobs) return unavailable(in, e, "no token logprobs");
      return ok(in, e, msp(*g.token_logprobs));
    case Estimator::kPerplexity:
      if (!g.token_logprobs) return unavailable(in, e, "no token logprobs");
      return ok(in, e, perplexity(*g.token_logprobs));
    case Estimator::kMeanTokenEntropy:
      if (!g.step_entropies) {
        return unavailable(in, e, "no full token-level distributions");
      }
      return ok(in, e, mean_token_entropy(*g.step_entropies));
    case Estimator::kPmi:
      if (!g.token_logprobs) return unavailable(in, e, "no token logprobs");
      if (!g.unconditional_logprobs) {
        return unavailable(in, e, "no unconditional scoring pass");
      }
      return ok(in, e, pmi(*g.token_logprobs, *g.unconditional_logprobs));
    default:
      break;
  }
  throw Error("unhandled estimator");
}

}  // namespace uqbench::estimators
