#include "uqbench/estimators/similarity.h"

#include <algorithm>
#include <cmath>

#include "uqbench/backend/http.h"
#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/core/normalize.h"

namespace uqbench::estimators {

double rouge_l(const std::string& a, const std::string& b) {
  const auto x = lexical_tokens(a);
  const auto y = lexical_tokens(b);
  if (x.empty() || y.empty()) return 0.0;
  std::vector<std::size_t> prev(y.size() + 1, 0), cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[y.size()]);
  if (lcs == 0.0) return 0.0;
  const double p = lcs / x.size();
  const double r = lcs / y.size();
  return 2.0 * p * r / (p + r);
}

double ExactMatchProvider::entail(const std::string& premise,
                                  const std::string& hypothesis) {
  return normalize_answer(premise) == normalize_answer(hypothesis) ? 1.0 : 0.0;
}

std::string TableEntailmentProvider::key(const std::string& premise,
                                         const std::string& hypothesis) {
  return sha256_hex(premise) + "|" + sha256_hex(hypothesis);
}

TableEntailmentProvider::TableEntailmentProvider(const Json& fixture) {
  default_ = fixture.value("default", 0.0);
  auto check = [](double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError("entailment table value outside [0, 1]");
    }
    return p;
  };
  check(default_);
  if (fixture.contains("entries")) {
    for (const auto& e : fixture.at("entries")) {
      table_[key(e.at("premise").get<std::string>(),
                 e.at("hypothesis").get<std::string>())] =
          check(e.at("p_entail").get<double>());
    }
  }
  if (fixture.contains("digests")) {
    for (const auto& [k, v] : fixture.at("digests").items()) {
      table_[k] = check(v.get<double>());
    }
  }
}

TableEntailmentProvider TableEntailmentProvider::from_file(
    const std::string& path) {
  try {
    return TableEntailmentProvider(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

double TableEntailmentProvider::entail(const std::string& premise,
                                       const std::string& hypothesis) {
  if (auto it = table_.find(key(premise, hypothesis)); it != table_.end()) {
    return it->second;
  }
  return premise == hypothesis ? 1.0 : default_;
}

double HttpEntailmentProvider::entail(const std::string& premise,
                                      const std::string& hypothesis) {
  const Json reply = backend::post_json_checked(
      url_, Json{{"premise", premise}, {"hypothesis", hypothesis}});
  if (!reply.contains("p_entail") || !reply.at("p_entail").is_number()) {
    throw DataError("entailment reply without numeric p_entail");
  }
  const double p = reply.at("p_entail").get<double>();
  if (!std::isfinite(p)) throw DataError("entailment reply is not finite");
  return std::clamp(p, 0.0, 1.0);
}

double CachingProvider::entail(const std::string& premise,
                               const std::string& hypothesis) {
  auto key = std::make_pair(premise, hypothesis);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double p = inner_->entail(premise, hypothesis);
  std::lock_guard lock(mu_);
  cache_.emplace(std::move(key), p);
  return p;
}

std::unique_ptr<SimilarityProvider> make_similarity_provider(const Json& config) {
  const std::string kind = config.value("kind", std::string("exact"));
  if (kind == "exact") return std::make_unique<ExactMatchProvider>();
  if (kind == "rouge_l") return std::make_unique<RougeLProvider>();
  if (kind == "table") {
    return std::make_unique<TableEntailmentProvider>(
        TableEntailmentProvider::from_file(config.at("path").get<std::string>()));
  }
  if (kind == "http") {
    return std::make_unique<HttpEntailmentProvider>(
        config.at("url").get<std::string>());
  }
  throw ParameterError("unknown similarity provider: " + kind);
}

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& texts,
                                         SimilarityProvider& provider) {
  const std::size_t m = texts.size();
  SimilarityMatrix w;
  const auto id = provider.id();
  w.kind = id == "exact"     ? SimilarityKind::kExact
           : id == "rouge_l" ? SimilarityKind::kRougeL
                             : SimilarityKind::kEntailment;
  w.values.assign(m, std::vector<double>(m, 1.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) w.values[i][j] = provider.entail(texts[i], texts[j]);
    }
  }
  return w;
}

SimilarityMatrix symmetrized(const SimilarityMatrix& w) {
  SimilarityMatrix s = w;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      s.values[i][j] = i == j ? 1.0 : 0.5 * (w.values[i][j] + w.values[j][i]);
    }
  }
  return s;
}

}  // namespace uqbench::estimators
