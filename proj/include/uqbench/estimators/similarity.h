#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "uqbench/core/types.h"

namespace uqbench::estimators {

// ROUGE-L F-measure over lexical_tokens(); 0 when either side is empty.
double rouge_l(const std::string& a, const std::string& b);

// Directed similarity P_entail(hypothesis | premise) in [0, 1].
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;
  virtual std::string id() const = 0;
  virtual double entail(const std::string& premise,
                        const std::string& hypothesis) = 0;
};

// 1 when normalize_answer() of both sides agree, else 0.
class ExactMatchProvider : public SimilarityProvider {
 public:
  std::string id() const override { return "exact"; }
  double entail(const std::string& premise,
                const std::string& hypothesis) override;
};

class RougeLProvider : public SimilarityProvider {
 public:
  std::string id() const override { return "rouge_l"; }
  double entail(const std::string& premise,
                const std::string& hypothesis) override {
    return rouge_l(premise, hypothesis);
  }
};

// Lookup table keyed by (sha256(premise), sha256(hypothesis)). Fixture:
//   {"default": 0.0,
//    "entries": [{"premise": "...", "hypothesis": "...", "p_entail": 0.9}],
//    "digests": {"<sha premise>|<sha hypothesis>": 0.9}}
// Missing pairs return `default`; identical texts return 1 unless listed.
class TableEntailmentProvider : public SimilarityProvider {
 public:
  explicit TableEntailmentProvider(const Json& fixture);
  static TableEntailmentProvider from_file(const std::string& path);

  std::string id() const override { return "table"; }
  double entail(const std::string& premise,
                const std::string& hypothesis) override;

  static std::string key(const std::string& premise,
                         const std::string& hypothesis);

 private:
  std::map<std::string, double> table_;
  double default_ = 0.0;
};

// POST <url> {premise, hypothesis} -> {p_entail}.
class HttpEntailmentProvider : public SimilarityProvider {
 public:
  explicit HttpEntailmentProvider(std::string url) : url_(std::move(url)) {}
  std::string id() const override { return "http:" + url_; }
  double entail(const std::string& premise,
                const std::string& hypothesis) override;

 private:
  std::string url_;
};

// Memoizes another provider. Thread-safe.
class CachingProvider : public SimilarityProvider {
 public:
  explicit CachingProvider(std::unique_ptr<SimilarityProvider> inner)
      : inner_(std::move(inner)) {}
  std::string id() const override { return inner_->id(); }
  double entail(const std::string& premise,
                const std::string& hypothesis) override;

 private:
  std::unique_ptr<SimilarityProvider> inner_;
  std::mutex mu_;
  std::map<std::pair<std::string, std::string>, double> cache_;
};

// {"kind": "exact" | "rouge_l" | "table" | "http", "path": ..., "url": ...}
std::unique_ptr<SimilarityProvider> make_similarity_provider(const Json& config);

enum class SimilarityKind { kRougeL, kEntailment, kExact };

// M x M grid; values[i][j] = provider.entail(texts[i], texts[j]) off the
// diagonal, 1 on it.
struct SimilarityMatrix {
  SimilarityKind kind = SimilarityKind::kEntailment;
  std::vector<std::vector<double>> values;

  std::size_t size() const { return values.size(); }
};

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& texts,
                                         SimilarityProvider& provider);

// (W + W^T) / 2, keeping the unit diagonal.
SimilarityMatrix symmetrized(const SimilarityMatrix& w);

}  // namespace uqbench::estimators
