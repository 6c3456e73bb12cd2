#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "uqbench/backend/backend.h"

namespace uqbench::backend {

// Deterministic offline backend. Fixture layout (JSON):
//
//   {
//     "capabilities": {...},
//     "answers": ["red", "blue", ...],          // synthetic answer pool
//     "prior_equals_conditional": false,
//     "entries": {
//       "<sha256 of question>": {
//         "answers": [...],                      // per-question pool
//         "greedy": {"text": ..., "tokens": [{"token", "logprob", "entropy"}],
//                    "prior_logprobs": [...]},
//         "samples": [ <same shape as greedy>, ... ],
//         "ptrue": {"token": "True", "logprob": -0.1},
//         "rewrites": {"inv": "...", "sbj": "...", "cross": "<raw JSON text>"},
//         "refuse": false
//       }
//     }
//   }
//
// Anything not canned is synthesized from a SHA-256 of the request content
// (question, image bytes, temperature, seed), so perturbing the image or
// the question changes the output while reruns stay byte-identical.
class MockBackend : public Backend {
 public:
  explicit MockBackend(Json fixture);
  static MockBackend from_file(const std::filesystem::path& path);

  BackendCapabilities capabilities() const override { return caps_; }
  ChatResponse complete(const ChatRequest& request) override;
  std::vector<double> score_prior(const std::string& continuation) override;

  // Number of complete() calls served.
  int calls() const;

  static std::string question_key(const std::string& question);

 private:
  const Json* entry_for(const std::string& question) const;
  ChatResponse answer(const ChatRequest& request, const Json* entry);
  ChatResponse ptrue(const ChatRequest& request, const Json* entry) const;
  ChatResponse rewrite(const ChatRequest& request, const Json* entry) const;
  ChatResponse from_canned(const Json& canned);

  Json fixture_;
  BackendCapabilities caps_;
  std::vector<std::string> pool_;
  bool prior_equals_conditional_ = false;

  mutable std::mutex mu_;
  int calls_ = 0;
  // Conditional logprobs and canned priors by generated text.
  std::map<std::string, std::vector<double>> conditional_by_text_;
  std::map<std::string, std::vector<double>> prior_by_text_;
};

}  // namespace uqbench::backend
