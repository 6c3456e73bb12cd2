#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "uqbench/backend/backend.h"
#include "uqbench/core/errors.h"
#include "uqbench/cross/mask_provider.h"
#include "uqbench/estimators/similarity.h"
#include "uqbench/runner/config.h"

namespace uqbench::runner {

// More than half of the instances failed; the run stops.
class AbortError : public Error {
 public:
  using Error::Error;
};

struct FailureRecord {
  std::string instance_id;
  std::string stage;
  std::string kind;  // empty when not tied to one perturbation
  std::string error;

  bool operator==(const FailureRecord&) const = default;
};

// A perturbation that legitimately produced no variant (AMB/IVE null).
struct SkipRecord {
  std::string instance_id;
  std::string kind;
  std::string reason;

  bool operator==(const SkipRecord&) const = default;
};

void to_json(Json& j, const FailureRecord& r);
void from_json(const Json& j, FailureRecord& r);
void to_json(Json& j, const SkipRecord& r);
void from_json(const Json& j, SkipRecord& r);

enum class Stage { kPerturb, kInfer, kScore, kEvaluate };
std::string_view stage_name(Stage s);

struct StageOutcome {
  Stage stage = Stage::kPerturb;
  bool reused = false;  // outputs were up to date and left untouched
  std::size_t instances = 0;
  std::size_t failed = 0;  // cumulative over all stages so far
};

// Backends built from the config unless supplied here (tests inject them).
struct Services {
  std::shared_ptr<backend::Backend> answer;
  std::shared_ptr<backend::Backend> rewrite;
  std::shared_ptr<cross::RelevanceMaskProvider> masks;
  std::shared_ptr<estimators::SimilarityProvider> similarity;
};

// Files under the output directory:
//   variants.jsonl generations.jsonl elicitations.jsonl scores.jsonl
//   labels.jsonl report.json images/<variant_id>.png
//   failures.<stage>.jsonl skipped.jsonl manifest.json
// Every stage reads its inputs from disk, so stages can run one at a time.
// A stage whose input digest matches manifest.json and whose outputs are
// intact is not recomputed.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config, Services services = {});
  ~Experiment();

  StageOutcome perturb();
  StageOutcome infer();
  StageOutcome score();
  StageOutcome evaluate();
  // All four stages. Throws AbortError when over half the instances fail.
  std::vector<StageOutcome> run();

  const ExperimentConfig& config() const { return cfg_; }
  std::filesystem::path out_dir() const { return cfg_.out_dir(); }
  std::string config_digest() const;

  // image_ref -> bytes. "@out/..." refers to the output directory, anything
  // else to the config's image folder.
  std::vector<std::uint8_t> load_image(const std::string& image_ref) const;
  std::filesystem::path image_path(const std::string& image_ref) const;

 private:
  struct State;

  std::vector<VqaInstance> load_instances() const;
  std::set<std::string> failed_before(Stage s) const;
  void check_abort(std::size_t instances, std::size_t failed) const;
  std::string stage_digest(Stage s) const;
  bool up_to_date(Stage s, const std::string& digest) const;
  void record_stage(Stage s, const std::string& digest) const;

  ExperimentConfig cfg_;
  Services services_;
  std::unique_ptr<State> state_;
};

// Normalized greedy answer equals one of the normalized references.
bool answer_correct(const std::string& answer,
                    const std::vector<std::string>& references);

// Exit status for a finished run: 0 without failures, 2 with some.
int exit_code_for(const std::vector<StageOutcome>& outcomes);

}  // namespace uqbench::runner
