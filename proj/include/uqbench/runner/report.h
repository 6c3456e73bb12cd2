#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uqbench/backend/backend.h"
#include "uqbench/core/types.h"
#include "uqbench/metrics/metrics.h"

namespace uqbench::runner {

struct EvaluationInput {
  std::vector<VqaInstance> instances;
  std::vector<VariantRecord> variants;
  std::vector<ScoreRecord> scores;
  std::vector<LabelRecord> labels;
  std::set<std::string> failed;  // instance ids excluded from metrics
  std::vector<Kind> kinds;
  std::vector<Estimator> estimators;
  metrics::LabelMode label_mode = metrics::LabelMode::kFlip;
  backend::BackendCapabilities capabilities;
  Json meta = Json::object();  // copied into report["meta"]
};

// report["results"][estimator][kind] is either
//   {"status": "ok", "auroc", "best_f1", "urr", "hcc",
//    "hallucination_rate", "n_pairs", "n_labels"}
// or {"status": "unavailable", "reason"}. Metrics that cannot be computed
// are {"undefined": reason}. report["aggregates"][estimator][family] holds
// "pooled" and "mean" cells; report["subsets"] is present when instances
// carry subset tags.
Json build_report(const EvaluationInput& in);

inline constexpr std::string_view kReportMetrics[] = {
    "auroc", "best_f1", "urr", "hcc", "hallucination_rate"};

// CSV: header "estimator,<kind>...", one row per estimator; unavailable or
// undefined cells are empty. ParameterError for unknown metrics.
std::string emit_heatmap_data(const Json& report, std::string_view metric);

}  // namespace uqbench::runner
