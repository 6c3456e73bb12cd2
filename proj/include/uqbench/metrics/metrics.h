#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqbench/core/types.h"

namespace uqbench::metrics {

// A metric value or an explicit "undefined" with the reason. Serializes to
// a number, or to {"undefined": reason}.
struct MetricValue {
  std::optional<double> value;
  std::string undefined_reason;

  static MetricValue of(double v) { return {v, {}}; }
  static MetricValue undefined(std::string why) { return {std::nullopt, std::move(why)}; }
  bool defined() const { return value.has_value(); }

  bool operator==(const MetricValue&) const = default;
};

void to_json(Json& j, const MetricValue& m);
void from_json(const Json& j, MetricValue& m);

struct ScorePair {
  std::string instance_id;
  double u_clean = 0.0;
  double u_pert = 0.0;

  double delta() const { return u_pert - u_clean; }
};

enum class LabelMode {
  kFlip,       // h = clean correct and perturbed incorrect
  kIncorrect,  // h = perturbed incorrect
};

struct HallucinationLabel {
  std::string instance_id;
  bool clean_correct = false;
  bool pert_correct = false;
  LabelMode mode = LabelMode::kFlip;

  bool h() const {
    return mode == LabelMode::kFlip ? clean_correct && !pert_correct : !pert_correct;
  }
};

// Mann-Whitney: fraction of (pos, neg) pairs with pos > neg, ties 0.5.
MetricValue auroc(std::span<const double> positive, std::span<const double> negative);

// Max F1 over thresholds {distinct scores} U {-inf}, positive iff score >= t.
MetricValue best_f1(std::span<const double> scores, std::span<const int> labels);
// Same sweep with scores split into the two classes.
MetricValue best_f1(std::span<const double> positive, std::span<const double> negative);

// Fraction of pairs with u_pert > u_clean (strict).
MetricValue urr(std::span<const ScorePair> pairs);

// Point-biserial correlation of delta U with h, population std. Labels are
// matched to pairs by instance_id; unmatched pairs are ignored.
MetricValue hcc(std::span<const ScorePair> pairs,
                std::span<const HallucinationLabel> labels);
MetricValue point_biserial(std::span<const double> delta, std::span<const int> h);

// 100 * |h = 1| / n.
MetricValue hallucination_rate(std::span<const HallucinationLabel> labels);

}  // namespace uqbench::metrics
