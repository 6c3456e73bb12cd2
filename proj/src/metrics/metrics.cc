#include "uqbench/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "uqbench/core/errors.h"

namespace uqbench::metrics {
namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (std::isnan(x)) throw DataError(std::string(what) + ": NaN score");
  }
}

}  // namespace

void to_json(Json& j, const MetricValue& m) {
  if (m.value) {
    j = *m.value;
  } else {
    j = Json{{"undefined", m.undefined_reason}};
  }
}

void from_json(const Json& j, MetricValue& m) {
  if (j.is_number()) {
    m = MetricValue::of(j.get<double>());
  } else {
    m = MetricValue::undefined(j.at("undefined").get<std::string>());
  }
}

MetricValue auroc(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) {
    return MetricValue::undefined("AUROC needs both classes");
  }
  check_finite(positive, "AUROC");
  check_finite(negative, "AUROC");
  // Rank-based count; equal to the pairwise definition, ties credited 0.5.
  std::vector<double> neg(negative.begin(), negative.end());
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : positive) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    wins += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return MetricValue::of(wins / (static_cast<double>(positive.size()) * negative.size()));
}

MetricValue best_f1(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("best_f1: scores and labels differ in length");
  }
  check_finite(scores, "best_f1");
  const auto total_pos = std::count_if(labels.begin(), labels.end(),
                                       [](int l) { return l != 0; });
  if (total_pos == 0) return MetricValue::undefined("no positive labels");

  // Sweep thresholds from high to low; at each distinct score every item
  // with score >= t is predicted positive. The final step is t = -inf.
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double best = 0.0;
  long tp = 0;
  long fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = scores[order[k]];
    while (k < order.size() && scores[order[k]] == t) {
      (labels[order[k]] != 0 ? tp : fp) += 1;
      ++k;
    }
    if (tp > 0) {
      // 2PR / (P + R) on counts, rounded once
      const double fn = static_cast<double>(total_pos - tp);
      best = std::max(best, 2.0 * tp / (2.0 * tp + fp + fn));
    }
  }
  return MetricValue::of(best);
}

MetricValue best_f1(std::span<const double> positive, std::span<const double> negative) {
  std::vector<double> scores(positive.begin(), positive.end());
  scores.insert(scores.end(), negative.begin(), negative.end());
  std::vector<int> labels(positive.size(), 1);
  labels.resize(scores.size(), 0);
  return best_f1(scores, labels);
}

MetricValue urr(std::span<const ScorePair> pairs) {
  if (pairs.empty()) return MetricValue::undefined("no score pairs");
  std::size_t up = 0;
  for (const auto& p : pairs) {
    if (std::isnan(p.u_clean) || std::isnan(p.u_pert)) {
      throw DataError("URR: NaN score");
    }
    if (p.u_pert > p.u_clean) ++up;
  }
  return MetricValue::of(static_cast<double>(up) / pairs.size());
}

MetricValue point_biserial(std::span<const double> delta, std::span<const int> h) {
  if (delta.size() != h.size()) throw DataError("HCC: length mismatch");
  check_finite(delta, "HCC");
  const double n = static_cast<double>(delta.size());
  if (delta.size() < 2) return MetricValue::undefined("fewer than 2 pairs");
  double sum1 = 0.0, sum0 = 0.0, n1 = 0.0, n0 = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    mean += delta[i];
    if (h[i] != 0) {
      sum1 += delta[i];
      n1 += 1;
    } else {
      sum0 += delta[i];
      n0 += 1;
    }
  }
  if (n1 == 0 || n0 == 0) return MetricValue::undefined("single-class labels");
  mean /= n;
  double var = 0.0;
  for (double d : delta) var += (d - mean) * (d - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0)) return MetricValue::undefined("zero variance in delta U");
  return MetricValue::of((sum1 / n1 - sum0 / n0) / sd * std::sqrt(n1 * n0 / (n * n)));
}

MetricValue hcc(std::span<const ScorePair> pairs,
                std::span<const HallucinationLabel> labels) {
  std::map<std::string, bool> h_of;
  for (const auto& l : labels) h_of[l.instance_id] = l.h();
  std::vector<double> delta;
  std::vector<int> h;
  for (const auto& p : pairs) {
    const auto it = h_of.find(p.instance_id);
    if (it == h_of.end()) continue;
    delta.push_back(p.delta());
    h.push_back(it->second ? 1 : 0);
  }
  return point_biserial(delta, h);
}

MetricValue hallucination_rate(std::span<const HallucinationLabel> labels) {
  if (labels.empty()) return MetricValue::undefined("no labels");
  const auto flips = std::count_if(labels.begin(), labels.end(),
                                   [](const auto& l) { return l.h(); });
  return MetricValue::of(100.0 * static_cast<double>(flips) / labels.size());
}

}  // namespace uqbench::metrics
