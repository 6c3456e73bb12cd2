#include <cmath>
#include <random>

#include "test_util.h"
#include "uqbench/metrics/metrics.h"

namespace uqbench::metrics {
namespace {

double brute_auroc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (pos.size() * neg.size());
}

double brute_best_f1(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> thresholds(s.begin(), s.end());
  thresholds.push_back(-INFINITY);
  double best = 0;
  for (double t : thresholds) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool pred = s[i] >= t;
      tp += pred && y[i];
      fp += pred && !y[i];
      fn += !pred && y[i];
    }
    if (tp == 0) continue;
    best = std::max(best, 2.0 * tp / (2.0 * tp + fp + fn));
  }
  return best;
}

double pearson(const std::vector<double>& x, const std::vector<int>& y) {
  const double n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Auroc, MatchesPairCounting) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pos(1 + gen() % 30), neg(1 + gen() % 30);
    // coarse values force ties
    for (auto& v : pos) v = static_cast<double>(gen() % 7);
    for (auto& v : neg) v = static_cast<double>(gen() % 7) - 0.5 * (gen() % 2);
    EXPECT_EQ(auroc(pos, neg).value, brute_auroc(pos, neg));
  }
  EXPECT_FALSE(auroc(std::vector<double>{}, std::vector<double>{1.0}).defined());
}

TEST(BestF1, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + gen() % 40;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % 10);
      y[i] = static_cast<int>(gen() % 2);
    }
    y[0] = 1;
    EXPECT_EQ(best_f1(s, y).value, brute_best_f1(s, y));
  }
  EXPECT_FALSE(best_f1(std::vector<double>{1.0}, std::vector<int>{0}).defined());
}

TEST(Hcc, EqualsPearsonOnBinaryLabels) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + gen() % 50;
    std::vector<ScorePair> pairs;
    std::vector<HallucinationLabel> labels;
    std::vector<double> d;
    std::vector<int> h;
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = std::to_string(i);
      pairs.push_back({id, nd(gen), nd(gen)});
      const bool hi = i < 2 ? i == 0 : gen() % 2;
      labels.push_back({id, true, !hi, LabelMode::kFlip});
      d.push_back(pairs.back().delta());
      h.push_back(hi);
    }
    EXPECT_NEAR(*hcc(pairs, labels).value, pearson(d, h), 1e-9);
  }
}

TEST(Hcc, UndefinedCases) {
  std::vector<ScorePair> p{{"a", 0, 1}, {"b", 0, 2}};
  std::vector<HallucinationLabel> same{{"a", true, false}, {"b", true, false}};
  EXPECT_FALSE(hcc(p, same).defined());
  std::vector<ScorePair> flat{{"a", 0, 1}, {"b", 0, 1}};
  std::vector<HallucinationLabel> mixed{{"a", true, false}, {"b", true, true}};
  EXPECT_FALSE(hcc(flat, mixed).defined());
  EXPECT_FALSE(hcc(p, std::vector<HallucinationLabel>{}).defined());
}

TEST(Urr, Fixtures) {
  std::vector<ScorePair> up{{"a", 0.1, 0.2}, {"b", 1.0, 3.0}};
  std::vector<ScorePair> tie{{"a", 0.5, 0.5}, {"b", 1.0, 1.0}};
  std::vector<ScorePair> mixed{{"a", 0.5, 0.4}, {"b", 1.0, 1.5}};
  EXPECT_EQ(urr(up).value, 1.0);
  EXPECT_EQ(urr(tie).value, 0.0);
  EXPECT_EQ(urr(mixed).value, 0.5);
  EXPECT_FALSE(urr(std::vector<ScorePair>{}).defined());
}

TEST(HallucinationRate, Modes) {
  std::vector<HallucinationLabel> l{{"a", true, false, LabelMode::kFlip},
                                    {"b", false, false, LabelMode::kFlip},
                                    {"c", true, true, LabelMode::kFlip},
                                    {"d", false, true, LabelMode::kFlip}};
  EXPECT_EQ(hallucination_rate(l).value, 25.0);
  for (auto& x : l) x.mode = LabelMode::kIncorrect;
  EXPECT_EQ(hallucination_rate(l).value, 50.0);
}

TEST(MetricValue, Json) {
  EXPECT_EQ(Json(MetricValue::of(0.5)), Json(0.5));
  EXPECT_EQ(Json(MetricValue::undefined("why")), (Json{{"undefined", "why"}}));
  EXPECT_EQ(Json(MetricValue::undefined("why")).get<MetricValue>(),
            MetricValue::undefined("why"));
}

}  // namespace
}  // namespace uqbench::metrics
