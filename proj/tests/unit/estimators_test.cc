#include <cmath>
#include <numeric>
#include <random>

#include "test_util.h"
#include "uqbench/estimators/estimators.h"

namespace uqbench::estimators {
namespace {

// Entailment from an explicit equivalence labelling: same label -> 1.
class LabelProvider : public SimilarityProvider {
 public:
  explicit LabelProvider(std::map<std::string, int> labels) : labels_(std::move(labels)) {}
  std::string id() const override { return "labels"; }
  double entail(const std::string& a, const std::string& b) override {
    return labels_.at(a) == labels_.at(b) ? 1.0 : 0.0;
  }

 private:
  std::map<std::string, int> labels_;
};

class ConstProvider : public SimilarityProvider {
 public:
  explicit ConstProvider(double v) : v_(v) {}
  std::string id() const override { return "const"; }
  double entail(const std::string&, const std::string&) override { return v_; }

 private:
  double v_;
};

TEST(TokenEstimators, AnalyticValues) {
  const std::vector<double> one{0.0};
  EXPECT_EQ(msp(one), 0.0);
  const std::vector<double> halves{-std::log(2.0), -std::log(2.0)};
  EXPECT_NEAR(perplexity(halves), std::log(2.0), 1e-12);
  EXPECT_NEAR(msp(halves), 2 * std::log(2.0), 1e-12);
  for (int v : {2, 10, 32000}) {
    const std::vector<double> h(5, std::log(static_cast<double>(v)));
    EXPECT_NEAR(mean_token_entropy(h), std::log(static_cast<double>(v)), 1e-9);
  }
  const std::vector<double> c{-0.3, -1.2}, u{-0.3, -1.2};
  EXPECT_EQ(pmi(c, u), 0.0);
  const std::vector<double> u2{-1.3, -2.2};
  EXPECT_NEAR(pmi(c, u2), -1.0, 1e-12);
  EXPECT_NEAR(ptrue(0.5).score, std::log(2.0), 1e-15);
  EXPECT_TRUE(ptrue(0.0).clamped);
  EXPECT_NEAR(ptrue(0.0).score, -std::log(kPTrueFloor), 1e-9);
  EXPECT_EQ(ptrue(1.0).score, 0.0);
}

TEST(TokenEstimators, RejectMalformedInput) {
  EXPECT_THROW(msp({}), DataError);
  const std::vector<double> nan{std::nan("")};
  EXPECT_THROW(perplexity(nan), DataError);
  const std::vector<double> a{-1.0}, b{-1.0, -2.0};
  EXPECT_THROW(pmi(a, b), DataError);
}

TEST(SemanticEntropy, AnalyticValues) {
  ExactMatchProvider exact;
  const std::vector<std::string> same(10, "red");
  const std::vector<std::optional<std::vector<double>>> none(10);
  EXPECT_EQ(semantic_entropy(same, none, exact).score, 0.0);
  std::vector<std::string> split(5, "red");
  split.resize(10, "blue");
  const auto r = semantic_entropy(split, none, exact);
  EXPECT_NEAR(r.score, std::log(2.0), 1e-12);
  EXPECT_EQ(r.mode, SeMode::kFrequency);
  // equal likelihoods give the same answer in likelihood mode
  const std::vector<std::optional<std::vector<double>>> lp(10, std::vector<double>{-0.5});
  const auto l = semantic_entropy(split, lp, exact);
  EXPECT_EQ(l.mode, SeMode::kLikelihood);
  EXPECT_NEAR(l.score, std::log(2.0), 1e-12);
}

TEST(SemanticEntropy, PermutationInvariant) {
  std::mt19937 gen(11);
  std::map<std::string, int> labels;
  std::vector<std::string> texts;
  for (int i = 0; i < 12; ++i) {
    texts.push_back("t" + std::to_string(i));
    labels[texts.back()] = static_cast<int>(gen() % 4);
  }
  LabelProvider p(labels);
  std::vector<std::optional<std::vector<double>>> lps;
  for (int i = 0; i < 12; ++i) lps.push_back(std::vector<double>{-(gen() % 100) / 37.0});
  const double base = semantic_entropy(texts, lps, p).score;
  std::vector<int> idx(12);
  std::iota(idx.begin(), idx.end(), 0);
  for (int trial = 0; trial < 30; ++trial) {
    std::shuffle(idx.begin(), idx.end(), gen);
    std::vector<std::string> t;
    std::vector<std::optional<std::vector<double>>> l;
    for (int i : idx) {
      t.push_back(texts[i]);
      l.push_back(lps[i]);
    }
    EXPECT_NEAR(semantic_entropy(t, l, p).score, base, 1e-12);
  }
}

TEST(SemanticEntropy, ClustersAreTransitive) {
  // a~b and b~c chain into one cluster even though a and c never entail
  class Chain : public SimilarityProvider {
   public:
    std::string id() const override { return "chain"; }
    double entail(const std::string& x, const std::string& y) override {
      return std::abs(x[0] - y[0]) <= 1 ? 1.0 : 0.0;
    }
  } chain;
  const std::vector<std::optional<std::vector<double>>> none(3);
  const auto r = semantic_entropy({"a", "b", "c"}, none, chain);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.cluster_of, (std::vector<int>{0, 0, 0}));
}

TEST(LexSim, Values) {
  EXPECT_EQ(lexical_similarity({"a red cube", "a red cube", "a red cube"}), -1.0);
  EXPECT_NEAR(rouge_l("a b c", "a c"), 0.8, 1e-12);
  EXPECT_EQ(rouge_l("", "x"), 0.0);
  EXPECT_EQ(rouge_l("The cat", "the CAT!"), 1.0);
  EXPECT_NEAR(lexical_similarity({"a b c", "a c"}), -0.8, 1e-12);
  EXPECT_THROW(lexical_similarity({"x"}), DataError);
}

TEST(DegMat, Values) {
  SimilarityMatrix ones;
  ones.values.assign(10, std::vector<double>(10, 1.0));
  EXPECT_EQ(degmat(ones), 0.0);
  SimilarityMatrix eye;
  eye.values.assign(10, std::vector<double>(10, 0.0));
  for (int i = 0; i < 10; ++i) eye.values[i][i] = 1.0;
  EXPECT_NEAR(degmat(eye), 0.9, 1e-12);
}

TEST(DegMat, SymmetrizedMatrix) {
  class Directed : public SimilarityProvider {
   public:
    std::string id() const override { return "dir"; }
    double entail(const std::string& a, const std::string& b) override {
      return a < b ? 1.0 : 0.0;
    }
  } p;
  const auto w = symmetrized(build_similarity_matrix({"a", "b"}, p));
  EXPECT_EQ(w.values[0][1], 0.5);
  EXPECT_EQ(w.values[1][0], 0.5);
  EXPECT_EQ(w.values[0][0], 1.0);
}

TEST(Luq, Values) {
  ConstProvider all(1.0), none(0.0), half(0.5);
  const std::vector<std::string> t{"It is red. It is big.", "Red.", "A red one?"};
  EXPECT_EQ(luq(t, all), 0.0);
  EXPECT_EQ(luq(t, none), 1.0);
  EXPECT_NEAR(luq(t, half), 0.5, 1e-12);
  EXPECT_EQ(split_sentences("It is red. It is big."),
            (std::vector<std::string>{"It is red.", "It is big."}));
  EXPECT_EQ(split_sentences("3.5 apples"), (std::vector<std::string>{"3.5 apples"}));
}

TEST(Luq, PremiseIsTheOtherSample) {
  std::vector<std::pair<std::string, std::string>> calls;
  class Recorder : public SimilarityProvider {
   public:
    explicit Recorder(std::vector<std::pair<std::string, std::string>>& c) : c_(c) {}
    std::string id() const override { return "rec"; }
    double entail(const std::string& p, const std::string& h) override {
      c_.emplace_back(p, h);
      return 1.0;
    }

   private:
    std::vector<std::pair<std::string, std::string>>& c_;
  } rec(calls);
  luq({"A. B.", "C."}, rec);
  EXPECT_EQ(calls, (std::vector<std::pair<std::string, std::string>>{
                       {"C.", "A."}, {"C.", "B."}, {"A. B.", "C."}}));
}

GenerationRecord gen(std::string text, std::optional<std::vector<double>> lp = std::nullopt) {
  GenerationRecord g;
  g.text = std::move(text);
  g.token_logprobs = std::move(lp);
  return g;
}

TEST(Estimate, UnavailableReasons) {
  ExactMatchProvider p;
  EstimatorInputs in{"i", "v", gen("red"), {}, std::nullopt};
  for (auto e : {Estimator::kMsp, Estimator::kPmi, Estimator::kPTrue,
                 Estimator::kMeanTokenEntropy, Estimator::kSemanticEntropy}) {
    const auto r = estimate(e, in, p);
    EXPECT_EQ(r.status, ScoreStatus::kUnavailable) << estimator_name(e);
    EXPECT_FALSE(r.score.has_value());
    EXPECT_FALSE(r.meta.at("reason").empty());
  }
}

TEST(Estimate, FillsScoresAndMeta) {
  ExactMatchProvider p;
  EstimatorInputs in{"i", "v", gen("red", std::vector<double>{-0.5, -0.5}),
                     {gen("red"), gen("red"), gen("blue"), gen("blue")}, 0.25};
  EXPECT_DOUBLE_EQ(*estimate(Estimator::kMsp, in, p).score, 1.0);
  EXPECT_DOUBLE_EQ(*estimate(Estimator::kPerplexity, in, p).score, 0.5);
  EXPECT_NEAR(*estimate(Estimator::kPTrue, in, p).score, std::log(4.0), 1e-15);
  const auto se = estimate(Estimator::kSemanticEntropy, in, p);
  EXPECT_NEAR(*se.score, std::log(2.0), 1e-12);
  EXPECT_EQ(se.meta.at("se_mode"), "frequency");
  EXPECT_EQ(se.meta.at("clusters"), "2");
  const auto clamped = estimate(Estimator::kPTrue, EstimatorInputs{"i", "v", {}, {}, 0.0}, p);
  EXPECT_EQ(clamped.meta.at("clamped"), "1");
}

TEST(Similarity, TableProvider) {
  Json fixture{{"default", 0.2},
               {"entries", {{{"premise", "a"}, {"hypothesis", "b"}, {"p_entail", 0.9}}}},
               {"digests", {{TableEntailmentProvider::key("c", "d"), 0.7}}}};
  TableEntailmentProvider t(fixture);
  EXPECT_EQ(t.entail("a", "b"), 0.9);
  EXPECT_EQ(t.entail("b", "a"), 0.2);
  EXPECT_EQ(t.entail("c", "d"), 0.7);
  EXPECT_EQ(t.entail("z", "z"), 1.0);
  CachingProvider cached(std::make_unique<TableEntailmentProvider>(fixture));
  EXPECT_EQ(cached.entail("a", "b"), 0.9);
  EXPECT_EQ(cached.id(), "table");
  EXPECT_THROW(make_similarity_provider(Json{{"kind", "nli"}}), ParameterError);
}

}  // namespace
}  // namespace uqbench::estimators
