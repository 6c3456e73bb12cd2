#include <fstream>
#include <sstream>

#include "test_util.h"
#include "uqbench/backend/mock.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/runner/pipeline.h"
#include "uqbench/runner/report.h"

namespace uqbench::runner {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Copy of the e2e fixture without any previous output.
class E2e : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::copy_fixture("e2e", dir_.path());
    fs::remove_all(dir_ / "out");
  }
  Json config() const { return Json::parse(slurp(dir_ / "config.json")); }
  ExperimentConfig load(const Json& j) const {
    return ExperimentConfig::from_json(j, dir_.path());
  }
  fs::path out(const std::string& f) const { return dir_ / "out" / f; }

  testing::TempDir dir_;
};

TEST_F(E2e, ConfigRejectsUnknownKeysAndDuplicates) {
  auto j = config();
  j["sed"] = 1;
  EXPECT_THROW(load(j), ParameterError);
  j = config();
  j["perturbations"].push_back({{"kind", "blur"}, {"strength", 1}});
  EXPECT_THROW(load(j), ParameterError);
  j = config();
  j["perturbations"] = Json::array({{{"kind", "cutout"}, {"strength", 2}}});
  EXPECT_THROW(load(j), ParameterError);
}

TEST_F(E2e, StrengthResolutionOrder) {
  write(dir_ / "cal.json",
        R"({"revision": 1, "entries": [{"kind": "blur", "strength": 3, "decided_by": "t",
            "decided_at": "2026-01-01T00:00:00Z"}]})");
  auto j = config();
  j["calibration"] = "cal.json";
  j["perturbations"] = Json::parse(
      R"([{"kind": "blur"}, {"kind": "pixelate"}, {"kind": "typos", "strength": 0.5},
          {"kind": "inv"}])");
  const auto r = load(j).resolved_perturbations();
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].second, 3.0);   // calibration
  EXPECT_EQ(r[1].second, 5.0);   // operator default
  EXPECT_EQ(r[2].second, 0.5);   // explicit
  EXPECT_EQ(r[3].second, 0.0);   // discrete
  j["perturbations"][0]["strength"] = 7;
  EXPECT_EQ(load(j).resolved_perturbations()[0].second, 7.0);
}

TEST_F(E2e, MatchesGoldenAndReusesStages) {
  Experiment first(load(config()));
  const auto outcomes = first.run();
  EXPECT_EQ(exit_code_for(outcomes), 0);
  for (const auto& o : outcomes) EXPECT_FALSE(o.reused);
  const auto report = slurp(out("report.json"));
  EXPECT_EQ(report, slurp(testing::data_dir() / "../golden/e2e_report.json"));

  Experiment again(load(config()));
  for (const auto& o : again.run()) EXPECT_TRUE(o.reused) << stage_name(o.stage);
  EXPECT_EQ(slurp(out("report.json")), report);
}

TEST_F(E2e, ConfigChangeRerunsFromFirstAffectedStage) {
  Experiment(load(config())).run();
  auto j = config();
  j["estimators"] = {"MSP", "LUQ"};
  const auto outcomes = Experiment(load(j)).run();
  EXPECT_TRUE(outcomes[0].reused);
  EXPECT_FALSE(outcomes[1].reused);
  EXPECT_FALSE(outcomes[3].reused);
  const auto report = Json::parse(slurp(out("report.json")));
  EXPECT_EQ(report["results"].size(), 2u);

  j["seed"] = 8;
  EXPECT_FALSE(Experiment(load(j)).run()[0].reused);
}

TEST_F(E2e, StagesRunOneAtATime) {
  Experiment e(load(config()));
  e.perturb();
  EXPECT_TRUE(fs::exists(out("variants.jsonl")));
  EXPECT_FALSE(fs::exists(out("generations.jsonl")));
  Experiment(load(config())).infer();
  Experiment(load(config())).score();
  Experiment(load(config())).evaluate();
  EXPECT_EQ(slurp(out("report.json")),
            slurp(testing::data_dir() / "../golden/e2e_report.json"));
}

TEST_F(E2e, MissingImageIsRecordedAndExitsTwo) {
  fs::remove(dir_ / "images/img03.png");
  const auto outcomes = Experiment(load(config())).run();
  EXPECT_EQ(exit_code_for(outcomes), 2);
  const auto failures = read_jsonl<FailureRecord>(out("failures.perturb.jsonl"));
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_EQ(failures[0].instance_id, "e2e-03");
  const auto report = Json::parse(slurp(out("report.json")));
  EXPECT_EQ(report["results"]["MSP"]["blur"]["n_pairs"], 9);
}

TEST_F(E2e, AbortsWhenMostInstancesFail) {
  for (int i = 0; i < 6; ++i) fs::remove(dir_ / ("images/img0" + std::to_string(i) + ".png"));
  EXPECT_THROW(Experiment(load(config())).run(), AbortError);
}

TEST_F(E2e, CapabilityLimitedBackendGivesUnavailableCells) {
  auto mock = std::make_shared<backend::MockBackend>(Json{
      {"answers", {"red", "blue", "square"}},
      {"capabilities", Json(backend::BackendCapabilities{false, false, false, true})}});
  Services s;
  s.answer = mock;
  s.rewrite = mock;
  Experiment(load(config()), s).run();
  const auto report = Json::parse(slurp(out("report.json")));
  for (const char* e : {"MSP", "Perplexity", "MeanTokenEntropy", "PMI", "PTrue"}) {
    EXPECT_EQ(report["results"][e]["blur"]["status"], "unavailable") << e;
  }
  for (const char* e : {"SemanticEntropy", "LexSim", "DegMat", "LUQ"}) {
    EXPECT_EQ(report["results"][e]["blur"]["status"], "ok") << e;
  }
}

TEST_F(E2e, NullCrossRewriteIsSkippedNotFailed) {
  const auto key = backend::MockBackend::question_key("What color is the shape?");
  Json fixture = Json::parse(slurp(dir_ / "mock.json"));
  fixture["entries"][key]["rewrites"]["cross"] =
      R"({"analysis": "a", "AMB": null, "IVE": {"variant_question": "What is behind the camera?", "reason_unanswerable": "Out of Frame"}})";
  write(dir_ / "mock.json", fixture.dump());
  auto j = config();
  j["perturbations"] = Json::parse(R"([{"kind": "amb"}, {"kind": "ive"}])");
  const auto outcomes = Experiment(load(j)).run();
  EXPECT_EQ(exit_code_for(outcomes), 0);
  const auto skipped = read_jsonl<SkipRecord>(out("skipped.jsonl"));
  EXPECT_EQ(skipped.size(), 5u);
  for (const auto& s : skipped) EXPECT_EQ(s.kind, "amb");
  const auto variants = read_jsonl<VariantRecord>(out("variants.jsonl"));
  int ive = 0;
  for (const auto& v : variants) {
    if (v.spec && v.spec->kind == Kind::kIve) ++ive;
  }
  EXPECT_EQ(ive, 10);
}

TEST(Report, Heatmap) {
  const auto report = Json::parse(slurp(testing::data_dir() / "../golden/e2e_report.json"));
  const auto csv = emit_heatmap_data(report, "auroc");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "estimator,blur,typos");
  EXPECT_NE(csv.find("\nMSP,0.4,0.46"), std::string::npos) << csv;
  EXPECT_THROW(emit_heatmap_data(report, "accuracy"), ParameterError);
}

TEST(Labels, AnswerCorrect) {
  EXPECT_TRUE(answer_correct("Red.", {"red"}));
  EXPECT_TRUE(answer_correct("a red square", {"blue", "red square"}));
  EXPECT_FALSE(answer_correct("blue", {"red"}));
  EXPECT_FALSE(answer_correct("red", {}));
}

}  // namespace
}  // namespace uqbench::runner
