#include <fstream>
#include <set>

#include "../support/clevr_oracle.h"
#include "test_util.h"
#include "uqbench/core/errors.h"
#include "uqbench/datasets/clevr.h"
#include "uqbench/datasets/vizwiz.h"

namespace uqbench::datasets {
namespace {

using R = Reason;

DisagreementVector vec(std::initializer_list<std::pair<R, int>> counts) {
  DisagreementVector v;
  for (auto [r, c] : counts) v[r] = c;
  return v;
}

// Rules restated directly from the thresholds.
std::array<bool, 4> expected_rules(const DisagreementVector& v) {
  const int q_max = std::max({v[R::IVE], v[R::INV], v[R::DFF], v[R::AMB], v[R::SBJ],
                              v[R::SYN]});
  const bool cross = v[R::AMB] + v[R::IVE] >= 5;
  return {v[R::LQI] <= 1 && q_max <= 2, v[R::LQI] >= 4 && q_max <= 2,
          v[R::LQI] <= 1 && (v[R::INV] >= 3 || v[R::SBJ] >= 3) && !cross, cross};
}

TEST(Vizwiz, ExhaustiveDisjointness) {
  const std::array<R, 7> relevant = {R::LQI, R::IVE, R::INV, R::DFF,
                                     R::AMB, R::SBJ, R::SYN};
  std::array<int, 4> fired_total{};
  for (int code = 0; code < 6 * 6 * 6 * 6 * 6 * 6 * 6; ++code) {
    DisagreementVector v;
    int c = code;
    for (R r : relevant) {
      v[r] = c % 6;
      c /= 6;
    }
    const auto fired = vizwiz_rules(v);
    ASSERT_EQ(fired, expected_rules(v)) << code;
    ASSERT_LE(fired[0] + fired[1] + fired[2] + fired[3], 1) << code;
    for (int i = 0; i < 4; ++i) fired_total[i] += fired[i];
  }
  for (int n : fired_total) EXPECT_GT(n, 0);
}

TEST(Vizwiz, HandBuiltVectors) {
  using S = VizwizSubset;
  const std::vector<std::pair<DisagreementVector, std::optional<S>>> cases = {
      {vec({{R::LQI, 5}}), S::kVisual},
      {vec({{R::LQI, 4}, {R::AMB, 2}, {R::IVE, 2}}), S::kVisual},
      {vec({{R::INV, 3}}), S::kTextual},
      {vec({{R::LQI, 1}, {R::SBJ, 4}}), S::kTextual},
      {vec({{R::LQI, 1}}), S::kClean},
      {vec({}), S::kClean},
      {vec({{R::LQI, 5}, {R::INV, 3}}), std::nullopt},
      {vec({{R::AMB, 5}}), S::kCross},
      {vec({{R::AMB, 3}, {R::IVE, 2}}), S::kCross},
      {vec({{R::AMB, 3}, {R::IVE, 2}, {R::INV, 3}}), S::kCross},
      {vec({{R::LQI, 2}}), std::nullopt},
      {vec({{R::LQI, 3}, {R::DFF, 3}}), std::nullopt},
  };
  for (const auto& [v, want] : cases) EXPECT_EQ(classify_vizwiz(v), want);
}

TEST(Vizwiz, StrictRule) {
  const auto v = vec({{R::AMB, 3}, {R::IVE, 2}});
  EXPECT_EQ(classify_vizwiz(v, CrossRule::kStrict), std::nullopt);
  EXPECT_EQ(classify_vizwiz(vec({{R::IVE, 5}}), CrossRule::kStrict), VizwizSubset::kCross);
}

TEST(Vizwiz, CountOutOfRangeThrows) {
  EXPECT_THROW(classify_vizwiz(vec({{R::OTH, 6}})), DataError);
}

TEST(Vizwiz, RecordParsing) {
  const auto a = parse_vizwiz_record(Json::parse(
      R"({"id":"x","image":"x.jpg","question":"q?","answers":[{"answer":"a"},"b"],
          "annotations":[["LQI","LQI"],["LQI","AMB"],[]]})"));
  EXPECT_EQ(a.instance.reference_answers, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(a.reasons[R::LQI], 2);
  EXPECT_EQ(a.reasons[R::AMB], 1);
  const auto b = parse_vizwiz_record(
      Json::parse(R"({"image":"y.jpg","question":"q?","reason_counts":{"IVE":5}})"));
  EXPECT_EQ(b.instance.id, "y.jpg");
  EXPECT_EQ(b.reasons[R::IVE], 5);
  EXPECT_THROW(parse_vizwiz_record(Json::parse(
                   R"({"image":"y.jpg","question":"q?","reason_counts":{"XYZ":1}})")),
               DataError);
}

TEST(Vizwiz, BuildSubsetsFromFixture) {
  const auto build =
      build_subsets(read_vizwiz_annotations(testing::data_dir() / "vizwiz/annotations.jsonl"));
  EXPECT_EQ(build.counts, (std::array<int, 4>{1, 1, 1, 2}));
  EXPECT_EQ(build.unassigned, 1);
  for (const auto& i : build.instances) EXPECT_TRUE(i.subset_tag.has_value());
}

Json fixture_scenes() {
  std::ifstream in(testing::data_dir() / "clevr/scenes.json");
  return Json::parse(in);
}

TEST(Clevr, GeneratedAnswersMatchIndependentOracle) {
  const auto doc = fixture_scenes();
  std::map<std::string, testing::clevr::Scene> by_image;
  for (const auto& s : doc["scenes"]) {
    by_image[s["image_filename"].get<std::string>()] = testing::clevr::load_scene(s);
  }
  const auto qas = generate_clevr(parse_scenes(doc), 50, 1);
  ASSERT_EQ(qas.size(), 200u);
  std::map<QuestionType, int> per_type;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& qa : qas) {
    ++per_type[qa.question_type];
    EXPECT_TRUE(seen.insert({qa.image_id, qa.question}).second) << qa.question;
    const auto got = testing::clevr::answer(by_image.at(qa.image_id), qa.question);
    ASSERT_TRUE(got.value.has_value()) << qa.question;
    EXPECT_EQ(*got.value, qa.answer) << qa.image_id << ": " << qa.question;
    EXPECT_EQ(got.type, question_type_name(qa.question_type)) << qa.question;
  }
  for (auto t : kQuestionTypes) EXPECT_EQ(per_type[t], 50);
}

TEST(Clevr, Deterministic) {
  const auto scenes = parse_scenes(fixture_scenes());
  const auto a = generate_clevr(scenes, 20, 9);
  const auto b = generate_clevr(scenes, 20, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].question, b[i].question);
    EXPECT_EQ(a[i].answer, b[i].answer);
  }
  const auto c = generate_clevr(scenes, 20, 10);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].question != c[i].question;
  EXPECT_TRUE(differs);
}

TEST(Clevr, OracleExamples) {
  const auto scene = parse_scene(Json::parse(R"({
    "image_filename": "s.png",
    "objects": [
      {"size":"small","color":"red","material":"rubber","shape":"cube","pixel_coords":[10,50,1]},
      {"size":"large","color":"blue","material":"metal","shape":"sphere","pixel_coords":[90,40,1]},
      {"size":"large","color":"blue","material":"rubber","shape":"cube","pixel_coords":[50,90,1]}
    ]})"));
  QuestionElements e;
  e.type = QuestionType::kExistence;
  e.target.values[static_cast<int>(Attribute::kColor)] = "red";
  e.target.values[static_cast<int>(Attribute::kShape)] = "cube";
  EXPECT_EQ(render_question(e), "Is there a red cube?");
  EXPECT_EQ(oracle_answer(scene, e), "yes");
  e.target.values[static_cast<int>(Attribute::kColor)] = "green";
  EXPECT_EQ(oracle_answer(scene, e), "no");

  QuestionElements count;
  count.type = QuestionType::kCounting;
  count.target.values[static_cast<int>(Attribute::kSize)] = "large";
  EXPECT_EQ(oracle_answer(scene, count), "2");
  count.target.values[static_cast<int>(Attribute::kColor)] = "cyan";
  EXPECT_EQ(oracle_answer(scene, count), "0");

  QuestionElements attr;
  attr.type = QuestionType::kAttribute;
  attr.queried = Attribute::kColor;
  attr.target.values[static_cast<int>(Attribute::kSize)] = "small";
  EXPECT_EQ(oracle_answer(scene, attr), "red");
  attr.target = {};
  attr.target.values[static_cast<int>(Attribute::kShape)] = "cube";
  EXPECT_EQ(oracle_answer(scene, attr), std::nullopt);  // two cubes

  QuestionElements rel;
  rel.type = QuestionType::kRelation;
  rel.target = Description::full(scene.objects[0]);
  rel.anchor = Description::full(scene.objects[1]);
  rel.direction = Direction::kLeft;
  EXPECT_EQ(oracle_answer(scene, rel), "yes");
  rel.direction = Direction::kFront;
  EXPECT_EQ(oracle_answer(scene, rel), "yes");
  rel.direction = Direction::kBehind;
  EXPECT_EQ(oracle_answer(scene, rel), "no");
  // derived relations agree with pixel coordinates
  EXPECT_TRUE(scene.is(2, Direction::kFront, 0));
  EXPECT_TRUE(scene.is(1, Direction::kRight, 2));
}

TEST(Clevr, NonInverseRelationsRejected) {
  EXPECT_THROW(parse_scene(Json::parse(R"({
    "image_filename": "s.png",
    "objects": [
      {"size":"small","color":"red","material":"rubber","shape":"cube"},
      {"size":"large","color":"blue","material":"metal","shape":"sphere"}],
    "relationships": {"left": [[1], []], "right": [[], []], "front": [[], []],
                      "behind": [[], []]}})")),
               DataError);
}

TEST(Clevr, StallReportsDeficits) {
  // One object: no relation question has a second referent.
  const auto scenes = parse_scenes(Json::parse(R"([{
    "image_filename": "one.png",
    "objects": [{"size":"small","color":"red","material":"rubber","shape":"cube",
                 "pixel_coords":[1,1,1]}]}])"));
  try {
    generate_clevr(scenes, 2, 1, 50);
    FAIL() << "expected GenerationIncompleteError";
  } catch (const GenerationIncompleteError& e) {
    EXPECT_EQ(e.deficits().at("relation"), 2);
  }
}

TEST(Clevr, ToInstances) {
  const auto inst = to_instances({{"a.png", "Is there a cube?", "yes", QuestionType::kExistence}});
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst[0].id, "clevr-existence-0");
  EXPECT_EQ(inst[0].reference_answers, std::vector<std::string>{"yes"});
  EXPECT_EQ(inst[0].question_type, "existence");
}

}  // namespace
}  // namespace uqbench::datasets
