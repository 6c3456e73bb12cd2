#include <set>

#include "test_util.h"
#include "uqbench/calib/service.h"
#include "uqbench/core/digest.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/runner/pipeline.h"
#include "uqbench/visual/raster.h"

namespace uqbench::calib {
namespace {

namespace fs = std::filesystem;

class Calib : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::copy_fixture("identity", dir_.path());
    ServiceOptions o;
    o.datasets["identity"] = dir_ / "instances.jsonl";
    o.calibration = dir_ / "calibration.json";
    service_ = std::make_unique<CalibService>(o);
  }
  Json preview(const std::string& kind, double strength, std::vector<std::string> ids,
               int seed = 0) {
    auto r = service_->preview(
        Json{{"kind", kind}, {"strength", strength}, {"instance_ids", ids}, {"seed", seed}});
    EXPECT_EQ(r.status, 200) << r.body.dump();
    return r.body;
  }

  testing::TempDir dir_;
  std::unique_ptr<CalibService> service_;
};

TEST(SampleIndices, DistinctDeterministicClamped) {
  const auto a = sample_indices(100, 30, 5);
  EXPECT_EQ(a, sample_indices(100, 30, 5));
  EXPECT_NE(a, sample_indices(100, 30, 6));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 30u);
  for (auto i : a) EXPECT_LT(i, 100u);
  EXPECT_EQ(sample_indices(4, 10, 1).size(), 4u);
}

TEST_F(Calib, DatasetsAndSamples) {
  EXPECT_EQ(service_->datasets().body[0]["name"], "identity");
  const auto r = service_->samples("identity", "5", "2");
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["items"].size(), 5u);
  const auto thumb = visual::decode_image(
      base64_decode(r.body["items"][0]["thumbnail_b64"].get<std::string>()));
  EXPECT_LE(std::max(thumb.width, thumb.height), kThumbnailSide);
  EXPECT_FALSE(r.body.contains("warning"));

  const auto all = service_->samples("identity", "500", "2");
  EXPECT_EQ(all.body["n"], 20);
  EXPECT_TRUE(all.body.contains("warning"));
  EXPECT_EQ(service_->samples("nope", "5", "").status, 404);
  EXPECT_EQ(service_->samples("identity", "x", "").status, 400);
}

TEST_F(Calib, PreviewErrors) {
  auto r = service_->preview(Json{{"kind", "inv"}, {"strength", 0}, {"instance_ids", {"id-00"}}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body["reason"], "discrete perturbation types");
  r = service_->preview(Json{{"kind", "cutout"}, {"strength", 1.5}, {"instance_ids", {"id-00"}}});
  EXPECT_EQ(r.status, 422);
  EXPECT_TRUE(r.body.contains("range"));
  r = service_->preview(Json{{"kind", "blur"}, {"strength", 1}, {"instance_ids", {"zz"}}});
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(service_->preview(Json::array()).status, 400);
}

TEST_F(Calib, IdentityStrengthReturnsOriginalPixels) {
  const auto body = preview("salt_pepper", 0.0, {"id-03"});
  const auto img = visual::decode_image(base64_decode(body[0]["image_b64"].get<std::string>()));
  EXPECT_EQ(img, visual::read_image(dir_ / "id-03.png"));
  EXPECT_EQ(preview("typos", 0.0, {"id-03"})[0]["text"],
            "What does the label say?");
}

TEST_F(Calib, PreviewMatchesPipelineBytes) {
  Json cfg{{"dataset", "instances.jsonl"},
           {"seed", 11},
           {"perturbations",
            Json::parse(R"([{"kind": "attention_mask", "strength": 0.6},
                            {"kind": "gaussian_noise", "strength": 30},
                            {"kind": "dropwords", "strength": 0.4}])")}};
  runner::Experiment e(runner::ExperimentConfig::from_json(cfg, dir_.path()));
  e.perturb();
  const auto variants = read_jsonl<VariantRecord>(dir_ / "out/variants.jsonl");
  int checked = 0;
  for (const auto& v : variants) {
    if (!v.spec) continue;
    const auto kind = std::string(kind_name(v.spec->kind));
    const auto item = preview(kind, v.spec->strength, {v.instance_id}, 11)[0];
    if (item.contains("text")) {
      EXPECT_EQ(item["text"], v.question) << v.variant_id;
    } else {
      EXPECT_EQ(base64_decode(item["image_b64"].get<std::string>()),
                visual::read_bytes(e.image_path(v.image_ref)))
          << v.variant_id;
    }
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

TEST_F(Calib, CalibrationRoundTrip) {
  auto r = service_->put_calibration(Json::parse(
      R"([{"kind": "blur", "strength": 4, "decided_by": "ann"},
          {"kind": "pixelate", "strength": 6, "decided_by": "ann"}])"));
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["revision"], 1);
  const auto got = service_->get_calibration().body;
  EXPECT_EQ(got, r.body);
  EXPECT_EQ(load_calibration(dir_ / "calibration.json").strengths().at(Kind::kBlur), 4.0);

  r = service_->put_calibration(
      Json::parse(R"({"entries": [{"kind": "cutout", "strength": 2, "decided_by": "ann"}]})"));
  EXPECT_EQ(r.status, 422);
  EXPECT_TRUE(r.body.contains("range"));
  EXPECT_EQ(service_->get_calibration().body["revision"], 1);
}

}  // namespace
}  // namespace uqbench::calib
