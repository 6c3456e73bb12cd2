#include <gtest/gtest.h>
#include <httplib.h>

#include <cmath>
#include <thread>

#include "../unit/test_util.h"
#include "uqbench/backend/openai.h"
#include "uqbench/calib/service.h"
#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"
#include "uqbench/cross/mask_provider.h"
#include "uqbench/estimators/similarity.h"

namespace uqbench {
namespace {

// httplib server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() = default;
  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

TEST(OpenAiHttp, ChatAndPriorScoring) {
  LocalServer s;
  Json last_chat;
  s.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    last_chat = Json::parse(req.body);
    EXPECT_EQ(req.get_header_value("Authorization"), "Bearer k");
    res.set_content(R"({"choices":[{"message":{"content":"red"},"finish_reason":"stop",
                       "logprobs":{"content":[{"token":"red","logprob":-0.25,"top_logprobs":[]}]}}]})",
                    "application/json");
  });
  s.server.Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = Json::parse(req.body);
    EXPECT_TRUE(body["echo"].get<bool>());
    const auto prompt = body["prompt"].get<std::string>();
    // one token per character; the first has no logprob
    Json lps = Json::array({nullptr});
    for (std::size_t i = 1; i < prompt.size(); ++i) lps.push_back(-0.5 * static_cast<double>(i));
    res.set_content(Json{{"choices", {{{"logprobs", {{"token_logprobs", lps}}}}}}}.dump(),
                    "application/json");
  });
  s.start();

  backend::OpenAiConfig cfg;
  cfg.base_url = s.url() + "/v1";
  cfg.api_key = "k";
  cfg.model = "test-model";
  cfg.capabilities = {true, false, true, true};
  backend::OpenAiBackend b(cfg);
  backend::ChatRequest r;
  r.messages = {{"user", "What color?", std::nullopt}};
  r.logprobs = true;
  const auto resp = b.complete(r);
  EXPECT_EQ(resp.text, "red");
  ASSERT_TRUE(resp.tokens.has_value());
  EXPECT_EQ((*resp.tokens)[0].logprob, -0.25);
  EXPECT_EQ(last_chat["model"], "test-model");

  // prefix "\n" is one token and is dropped
  EXPECT_EQ(b.score_prior("ab"), (std::vector<double>{-0.5, -1.0}));
}

TEST(OpenAiHttp, RateLimitIsRetryable) {
  LocalServer s;
  s.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
    res.set_content("{}", "application/json");
  });
  s.server.Post("/v1/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content("{}", "application/json");
  });
  s.start();
  backend::OpenAiConfig cfg;
  cfg.base_url = s.url() + "/v1";
  cfg.model = "m";
  EXPECT_THROW(backend::OpenAiBackend(cfg).complete({}), TransportError);
  cfg.base_url = s.url() + "/v1/bad";
  try {
    backend::OpenAiBackend(cfg).complete({});
    FAIL();
  } catch (const TransportError&) {
    FAIL() << "401 is not retryable";
  } catch (const Error&) {
  }
  cfg.base_url = "http://127.0.0.1:1";
  EXPECT_THROW(backend::OpenAiBackend(cfg).complete({}), TransportError);
}

TEST(ProvidersHttp, EntailmentAndRelevance) {
  LocalServer s;
  s.server.Post("/entail", [](const httplib::Request& req, httplib::Response& res) {
    const auto b = Json::parse(req.body);
    const double p = b["premise"] == b["hypothesis"] ? 0.9 : 0.1;
    res.set_content(Json{{"p_entail", p}}.dump(), "application/json");
  });
  s.server.Post("/relevance", [](const httplib::Request& req, httplib::Response& res) {
    const auto b = Json::parse(req.body);
    EXPECT_EQ(base64_decode(b["image"].get<std::string>()), (std::vector<std::uint8_t>{1, 2, 3}));
    res.set_content(R"({"width": 2, "height": 1, "values": [0.25, 0.75]})", "application/json");
  });
  s.start();
  estimators::HttpEntailmentProvider e(s.url() + "/entail");
  EXPECT_EQ(e.entail("a", "a"), 0.9);
  EXPECT_EQ(e.entail("a", "b"), 0.1);
  cross::HttpMaskProvider m(s.url() + "/relevance");
  const std::vector<std::uint8_t> bytes{1, 2, 3};
  const auto g = m.relevance("x", "x.png", bytes, "q");
  EXPECT_EQ(g.width, 2);
  EXPECT_EQ(g.values, (std::vector<double>{0.25, 0.75}));
}

TEST(CalibHttp, Endpoints) {
  testing::TempDir dir;
  testing::copy_fixture("identity", dir.path());
  calib::ServiceOptions o;
  o.datasets["identity"] = dir / "instances.jsonl";
  o.calibration = dir / "calibration.json";
  calib::CalibService service(o);
  LocalServer s;
  calib::mount(s.server, service);
  s.start();

  httplib::Client c(s.url());
  auto r = c.Get("/api/datasets");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(Json::parse(r->body)[0]["size"], 20);

  r = c.Get("/api/samples?dataset=identity&n=3&seed=4");
  ASSERT_TRUE(r);
  EXPECT_EQ(Json::parse(r->body)["items"].size(), 3u);

  r = c.Post("/api/preview", R"({"kind":"sbj","strength":0,"instance_ids":["id-00"]})",
             "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(Json::parse(r->body)["reason"], "discrete perturbation types");

  r = c.Post("/api/preview", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);

  r = c.Post("/api/preview", R"({"kind":"blur","strength":2,"instance_ids":["id-01"]})",
             "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_TRUE(Json::parse(r->body)[0].contains("image_b64"));

  r = c.Put("/api/calibration", R"({"entries":[{"kind":"solarize","strength":1,"decided_by":"x"}]})",
            "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  r = c.Get("/api/calibration");
  ASSERT_TRUE(r);
  EXPECT_EQ(Json::parse(r->body)["entries"][0]["kind"], "solarize");

  r = c.Put("/api/calibration", R"([{"kind":"solarize","strength":3,"decided_by":"x"}])",
            "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 422);
}

}  // namespace
}  // namespace uqbench
