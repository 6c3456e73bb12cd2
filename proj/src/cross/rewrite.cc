#include "uqbench/cross/rewrite.h"

#include <algorithm>
#include <set>

#include "uqbench/core/errors.h"
#include "uqbench/core/prompts.h"

namespace uqbench::cross {
namespace {

std::string strip_fence(const std::string& text) {
  auto a = text.find_first_not_of(" \t\r\n");
  auto b = text.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::string s = text.substr(a, b - a + 1);
  if (s.rfind("```", 0) == 0 && s.size() >= 6 && s.ends_with("```")) {
    const auto nl = s.find('\n');
    if (nl == std::string::npos) return s;
    s = s.substr(nl + 1, s.size() - 3 - (nl + 1));
  }
  return s;
}

std::string required_string(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_string() ||
      obj.at(key).get<std::string>().empty()) {
    throw DataError(std::string("missing or empty string field ") + key);
  }
  return obj.at(key).get<std::string>();
}

void exact_keys(const Json& obj, std::set<std::string> keys,
                const std::string& where) {
  if (!obj.is_object()) throw DataError(where + " is not an object");
  std::set<std::string> got;
  for (const auto& [k, v] : obj.items()) got.insert(k);
  if (got != keys) throw DataError(where + " does not have exactly the schema keys");
}

}  // namespace

void to_json(Json& j, const CrossRewriteResult& r) {
  j = Json{{"analysis", r.analysis}, {"AMB", nullptr}, {"IVE", nullptr}};
  if (r.amb) {
    j["AMB"] = {{"variant_question", r.amb->variant_question},
                {"plausible_answers", r.amb->plausible_answers}};
  }
  if (r.ive) {
    j["IVE"] = {{"variant_question", r.ive->variant_question},
                {"reason_unanswerable", r.ive->reason_unanswerable}};
  }
}

CrossRewriteResult parse_cross_rewrite(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(strip_fence(text));
  } catch (const Json::exception& e) {
    throw DataError(std::string("not JSON: ") + e.what());
  }
  exact_keys(doc, {"analysis", "AMB", "IVE"}, "response");
  CrossRewriteResult r;
  if (!doc.at("analysis").is_string()) throw DataError("analysis is not a string");
  r.analysis = doc.at("analysis").get<std::string>();

  if (const auto& amb = doc.at("AMB"); !amb.is_null()) {
    exact_keys(amb, {"variant_question", "plausible_answers"}, "AMB");
    AmbVariant v;
    v.variant_question = required_string(amb, "variant_question");
    const auto& answers = amb.at("plausible_answers");
    if (!answers.is_array()) throw DataError("plausible_answers is not a list");
    std::set<std::string> distinct;
    for (const auto& a : answers) {
      if (!a.is_string()) throw DataError("plausible answer is not a string");
      v.plausible_answers.push_back(a.get<std::string>());
      distinct.insert(a.get<std::string>());
    }
    if (distinct.size() < 2) {
      throw DataError("AMB needs at least two distinct plausible answers");
    }
    r.amb = std::move(v);
  }
  if (const auto& ive = doc.at("IVE"); !ive.is_null()) {
    exact_keys(ive, {"variant_question", "reason_unanswerable"}, "IVE");
    IveVariant v;
    v.variant_question = required_string(ive, "variant_question");
    v.reason_unanswerable = required_string(ive, "reason_unanswerable");
    if (std::find(kIveReasons.begin(), kIveReasons.end(),
                  v.reason_unanswerable) == kIveReasons.end()) {
      throw SchemaError("illegal reason_unanswerable: " + v.reason_unanswerable,
                        text);
    }
    r.ive = std::move(v);
  }
  return r;
}

CrossRewriteResult rewrite_cross(const std::string& question,
                                 const std::vector<std::uint8_t>& image,
                                 backend::Backend& llm,
                                 const CrossRewriteOptions& options) {
  if (!llm.capabilities().image_input) {
    throw CapabilityError("AMB/IVE rewriting needs an image-capable backend");
  }
  backend::ChatRequest req;
  req.messages = {{"system", std::string(amb_ive_prompt()), std::nullopt},
                  {"user", "Base Question: " + question, image}};
  req.temperature = options.temperature;
  req.max_tokens = 512;
  req.purpose = backend::RequestPurpose::kRewrite;
  req.subject = question;

  std::string last;
  bool last_was_schema = false;
  std::string last_error;
  const int attempts = 1 + std::max(0, options.max_retries);
  for (int i = 0; i < attempts; ++i) {
    last = llm.complete(req).text;
    try {
      return parse_cross_rewrite(last);
    } catch (const SchemaError& e) {
      last_was_schema = true;
      last_error = e.what();
    } catch (const DataError& e) {
      last_was_schema = false;
      last_error = e.what();
    }
  }
  if (last_was_schema) throw SchemaError(last_error, last);
  throw RewriteFailedError("AMB/IVE rewrite failed " + std::to_string(attempts) +
                               " times: " + last_error,
                           last);
}

}  // namespace uqbench::cross
