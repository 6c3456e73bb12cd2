#include "uqbench/datasets/vizwiz.h"

#include <algorithm>

#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"

namespace uqbench::datasets {
namespace {

constexpr std::array<std::string_view, kNumReasons> kReasonNames = {
    "LQI", "IVE", "INV", "DFF", "AMB", "SBJ", "SYN", "GRN", "SPM", "OTH"};

constexpr std::array<Reason, 6> kQuestionReasons = {
    Reason::IVE, Reason::INV, Reason::DFF, Reason::AMB, Reason::SBJ, Reason::SYN};

bool question_reasons_at_most(const DisagreementVector& v, int cap) {
  return std::all_of(kQuestionReasons.begin(), kQuestionReasons.end(),
                     [&](Reason r) { return v[r] <= cap; });
}

bool cross_fires(const DisagreementVector& v, CrossRule rule) {
  if (rule == CrossRule::kCoverage) {
    return v[Reason::AMB] + v[Reason::IVE] >= kAnnotators;
  }
  return std::max(v[Reason::AMB], v[Reason::IVE]) == kAnnotators;
}

}  // namespace

std::string_view reason_name(Reason r) {
  return kReasonNames[static_cast<std::size_t>(r)];
}

std::optional<Reason> parse_reason(std::string_view name) {
  for (std::size_t i = 0; i < kNumReasons; ++i) {
    if (kReasonNames[i] == name) return static_cast<Reason>(i);
  }
  return std::nullopt;
}

void DisagreementVector::validate() const {
  for (std::size_t i = 0; i < kNumReasons; ++i) {
    if (counts[i] < 0 || counts[i] > kAnnotators) {
      throw DataError(std::string(kReasonNames[i]) + " count " +
                      std::to_string(counts[i]) + " outside [0, 5]");
    }
  }
}

std::string_view subset_name(VizwizSubset s) {
  switch (s) {
    case VizwizSubset::kClean: return "clean";
    case VizwizSubset::kVisual: return "visual";
    case VizwizSubset::kTextual: return "textual";
    case VizwizSubset::kCross: return "cross";
  }
  return "?";
}

SubsetTag to_subset_tag(VizwizSubset s) {
  switch (s) {
    case VizwizSubset::kClean: return SubsetTag::kClean;
    case VizwizSubset::kVisual: return SubsetTag::kImage;
    case VizwizSubset::kTextual: return SubsetTag::kText;
    case VizwizSubset::kCross: return SubsetTag::kCross;
  }
  return SubsetTag::kClean;
}

std::optional<CrossRule> parse_cross_rule(std::string_view name) {
  if (name == "coverage") return CrossRule::kCoverage;
  if (name == "strict") return CrossRule::kStrict;
  return std::nullopt;
}

std::array<bool, 4> vizwiz_rules(const DisagreementVector& v, CrossRule rule) {
  v.validate();
  const int lqi = v[Reason::LQI];
  const bool cross = cross_fires(v, rule);
  std::array<bool, 4> fired{};
  fired[0] = lqi <= 1 && question_reasons_at_most(v, 2);
  fired[1] = lqi >= 4 && question_reasons_at_most(v, 2);
  // "Neither AMB nor IVE unanimous" is read the same way as the cross rule.
  fired[2] = lqi <= 1 && (v[Reason::INV] >= 3 || v[Reason::SBJ] >= 3) && !cross;
  fired[3] = cross;
  return fired;
}

std::optional<VizwizSubset> classify_vizwiz(const DisagreementVector& v,
                                            CrossRule rule) {
  const auto fired = vizwiz_rules(v, rule);
  for (std::size_t i = 0; i < fired.size(); ++i) {
    if (fired[i]) return static_cast<VizwizSubset>(i);
  }
  return std::nullopt;
}

AnnotatedQuestion parse_vizwiz_record(const Json& r) {
  AnnotatedQuestion out;
  auto& inst = out.instance;
  inst.dataset = "vizwiz";
  inst.image_ref = r.at("image").get<std::string>();
  inst.id = r.contains("id") ? r.at("id").get<std::string>() : inst.image_ref;
  inst.question = r.at("question").get<std::string>();
  if (inst.id.empty() || inst.question.empty()) {
    throw DataError("record without id or question");
  }
  for (const auto& a : r.value("answers", Json::array())) {
    inst.reference_answers.push_back(a.is_string() ? a.get<std::string>()
                                                   : a.at("answer").get<std::string>());
  }
  if (r.contains("reason_counts")) {
    for (const auto& [name, count] : r.at("reason_counts").items()) {
      const auto reason = parse_reason(name);
      if (!reason) throw DataError("unknown disagreement reason " + name);
      out.reasons[*reason] = count.get<int>();
    }
  } else if (r.contains("annotations")) {
    const auto& annotators = r.at("annotations");
    if (annotators.size() > static_cast<std::size_t>(kAnnotators)) {
      throw DataError(inst.id + ": more than 5 annotators");
    }
    for (const auto& picks : annotators) {
      std::array<bool, kNumReasons> seen{};
      for (const auto& p : picks) {
        const auto reason = parse_reason(p.get<std::string>());
        if (!reason) throw DataError("unknown disagreement reason " + p.dump());
        // Repeats within one annotator count once.
        auto& flag = seen[static_cast<std::size_t>(*reason)];
        if (!flag) out.reasons[*reason] += 1;
        flag = true;
      }
    }
  } else {
    throw DataError(inst.id + ": neither reason_counts nor annotations");
  }
  out.reasons.validate();
  return out;
}

std::vector<AnnotatedQuestion> read_vizwiz_annotations(
    const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<AnnotatedQuestion> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '[') {
      for (const auto& r : Json::parse(text)) out.push_back(parse_vizwiz_record(r));
      return out;
    }
    for (const auto& r : from_jsonl<Json>(text, path.string())) {
      out.push_back(parse_vizwiz_record(r));
    }
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return out;
}

SubsetBuild build_subsets(const std::vector<AnnotatedQuestion>& records,
                          CrossRule rule) {
  SubsetBuild b;
  for (const auto& r : records) {
    const auto subset = classify_vizwiz(r.reasons, rule);
    if (!subset) {
      ++b.unassigned;
      continue;
    }
    ++b.counts[static_cast<std::size_t>(*subset)];
    VqaInstance inst = r.instance;
    inst.subset_tag = to_subset_tag(*subset);
    b.instances.push_back(std::move(inst));
  }
  return b;
}

}  // namespace uqbench::datasets
