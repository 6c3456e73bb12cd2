#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uqbench/core/types.h"

namespace uqbench::datasets {

enum class Reason { LQI, IVE, INV, DFF, AMB, SBJ, SYN, GRN, SPM, OTH };
inline constexpr std::size_t kNumReasons = 10;
inline constexpr int kAnnotators = 5;

std::string_view reason_name(Reason r);
std::optional<Reason> parse_reason(std::string_view name);

// Per-reason annotator counts, each in [0, 5].
struct DisagreementVector {
  std::array<int, kNumReasons> counts{};

  int operator[](Reason r) const { return counts[static_cast<std::size_t>(r)]; }
  int& operator[](Reason r) { return counts[static_cast<std::size_t>(r)]; }
  // Throws DataError when a count is outside [0, 5].
  void validate() const;
};

enum class VizwizSubset { kClean, kVisual, kTextual, kCross };

std::string_view subset_name(VizwizSubset s);
SubsetTag to_subset_tag(VizwizSubset s);

// How "all annotators select either AMB or IVE" is read.
enum class CrossRule {
  kCoverage,  // AMB + IVE >= 5 (one reason per annotator)
  kStrict,    // max(AMB, IVE) == 5
};

std::optional<CrossRule> parse_cross_rule(std::string_view name);

// Which of the four rules fire, indexed by VizwizSubset. Evaluated
// independently so disjointness can be checked.
std::array<bool, 4> vizwiz_rules(const DisagreementVector& v,
                                 CrossRule rule = CrossRule::kCoverage);

// At most one subset fires for any vector; nullopt when none does.
std::optional<VizwizSubset> classify_vizwiz(const DisagreementVector& v,
                                            CrossRule rule = CrossRule::kCoverage);

struct AnnotatedQuestion {
  VqaInstance instance;
  DisagreementVector reasons;
};

// One record per line (JSONL) or a JSON array. Each record has
//   id (or image), image, question, answers: [str | {"answer": str}],
// and either "reason_counts": {"LQI": 4, ...} or
// "annotations": [["LQI"], ["LQI", "AMB"], ...] (one list per annotator).
std::vector<AnnotatedQuestion> read_vizwiz_annotations(
    const std::filesystem::path& path);
AnnotatedQuestion parse_vizwiz_record(const Json& record);

struct SubsetBuild {
  std::vector<VqaInstance> instances;  // subset_tag set, unmatched dropped
  std::array<int, 4> counts{};         // indexed by VizwizSubset
  int unassigned = 0;
};

SubsetBuild build_subsets(const std::vector<AnnotatedQuestion>& records,
                          CrossRule rule = CrossRule::kCoverage);

}  // namespace uqbench::datasets
