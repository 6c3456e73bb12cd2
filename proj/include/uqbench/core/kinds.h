#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace uqbench {

enum class Family { kVisual, kTextual, kCrossmodal };

// All 16 perturbation operators: 8 visual, 5 textual, 3 cross-modal.
enum class Kind {
  kBlur,
  kBrightnessDark,
  kBrightnessBright,
  kCutout,
  kGaussianNoise,
  kPixelate,
  kSaltPepper,
  kSolarize,
  kTypos,
  kDropwords,
  kShuffle,
  kInv,
  kSbj,
  kAmb,
  kIve,
  kAttentionMask,
};

inline constexpr int kNumKinds = 16;

enum class VisualKind {
  kBlur,
  kBrightnessDark,
  kBrightnessBright,
  kCutout,
  kGaussianNoise,
  kPixelate,
  kSaltPepper,
  kSolarize,
};

enum class TextualKind { kTypos, kDropwords, kShuffle, kInv, kSbj };

enum class CrossKind { kAmb, kIve, kAttentionMask };

inline constexpr std::array<VisualKind, 8> kAllVisualKinds = {
    VisualKind::kBlur,          VisualKind::kBrightnessDark,
    VisualKind::kBrightnessBright, VisualKind::kCutout,
    VisualKind::kGaussianNoise, VisualKind::kPixelate,
    VisualKind::kSaltPepper,    VisualKind::kSolarize};

inline constexpr std::array<TextualKind, 5> kAllTextualKinds = {
    TextualKind::kTypos, TextualKind::kDropwords, TextualKind::kShuffle,
    TextualKind::kInv, TextualKind::kSbj};

inline constexpr std::array<CrossKind, 3> kAllCrossKinds = {
    CrossKind::kAmb, CrossKind::kIve, CrossKind::kAttentionMask};

// Valid strength interval of an operator. Infinite upper bounds are allowed;
// `slider_max` is the practical upper bound offered to calibration UIs.
struct StrengthRange {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;
  bool integral = false;
  double slider_max = 0.0;

  bool contains(double v) const;
  std::string describe() const;
};

struct KindInfo {
  Kind kind;
  std::string_view name;
  Family family;
  // Prompt-based kinds have no numeric strength.
  bool discrete;
  StrengthRange range;
  double identity_strength;
  double default_strength;
};

const KindInfo& kind_info(Kind kind);
const std::array<KindInfo, kNumKinds>& all_kinds();

std::string_view kind_name(Kind kind);
std::optional<Kind> parse_kind(std::string_view name);
Kind parse_kind_or_throw(std::string_view name);

Family family_of(Kind kind);
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);

Kind to_kind(VisualKind k);
Kind to_kind(TextualKind k);
Kind to_kind(CrossKind k);
std::optional<VisualKind> as_visual(Kind k);
std::optional<TextualKind> as_textual(Kind k);
std::optional<CrossKind> as_cross(Kind k);

// Throws ParameterError naming the valid range when `strength` is outside
// the operator's range, or when a strength is given to a discrete kind.
void validate_strength(Kind kind, double strength);

}  // namespace uqbench
