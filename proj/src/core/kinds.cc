#include "uqbench/core/kinds.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "uqbench/core/errors.h"

namespace uqbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr StrengthRange closed(double lo, double hi) {
  return {lo, hi, false, false, false, hi};
}
constexpr StrengthRange at_least(double lo, double slider_max) {
  return {lo, kInf, false, true, false, slider_max};
}
constexpr StrengthRange positive(double slider_max) {
  return {0.0, kInf, true, true, false, slider_max};
}
constexpr StrengthRange integer_at_least(double lo, double slider_max) {
  return {lo, kInf, false, true, true, slider_max};
}
constexpr StrengthRange none() { return {0.0, 0.0, false, false, false, 0.0}; }

// Calibrated defaults: blur 10, brightness 0.2 / 4.0, cutout 0.2, noise 50,
// pixelate 5, salt & pepper 0.2, solarize level 1; typos / dropwords p = 0.15,
// shuffle k = 1; attention masking lambda = 1.
const std::array<KindInfo, kNumKinds> kKinds = {{
    {Kind::kBlur, "blur", Family::kVisual, false, at_least(0, 20), 0.0, 10.0},
    {Kind::kBrightnessDark, "brightness_dark", Family::kVisual, false,
     positive(5), 1.0, 0.20},
    {Kind::kBrightnessBright, "brightness_bright", Family::kVisual, false,
     positive(5), 1.0, 4.00},
    {Kind::kCutout, "cutout", Family::kVisual, false, closed(0, 1), 0.0, 0.20},
    {Kind::kGaussianNoise, "gaussian_noise", Family::kVisual, false,
     at_least(0, 128), 0.0, 50.0},
    {Kind::kPixelate, "pixelate", Family::kVisual, false,
     integer_at_least(1, 32), 1.0, 5.0},
    {Kind::kSaltPepper, "salt_pepper", Family::kVisual, false, closed(0, 1),
     0.0, 0.200},
    {Kind::kSolarize, "solarize", Family::kVisual, false, closed(0, 2), 0.0,
     1.0},
    {Kind::kTypos, "typos", Family::kTextual, false, closed(0, 1), 0.0, 0.15},
    {Kind::kDropwords, "dropwords", Family::kTextual, false, closed(0, 1), 0.0,
     0.15},
    {Kind::kShuffle, "shuffle", Family::kTextual, false,
     integer_at_least(0, 4), 0.0, 1.0},
    {Kind::kInv, "inv", Family::kTextual, true, none(), 0.0, 0.0},
    {Kind::kSbj, "sbj", Family::kTextual, true, none(), 0.0, 0.0},
    {Kind::kAmb, "amb", Family::kCrossmodal, true, none(), 0.0, 0.0},
    {Kind::kIve, "ive", Family::kCrossmodal, true, none(), 0.0, 0.0},
    {Kind::kAttentionMask, "attention_mask", Family::kCrossmodal, false,
     closed(0, 1), 0.0, 1.0},
}};

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

bool StrengthRange::contains(double v) const {
  if (!std::isfinite(v)) return false;
  if (lo_open ? v <= lo : v < lo) return false;
  if (hi_open ? v >= hi : v > hi) return false;
  if (integral && std::floor(v) != v) return false;
  return true;
}

std::string StrengthRange::describe() const {
  std::string s;
  s += lo_open ? "(" : "[";
  s += format_number(lo) + ", " + format_number(hi);
  s += hi_open ? ")" : "]";
  if (integral) s += " (integer)";
  return s;
}

const std::array<KindInfo, kNumKinds>& all_kinds() { return kKinds; }

const KindInfo& kind_info(Kind kind) {
  return kKinds[static_cast<std::size_t>(kind)];
}

std::string_view kind_name(Kind kind) { return kind_info(kind).name; }

std::optional<Kind> parse_kind(std::string_view name) {
  for (const auto& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

Kind parse_kind_or_throw(std::string_view name) {
  auto k = parse_kind(name);
  if (!k) {
    throw ParameterError("unknown perturbation kind '" + std::string(name) +
                         "'");
  }
  return *k;
}

Family family_of(Kind kind) { return kind_info(kind).family; }

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kVisual:
      return "visual";
    case Family::kTextual:
      return "textual";
    case Family::kCrossmodal:
      return "crossmodal";
  }
  return "";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "visual") return Family::kVisual;
  if (name == "textual") return Family::kTextual;
  if (name == "crossmodal") return Family::kCrossmodal;
  return std::nullopt;
}

Kind to_kind(VisualKind k) { return static_cast<Kind>(static_cast<int>(k)); }

Kind to_kind(TextualKind k) {
  return static_cast<Kind>(static_cast<int>(Kind::kTypos) +
                           static_cast<int>(k));
}

Kind to_kind(CrossKind k) {
  return static_cast<Kind>(static_cast<int>(Kind::kAmb) + static_cast<int>(k));
}

std::optional<VisualKind> as_visual(Kind k) {
  if (family_of(k) != Family::kVisual) return std::nullopt;
  return static_cast<VisualKind>(static_cast<int>(k));
}

std::optional<TextualKind> as_textual(Kind k) {
  if (family_of(k) != Family::kTextual) return std::nullopt;
  return static_cast<TextualKind>(static_cast<int>(k) -
                                  static_cast<int>(Kind::kTypos));
}

std::optional<CrossKind> as_cross(Kind k) {
  if (family_of(k) != Family::kCrossmodal) return std::nullopt;
  return static_cast<CrossKind>(static_cast<int>(k) -
                                static_cast<int>(Kind::kAmb));
}

void validate_strength(Kind kind, double strength) {
  const auto& info = kind_info(kind);
  if (info.discrete) {
    if (strength != 0.0) {
      throw ParameterError(std::string(info.name) +
                           " is a discrete perturbation type and takes no "
                           "strength");
    }
    return;
  }
  if (!info.range.contains(strength)) {
    throw ParameterError("strength " + format_number(strength) + " for " +
                         std::string(info.name) + " outside valid range " +
                         info.range.describe());
  }
}

}  // namespace uqbench
