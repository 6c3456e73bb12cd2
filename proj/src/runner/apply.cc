#include "uqbench/runner/apply.h"

#include "uqbench/core/errors.h"
#include "uqbench/text/lexical.h"
#include "uqbench/visual/visual.h"

namespace uqbench::runner {

bool is_deterministic(Kind kind) {
  return kind != Kind::kInv && kind != Kind::kSbj && kind != Kind::kAmb &&
         kind != Kind::kIve;
}

Applied apply_deterministic(Kind kind, double strength, std::uint64_t seed,
                            const std::string& question,
                            const std::function<const visual::RasterImage&()>& image,
                            const std::function<cross::RawGrid()>& relevance,
                            double mask_sigma) {
  Applied out;
  if (auto vk = as_visual(kind)) {
    out.image = visual::apply_visual(image(), *vk, strength, seed);
    return out;
  }
  switch (kind) {
    case Kind::kTypos:
      out.question = text::apply_typos(question, strength, seed);
      break;
    case Kind::kDropwords:
      out.question = text::apply_dropwords(question, strength, seed);
      break;
    case Kind::kShuffle:
      out.question = text::apply_shuffle(question, static_cast<int>(strength), seed);
      break;
    case Kind::kAttentionMask: {
      const auto& img = image();
      const auto mask = cross::normalize_and_smooth(relevance(), mask_sigma, img.width,
                                                    img.height);
      out.image = cross::apply_attention_mask(img, mask, strength);
      break;
    }
    default:
      throw ParameterError(std::string(kind_name(kind)) +
                           " is not a deterministic perturbation");
  }
  return out;
}

}  // namespace uqbench::runner
