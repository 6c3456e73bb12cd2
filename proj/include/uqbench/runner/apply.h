#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "uqbench/core/kinds.h"
#include "uqbench/cross/mask.h"
#include "uqbench/visual/raster.h"

namespace uqbench::runner {

// Kinds whose output is a pure function of (input, strength, seed). The
// LLM-backed rewrites are the rest.
bool is_deterministic(Kind kind);

struct Applied {
  std::optional<visual::RasterImage> image;
  std::optional<std::string> question;
};

// Shared by the pipeline and the calibration preview so both produce the
// same bytes. `image` and `relevance` are only invoked when the kind needs
// them.
Applied apply_deterministic(Kind kind, double strength, std::uint64_t seed,
                            const std::string& question,
                            const std::function<const visual::RasterImage&()>& image,
                            const std::function<cross::RawGrid()>& relevance,
                            double mask_sigma);

}  // namespace uqbench::runner
