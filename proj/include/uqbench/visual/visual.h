#pragma once

#include <cstdint>
#include <vector>

#include "uqbench/core/kinds.h"
#include "uqbench/visual/raster.h"

namespace uqbench::visual {

// Applies one of the 8 image perturbations. Strength units per kind:
//   blur              Gaussian sigma in pixels (kernel radius ceil(3 sigma))
//   brightness_*      multiplicative factor > 0
//   cutout            square side as a fraction of min(W, H), gray fill
//   gaussian_noise    sigma in 8-bit intensity units
//   pixelate          integer cell size in pixels
//   salt_pepper       per-pixel corruption probability
//   solarize          level in [0, 2], see solarize_threshold()
// Throws ParameterError when strength is outside the operator's range.
// Output dimensions always equal the input's; every kind is the identity at
// its identity strength.
RasterImage apply_visual(const RasterImage& image, VisualKind kind,
                         double strength, std::uint64_t seed);

// Calibrated operating point for `kind`.
double default_strength(VisualKind kind);

// Level -> threshold: 128 * (2 - level) clamped to [0, 255]. Level 0 is the
// identity (threshold 255), level 1 inverts the upper half.
int solarize_threshold(double level);

// I' = 255 - I for I > threshold, per channel.
RasterImage solarize_with_threshold(const RasterImage& image, int threshold);

// The integer noise offsets added by gaussian_noise (before clamping), one
// per channel value in row-major RGB order.
std::vector<int> gaussian_noise_field(std::size_t count, double sigma,
                                      std::uint64_t seed);

RasterImage gaussian_blur(const RasterImage& image, double sigma);

}  // namespace uqbench::visual
