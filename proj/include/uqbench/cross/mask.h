#pragma once

#include <string>
#include <vector>

#include "uqbench/visual/raster.h"

namespace uqbench::cross {

inline constexpr double kDefaultMaskLambda = 1.0;
inline constexpr double kDefaultSmoothingSigma = 2.0;

// A relevance grid as delivered by a provider, before normalization.
struct RawGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major
};

// Per-pixel relevance m_i in [0, 1] at image resolution.
struct RelevanceMask {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major
  double smoothing_sigma = kDefaultSmoothingSigma;
  std::string provenance;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

// Each channel v becomes round(v * (1 - lambda * m)). lambda in [0, 1];
// mask and image sizes must match (ParameterError otherwise).
visual::RasterImage apply_attention_mask(const visual::RasterImage& image,
                                         const RelevanceMask& mask,
                                         double lambda);

// Min-max normalizes (a constant grid maps to 0), smooths with a Gaussian of
// `sigma` grid cells (0 disables), then bilinearly resamples to
// out_width x out_height with half-pixel centers and edge clamping.
// Throws DataError on empty or non-finite input.
RelevanceMask normalize_and_smooth(const RawGrid& raw, double sigma,
                                   int out_width, int out_height);

// Bilinear resampling used by normalize_and_smooth, exposed for tests.
std::vector<double> resize_bilinear(const RawGrid& grid, int out_width,
                                    int out_height);

}  // namespace uqbench::cross
