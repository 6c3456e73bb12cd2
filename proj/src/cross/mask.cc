#include "uqbench/cross/mask.h"

#include <algorithm>
#include <cmath>

#include "uqbench/core/errors.h"

namespace uqbench::cross {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += k[i + radius];
  }
  for (auto& v : k) v /= total;
  return k;
}

void smooth(RawGrid& g, double sigma) {
  if (sigma <= 0.0) return;
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = g.width;
  const int h = g.height;
  std::vector<double> tmp(g.values.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * g.values[y * w + std::clamp(x + i, 0, w - 1)];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * tmp[std::clamp(y + i, 0, h - 1) * w + x];
      }
      g.values[y * w + x] = std::clamp(acc, 0.0, 1.0);
    }
  }
}

}  // namespace

visual::RasterImage apply_attention_mask(const visual::RasterImage& image,
                                         const RelevanceMask& mask,
                                         double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("attention_mask lambda must be in [0, 1], got " +
                         std::to_string(lambda));
  }
  if (mask.width != image.width || mask.height != image.height ||
      mask.values.size() !=
          static_cast<std::size_t>(image.width) * image.height) {
    throw ParameterError("mask is " + std::to_string(mask.width) + "x" +
                         std::to_string(mask.height) + ", image is " +
                         std::to_string(image.width) + "x" +
                         std::to_string(image.height));
  }
  visual::RasterImage out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double factor = 1.0 - lambda * std::clamp(mask.at(x, y), 0.0, 1.0);
      for (int c = 0; c < 3; ++c) {
        const long v = std::lround(image.at(x, y, c) * factor);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
      }
    }
  }
  return out;
}

std::vector<double> resize_bilinear(const RawGrid& grid, int out_width,
                                    int out_height) {
  std::vector<double> out(static_cast<std::size_t>(out_width) * out_height);
  const double sx = static_cast<double>(grid.width) / out_width;
  const double sy = static_cast<double>(grid.height) / out_height;
  auto src = [&](int x, int y) { return grid.values[y * grid.width + x]; };
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(grid.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, grid.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(grid.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, grid.width - 1);
      const double tx = fx - x0;
      const double top = src(x0, y0) * (1 - tx) + src(x1, y0) * tx;
      const double bottom = src(x0, y1) * (1 - tx) + src(x1, y1) * tx;
      out[static_cast<std::size_t>(y) * out_width + x] =
          top * (1 - ty) + bottom * ty;
    }
  }
  return out;
}

RelevanceMask normalize_and_smooth(const RawGrid& raw, double sigma,
                                   int out_width, int out_height) {
  if (raw.width <= 0 || raw.height <= 0 ||
      raw.values.size() != static_cast<std::size_t>(raw.width) * raw.height) {
    throw DataError("relevance grid is empty or its size does not match " +
                    std::to_string(raw.width) + "x" + std::to_string(raw.height));
  }
  if (out_width <= 0 || out_height <= 0) {
    throw ParameterError("mask output size must be positive");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("smoothing sigma must be finite and >= 0");
  }
  for (double v : raw.values) {
    if (!std::isfinite(v)) throw DataError("relevance grid has NaN/Inf");
  }
  const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());
  RawGrid g = raw;
  const double span = *hi - *lo;
  for (auto& v : g.values) v = span > 0.0 ? (v - *lo) / span : 0.0;
  smooth(g, sigma);

  RelevanceMask mask;
  mask.width = out_width;
  mask.height = out_height;
  mask.smoothing_sigma = sigma;
  mask.values = resize_bilinear(g, out_width, out_height);
  for (auto& v : mask.values) v = std::clamp(v, 0.0, 1.0);
  return mask;
}

}  // namespace uqbench::cross
