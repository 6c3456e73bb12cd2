#include "uqbench/visual/visual.h"

#include <algorithm>
#include <cmath>

#include "uqbench/core/random.h"

namespace uqbench::visual {
namespace {

constexpr std::uint8_t kCutoutFill = 128;

std::uint8_t clamp_byte(long v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

RasterImage brightness(const RasterImage& image, double factor) {
  RasterImage out = image;
  if (factor == 1.0) return out;
  for (auto& v : out.pixels) v = clamp_byte(std::lround(v * factor));
  return out;
}

RasterImage cutout(const RasterImage& image, double ratio, std::uint64_t seed) {
  RasterImage out = image;
  const int side = static_cast<int>(
      std::floor(ratio * std::min(image.width, image.height)));
  if (side <= 0) return out;
  Rng rng(seed);
  const int x0 = static_cast<int>(rng.index(image.width - side + 1));
  const int y0 = static_cast<int>(rng.index(image.height - side + 1));
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = kCutoutFill;
    }
  }
  return out;
}

RasterImage gaussian_noise(const RasterImage& image, double sigma,
                           std::uint64_t seed) {
  RasterImage out = image;
  if (sigma == 0.0) return out;
  auto field = gaussian_noise_field(image.pixels.size(), sigma, seed);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = clamp_byte(static_cast<long>(out.pixels[i]) + field[i]);
  }
  return out;
}

RasterImage pixelate(const RasterImage& image, int cell) {
  RasterImage out = image;
  if (cell <= 1) return out;
  for (int y0 = 0; y0 < image.height; y0 += cell) {
    const int y1 = std::min(image.height, y0 + cell);
    for (int x0 = 0; x0 < image.width; x0 += cell) {
      const int x1 = std::min(image.width, x0 + cell);
      const long n = static_cast<long>(y1 - y0) * (x1 - x0);
      for (int c = 0; c < 3; ++c) {
        long sum = 0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) sum += image.at(x, y, c);
        }
        const auto mean = static_cast<std::uint8_t>((sum + n / 2) / n);
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) out.at(x, y, c) = mean;
        }
      }
    }
  }
  return out;
}

RasterImage salt_pepper(const RasterImage& image, double p, std::uint64_t seed) {
  RasterImage out = image;
  if (p == 0.0) return out;
  Rng rng(seed);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (!rng.bernoulli(p)) continue;
      const std::uint8_t v = rng.bernoulli(0.5) ? 255 : 0;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = v;
    }
  }
  return out;
}

}  // namespace

std::vector<int> gaussian_noise_field(std::size_t count, double sigma,
                                      std::uint64_t seed) {
  std::vector<int> field(count, 0);
  if (sigma == 0.0) return field;
  Rng rng(seed);
  for (auto& v : field) v = static_cast<int>(std::lround(sigma * rng.normal()));
  return field;
}

RasterImage gaussian_blur(const RasterImage& image, double sigma) {
  if (sigma == 0.0 || image.width == 0 || image.height == 0) return image;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += kernel[i + radius];
  }
  for (auto& k : kernel) k /= total;

  const int w = image.width;
  const int h = image.height;
  std::vector<double> tmp(image.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int xx = std::clamp(x + i, 0, w - 1);
          acc += kernel[i + radius] * image.at(xx, y, c);
        }
        tmp[image.offset(x, y) + c] = acc;
      }
    }
  }
  RasterImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int yy = std::clamp(y + i, 0, h - 1);
          acc += kernel[i + radius] * tmp[image.offset(x, yy) + c];
        }
        out.at(x, y, c) = clamp_byte(std::lround(acc));
      }
    }
  }
  return out;
}

int solarize_threshold(double level) {
  return static_cast<int>(
      std::clamp(std::lround(128.0 * (2.0 - level)), 0L, 255L));
}

RasterImage solarize_with_threshold(const RasterImage& image, int threshold) {
  RasterImage out = image;
  for (auto& v : out.pixels) {
    if (v > threshold) v = static_cast<std::uint8_t>(255 - v);
  }
  return out;
}

double default_strength(VisualKind kind) {
  return kind_info(to_kind(kind)).default_strength;
}

RasterImage apply_visual(const RasterImage& image, VisualKind kind,
                         double strength, std::uint64_t seed) {
  validate_strength(to_kind(kind), strength);
  switch (kind) {
    case VisualKind::kBlur:
      return gaussian_blur(image, strength);
    case VisualKind::kBrightnessDark:
    case VisualKind::kBrightnessBright:
      return brightness(image, strength);
    case VisualKind::kCutout:
      return cutout(image, strength, seed);
    case VisualKind::kGaussianNoise:
      return gaussian_noise(image, strength, seed);
    case VisualKind::kPixelate:
      // Any cell at least as large as the image is a single cell.
      return pixelate(image, static_cast<int>(std::min(
                                 strength, 1.0 + std::max(image.width,
                                                          image.height))));
    case VisualKind::kSaltPepper:
      return salt_pepper(image, strength, seed);
    case VisualKind::kSolarize:
      return solarize_with_threshold(image, solarize_threshold(strength));
  }
  return image;
}

}  // namespace uqbench::visual
