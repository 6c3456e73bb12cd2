#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "uqbench/cross/mask.h"

namespace uqbench::cross {

// Source of raw image-text relevance grids (CLIP-style attention maps).
class RelevanceMaskProvider {
 public:
  virtual ~RelevanceMaskProvider() = default;
  virtual std::string provenance() const = 0;
  // `image_path` is the resolved instance image; `image_bytes` its contents.
  virtual RawGrid relevance(const std::string& instance_id,
                            const std::filesystem::path& image_path,
                            std::span<const std::uint8_t> image_bytes,
                            const std::string& text) = 0;
};

inline constexpr char kRawMaskMagic[8] = {'U', 'Q', 'B', 'M', 'A', 'S', 'K', '1'};

// 16-byte header ("UQBMASK1", u32 LE width, u32 LE height) then
// width*height float32 LE values, row-major.
RawGrid decode_raw_mask(std::span<const std::uint8_t> bytes);
std::string encode_raw_mask(const RawGrid& grid);

// Reads `<id>.mask.png` (value / 255) or `<id>.mask.raw` from `dir`, or from
// the image's own directory when `dir` is unset. DataError when neither
// exists.
class SidecarMaskProvider : public RelevanceMaskProvider {
 public:
  explicit SidecarMaskProvider(
      std::optional<std::filesystem::path> dir = std::nullopt)
      : dir_(std::move(dir)) {}

  std::string provenance() const override { return "sidecar"; }
  RawGrid relevance(const std::string& instance_id,
                    const std::filesystem::path& image_path,
                    std::span<const std::uint8_t> image_bytes,
                    const std::string& text) override;

 private:
  std::optional<std::filesystem::path> dir_;
};

// POST <url> {image: base64, text} -> {width, height, values}.
class HttpMaskProvider : public RelevanceMaskProvider {
 public:
  explicit HttpMaskProvider(std::string url) : url_(std::move(url)) {}

  std::string provenance() const override { return "http:" + url_; }
  RawGrid relevance(const std::string& instance_id,
                    const std::filesystem::path& image_path,
                    std::span<const std::uint8_t> image_bytes,
                    const std::string& text) override;

 private:
  std::string url_;
};

}  // namespace uqbench::cross
