#include "uqbench/cross/mask_provider.h"

#include <cstring>

#include "uqbench/backend/http.h"
#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"
#include "uqbench/visual/raster.h"

namespace uqbench::cross {
namespace {

std::uint32_t read_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

RawGrid decode_raw_mask(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kRawMaskMagic, 8) != 0) {
    throw DataError("raw mask: missing UQBMASK1 header");
  }
  RawGrid g;
  const std::uint32_t w = read_u32le(bytes.data() + 8);
  const std::uint32_t h = read_u32le(bytes.data() + 12);
  const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
  if (w == 0 || h == 0 || bytes.size() != 16 + 4 * n) {
    throw DataError("raw mask: payload does not match " + std::to_string(w) +
                    "x" + std::to_string(h));
  }
  g.width = static_cast<int>(w);
  g.height = static_cast<int>(h);
  g.values.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t bits = read_u32le(bytes.data() + 16 + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    g.values[i] = f;
  }
  return g;
}

std::string encode_raw_mask(const RawGrid& grid) {
  std::string out(kRawMaskMagic, 8);
  append_u32le(out, static_cast<std::uint32_t>(grid.width));
  append_u32le(out, static_cast<std::uint32_t>(grid.height));
  for (double v : grid.values) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    append_u32le(out, bits);
  }
  return out;
}

RawGrid SidecarMaskProvider::relevance(const std::string& instance_id,
                                       const std::filesystem::path& image_path,
                                       std::span<const std::uint8_t>,
                                       const std::string&) {
  const auto dir = dir_ ? *dir_ : image_path.parent_path();
  const auto png = dir / (instance_id + ".mask.png");
  if (std::filesystem::exists(png)) {
    const auto bytes = visual::read_bytes(png);
    const auto gray = visual::decode_gray_png(bytes);
    RawGrid g{gray.width, gray.height, {}};
    g.values.reserve(gray.values.size());
    for (auto v : gray.values) g.values.push_back(v / 255.0);
    return g;
  }
  const auto raw = dir / (instance_id + ".mask.raw");
  if (std::filesystem::exists(raw)) {
    return decode_raw_mask(visual::read_bytes(raw));
  }
  throw DataError("no relevance mask sidecar for " + instance_id + " in " +
                  dir.string());
}

RawGrid HttpMaskProvider::relevance(const std::string&,
                                    const std::filesystem::path&,
                                    std::span<const std::uint8_t> image_bytes,
                                    const std::string& text) {
  const Json reply = backend::post_json_checked(
      url_, Json{{"image", base64_encode(image_bytes)}, {"text", text}});
  try {
    RawGrid g;
    g.width = reply.at("width").get<int>();
    g.height = reply.at("height").get<int>();
    g.values = reply.at("values").get<std::vector<double>>();
    if (g.width <= 0 || g.height <= 0 ||
        g.values.size() != static_cast<std::size_t>(g.width) * g.height) {
      throw DataError("relevance reply size mismatch");
    }
    return g;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed relevance reply: ") + e.what());
  }
}

}  // namespace uqbench::cross
