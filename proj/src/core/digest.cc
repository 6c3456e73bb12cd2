#include "uqbench/core/digest.h"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>

#include "uqbench/core/errors.h"

namespace uqbench {
namespace {

std::array<unsigned char, SHA256_DIGEST_LENGTH> sha256_raw(const void* data,
                                                           std::size_t size) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> out{};
  SHA256(static_cast<const unsigned char*>(data), size, out.data());
  return out;
}

std::string to_hex(std::span<const unsigned char> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  auto d = sha256_raw(data.data(), data.size());
  return to_hex(d);
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
  auto d = sha256_raw(data.data(), data.size());
  return to_hex(d);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view instance_id,
                          std::string_view kind) {
  std::string material = std::to_string(seed);
  material.push_back('\0');
  material.append(instance_id);
  material.push_back('\0');
  material.append(kind);
  auto d = sha256_raw(material.data(), material.size());
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | d[i];
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  if (data.empty()) return {};
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_encode(std::string_view data) {
  return base64_encode(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.empty()) return {};
  if (text.size() % 4 != 0) throw DataError("base64 input length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  int n = EVP_DecodeBlock(out.data(),
                          reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw DataError("malformed base64 input");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace uqbench
