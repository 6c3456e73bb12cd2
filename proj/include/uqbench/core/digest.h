#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqbench {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);
std::string sha256_hex(std::span<const std::uint8_t> data);

// Per-call RNG seed derived from (run seed, instance id, operator name), so
// batches parallelize without sharing generator state.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view instance_id,
                          std::string_view kind);

std::string base64_encode(std::span<const std::uint8_t> data);
std::string base64_encode(std::string_view data);
// Throws DataError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace uqbench
