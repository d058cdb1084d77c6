#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "fairhsic/core/error.hpp"

namespace fairhsic {

// Hex-encoded SHA-256 of an arbitrary byte string.
inline std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("hash_failure", "SHA-256 digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

// splitmix64 finalizer; used to derive independent seeds and row keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    return mix64(seed ^ mix64(salt));
}

// Order-sensitive key over the bit patterns of a row of doubles.
inline std::uint64_t hash_row(std::uint64_t seed, std::span<const double> row) noexcept {
    std::uint64_t h = mix64(seed);
    for (double v : row) {
        h = mix64(h ^ std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
    }
    return h;
}

} // namespace fairhsic
