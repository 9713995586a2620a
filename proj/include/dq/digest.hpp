#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dq {

// FNV-1a, 64 bit. Used for content-derived rule ids and source-file
// staleness digests; not a cryptographic hash.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v);

inline std::string digest_hex(std::string_view data) { return hex64(fnv1a64(data)); }

}  // namespace dq
