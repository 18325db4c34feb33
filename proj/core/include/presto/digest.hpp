// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace presto {

/// Incremental FNV-1a (64-bit). Used for scenario digests, snapshot digests
/// and trace checksums; not cryptographic, just stable and cheap.
class Fnv1a {
  public:
    Fnv1a& update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            h_ ^= c;
            h_ *= 0x100000001b3ull;
        }
        return *this;
    }
    Fnv1a& update(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xff;
            h_ *= 0x100000001b3ull;
        }
        return *this;
    }
    std::uint64_t value() const { return h_; }

  private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

inline std::uint64_t fnv1a(std::string_view bytes) { return Fnv1a().update(bytes).value(); }

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace presto
