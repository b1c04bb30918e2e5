#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zlink {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// 32-byte hash in internal (wire) byte order. The display convention for
/// txids and block hashes reverses the bytes before hex encoding.
using Hash32 = std::array<std::uint8_t, 32>;

std::string to_hex(ByteSpan bytes);
Bytes from_hex(std::string_view hex);

/// Hex with the byte order reversed, the way txids are conventionally shown.
std::string hash_to_display_hex(const Hash32& h);
Hash32 hash_from_display_hex(std::string_view hex);

/// Display-order comparison (matches lexicographic order of the rendered hex).
int compare_display(const Hash32& a, const Hash32& b);

struct Hash32Hasher {
    std::size_t operator()(const Hash32& h) const noexcept {
        // txids are already uniform; fold the first bytes
        std::size_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | h[static_cast<std::size_t>(i)];
        return v;
    }
};

} // namespace zlink
