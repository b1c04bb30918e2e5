#include "zlink/util.hpp"

#include "zlink/error.hpp"

namespace zlink {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::string to_hex(ByteSpan bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw ParseError("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw ParseError("invalid hex digit in \"" + std::string(hex) + "\"");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string hash_to_display_hex(const Hash32& h) {
    std::string out;
    out.reserve(64);
    for (int i = 31; i >= 0; --i) {
        std::uint8_t b = h[static_cast<std::size_t>(i)];
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

Hash32 hash_from_display_hex(std::string_view hex) {
    if (hex.size() != 64) throw ParseError("hash must be 64 hex characters");
    Bytes raw = from_hex(hex);
    Hash32 h;
    for (std::size_t i = 0; i < 32; ++i) h[i] = raw[31 - i];
    return h;
}

int compare_display(const Hash32& a, const Hash32& b) {
    for (int i = 31; i >= 0; --i) {
        std::size_t idx = static_cast<std::size_t>(i);
        if (a[idx] != b[idx]) return a[idx] < b[idx] ? -1 : 1;
    }
    return 0;
}

} // namespace zlink
