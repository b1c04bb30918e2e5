#pragma once

#include "zlink/util.hpp"

#include <cstdint>
#include <cstddef>

namespace zlink {

/// Incremental SHA-256 (FIPS 180-4). Used for txids and store content hashes.
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(ByteSpan bytes) { update(bytes.data(), bytes.size()); }
    Hash32 finish();

private:
    void compress(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint8_t buf_[64];
    std::uint64_t total_ = 0;
    std::size_t buf_len_ = 0;
};

Hash32 sha256(ByteSpan data);

/// Double SHA-256, the txid/block-hash construction.
Hash32 dsha256(ByteSpan data);

} // namespace zlink
