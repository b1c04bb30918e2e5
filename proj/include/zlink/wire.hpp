#pragma once

#include "zlink/chain.hpp"
#include "zlink/error.hpp"
#include "zlink/util.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>

namespace zlink {

/// Byte lengths of the opaque fields in a serialized JoinSplit description,
/// plus the per-transaction JoinSplit envelope. Defaults match the Sprout-era
/// public layout (PHGR proofs); all lengths are configurable so the parser is
/// not tied to one protocol revision.
struct WireLayoutConfig {
    std::uint32_t anchor_size = 32;
    std::uint32_t nullifiers_size = 64;   // 2 x 32
    std::uint32_t commitments_size = 64;  // 2 x 32
    std::uint32_t ephemeral_key_size = 32;
    std::uint32_t random_seed_size = 32;
    std::uint32_t macs_size = 64;         // 2 x 32
    std::uint32_t proof_size = 296;       // PHGR; 192 for Groth16
    std::uint32_t ciphertexts_size = 1202; // 2 x 601

    std::uint32_t joinsplit_pubkey_size = 32;
    std::uint32_t joinsplit_sig_size = 64;

    /// Minimum transaction version that carries a JoinSplit count.
    std::uint32_t tx_version_with_joinsplits = 2;

    /// Record separator for raw chain files ("ZLNK" on disk).
    std::uint32_t raw_block_magic = 0x4b4e4c5a;

    /// Throws ConfigError unless every length is strictly positive.
    void validate() const;

    std::size_t joinsplit_opaque_size() const {
        return std::size_t(anchor_size) + nullifiers_size + commitments_size +
               ephemeral_key_size + random_seed_size + macs_size + proof_size +
               ciphertexts_size;
    }
    /// Full serialized JoinSplit description: two 8-byte amounts + opaque fields.
    std::size_t joinsplit_desc_size() const { return 16 + joinsplit_opaque_size(); }
};

/// Bitcoin-style compact size. Throws ParseError on truncation or on a
/// non-canonical (oversized) encoding.
std::pair<std::uint64_t, std::size_t> parse_varint(ByteSpan bytes);
void write_varint(Bytes& out, std::uint64_t value);

/// Parses one wire-format transaction from the front of `bytes`. The txid is
/// computed as double-SHA256 of the consumed bytes. Input scripts are skipped;
/// a single null-prevout input marks a coinbase and is recorded as an empty
/// input list.
std::pair<TxRecord, std::size_t> parse_transaction(ByteSpan bytes, const WireLayoutConfig& cfg);

/// Serializes a TxRecord to wire format. Opaque JoinSplit fields are
/// zero-filled; input scripts are emitted empty; coinbase records emit the
/// null-prevout marker input. parse_transaction(serialize_transaction(tx))
/// reproduces `tx` with the txid recomputed from the bytes.
Bytes serialize_transaction(const TxRecord& tx, const WireLayoutConfig& cfg);

/// One length-prefixed block record: magic, payload length, then
/// height/time/hash and the wire-format transactions.
Bytes serialize_block(const BlockRecord& block, const WireLayoutConfig& cfg);
std::pair<BlockRecord, std::size_t> parse_block(ByteSpan bytes, const WireLayoutConfig& cfg);

/// Raw chain files are a sequence of block records.
void write_raw_chain(std::ostream& out, const IngestBatch& batch, const WireLayoutConfig& cfg);
IngestBatch read_raw_chain(std::istream& in, const WireLayoutConfig& cfg);

} // namespace zlink
