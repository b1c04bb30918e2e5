#pragma once

#include "zlink/amount.hpp"
#include "zlink/util.hpp"

#include <cstdint>
#include <vector>

namespace zlink {

using TxId = Hash32;

/// The public fields of one JoinSplit: coins entering the shielded pool
/// (vpub_old) and coins exiting it (vpub_new).
struct JoinSplitDesc {
    Amount vpub_old;
    Amount vpub_new;

    friend bool operator==(const JoinSplitDesc&, const JoinSplitDesc&) = default;
};

enum class JoinSplitKind {
    Shielding,     // vpub_old > 0, vpub_new == 0
    Deshielding,   // vpub_new > 0, vpub_old == 0
    FullyShielded, // both zero
    Mixed,         // both positive; never observed on the real chain but representable
};

const char* to_string(JoinSplitKind kind);

/// Total, disjoint classification per the vpub sign table.
JoinSplitKind classify_joinsplit(const JoinSplitDesc& js);

/// Net flow into the shielded pool: vpub_old - vpub_new, signed zatoshi.
std::int64_t pool_delta(const JoinSplitDesc& js);

struct TxIn {
    TxId prev_txid{};
    std::uint32_t prev_vout = 0;

    friend bool operator==(const TxIn&, const TxIn&) = default;
};

struct TxOut {
    Amount value;
    Bytes script_id; // opaque script or script hash; never decoded

    friend bool operator==(const TxOut&, const TxOut&) = default;
};

struct TxRecord {
    TxId txid{};
    bool is_coinbase = false;
    std::vector<TxIn> inputs; // empty for coinbase (the null marker is not stored)
    std::vector<TxOut> outputs;
    std::vector<JoinSplitDesc> joinsplits;

    bool has_joinsplit() const { return !joinsplits.empty(); }

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

struct BlockRecord {
    std::int64_t height = 0;
    Hash32 hash{};
    std::int64_t time = 0; // unix seconds
    std::vector<TxRecord> txs;

    friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

enum class IngestSource { RawFile, Jsonl, Rpc };

/// Height-ordered run of blocks from one ingestion source.
struct IngestBatch {
    std::vector<BlockRecord> blocks;
    IngestSource source = IngestSource::Jsonl;
};

/// Structural checks shared by every ingestion path: strictly increasing
/// heights, coinbase-first blocks, per-block txid uniqueness.
/// Throws ParseError describing the first violation.
void validate_batch(const IngestBatch& batch);

} // namespace zlink
