#include "zlink/chain.hpp"

#include "zlink/error.hpp"

#include <unordered_set>

namespace zlink {

const char* to_string(JoinSplitKind kind) {
    switch (kind) {
        case JoinSplitKind::Shielding: return "shielding";
        case JoinSplitKind::Deshielding: return "deshielding";
        case JoinSplitKind::FullyShielded: return "fully_shielded";
        case JoinSplitKind::Mixed: return "mixed";
    }
    return "?";
}

JoinSplitKind classify_joinsplit(const JoinSplitDesc& js) {
    bool in = js.vpub_old.to_zat() > 0;
    bool out = js.vpub_new.to_zat() > 0;
    if (in && out) return JoinSplitKind::Mixed;
    if (in) return JoinSplitKind::Shielding;
    if (out) return JoinSplitKind::Deshielding;
    return JoinSplitKind::FullyShielded;
}

std::int64_t pool_delta(const JoinSplitDesc& js) {
    return js.vpub_old.to_zat() - js.vpub_new.to_zat();
}

void validate_batch(const IngestBatch& batch) {
    const BlockRecord* prev = nullptr;
    for (const BlockRecord& block : batch.blocks) {
        if (block.height < 0)
            throw ParseError("negative block height " + std::to_string(block.height));
        if (prev && block.height <= prev->height)
            throw ParseError("non-monotonic heights: " + std::to_string(prev->height) +
                             " followed by " + std::to_string(block.height));

        std::unordered_set<TxId, Hash32Hasher> seen;
        for (std::size_t i = 0; i < block.txs.size(); ++i) {
            const TxRecord& tx = block.txs[i];
            if (tx.is_coinbase && i != 0)
                throw ParseError("block " + std::to_string(block.height) +
                                 ": coinbase is not the first transaction");
            if (!tx.is_coinbase && i == 0)
                throw ParseError("block " + std::to_string(block.height) +
                                 ": first transaction is not the coinbase");
            if (tx.is_coinbase && !tx.inputs.empty())
                throw ParseError("block " + std::to_string(block.height) +
                                 ": coinbase has spendable inputs");
            if (!seen.insert(tx.txid).second)
                throw ParseError("block " + std::to_string(block.height) +
                                 ": duplicate txid " + hash_to_display_hex(tx.txid));
            for (const TxOut& out : tx.outputs) {
                if (out.value.to_zat() > Amount::kMaxMoney)
                    throw ParseError("output value exceeds the coin cap in tx " +
                                     hash_to_display_hex(tx.txid));
            }
        }
        prev = &block;
    }
}

} // namespace zlink
