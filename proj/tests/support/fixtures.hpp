#pragma once

// Shared test fixtures: a hand-built micro-chain with six known round-trip
// pairs, plus small builders and scratch-directory helpers.

#include "zlink/amount.hpp"
#include "zlink/chain.hpp"
#include "zlink/jsonl.hpp"
#include "zlink/sha256.hpp"
#include "zlink/store.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace zlink::testsupport {

inline Hash32 hash_from_tag(const std::string& tag) {
    return sha256(ByteSpan(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()));
}

struct TxBuilder {
    TxRecord tx;

    static TxBuilder coinbase(const std::string& tag) {
        TxBuilder b;
        b.tx.is_coinbase = true;
        b.tx.txid = hash_from_tag("coinbase-" + tag);
        return b;
    }

    static TxBuilder regular(const std::string& txid_display_hex) {
        TxBuilder b;
        b.tx.txid = hash_from_display_hex(txid_display_hex);
        return b;
    }

    static TxBuilder tagged(const std::string& tag) {
        TxBuilder b;
        b.tx.txid = hash_from_tag("tx-" + tag);
        return b;
    }

    TxBuilder& input(const TxId& prev, std::uint32_t vout) {
        tx.inputs.push_back({prev, vout});
        return *this;
    }

    TxBuilder& output(std::int64_t zat, const std::string& script_tag = "") {
        Bytes script;
        for (char c : script_tag) script.push_back(static_cast<std::uint8_t>(c));
        tx.outputs.push_back({Amount::zat(zat), script});
        return *this;
    }

    TxBuilder& joinsplit(std::int64_t vpub_old, std::int64_t vpub_new) {
        tx.joinsplits.push_back({Amount::zat(vpub_old), Amount::zat(vpub_new)});
        return *this;
    }
};

inline BlockRecord make_block(std::int64_t height, std::int64_t time,
                              std::vector<TxRecord> txs) {
    BlockRecord block;
    block.height = height;
    block.time = time;
    block.hash = hash_from_tag("block-" + std::to_string(height));
    block.txs = std::move(txs);
    return block;
}

struct SamplePair {
    std::string shield_txid;
    std::string deshield_txid;
    std::int64_t amount_zat;
    std::int64_t fee_zat;
    std::int64_t delta_minutes;
    const char* bucket_label;
};

/// The published sample pairs: four exact, one 1-fee and one 2-fee.
struct SampleChain {
    IngestBatch batch;
    std::vector<SamplePair> exact;
    SamplePair fee1;
    SamplePair fee2;
};

/// Twelve contiguous blocks carrying the six sample pairs with their exact
/// amounts and block-time deltas. One transaction (9f300ecf...) is the
/// deshield side of two different pairs via two JoinSplits.
inline SampleChain sample_chain() {
    constexpr std::int64_t kT0 = 1'500'000'000;
    constexpr std::int64_t kFee = 10'000; // 0.0001 coins on every sample tx

    const std::string tx_shield_a =
        "a2c9f7ad3b1993c40e692da61966f8633d85cb96c07b8810c6b14493978f2b46";
    const std::string tx_deshield_a =
        "ab3b717b85a64541c6d4bb2da8c0806da9666fa1979e0f640c7f49c44fea3bca";
    const std::string tx_shield_b =
        "d4e0047df31d0e1c8a7d311064314a74c43d0677ffcc430f8d093bb1867dd21b";
    const std::string tx_deshield_b =
        "b63f4948b405b91c28bd59affc06e12aa8e126cb1f101ab36e1114ee882bb0b3";
    const std::string tx_shield_c =
        "a6c87c8e2f20b729a33fec7031b2ead3ec6a001e4aa4c575207c44f2690870e4";
    const std::string tx_shield_d =
        "709e38ab58148f6b2a3eb56621ea502790270386b7c6648baf06a510cf48efaa";
    const std::string tx_deshield_cd =
        "9f300ecfdfb6a8658f34bd469d74f401dd7233d7a610cb91faaeb4a2b3fdc299";
    const std::string tx_shield_f1 =
        "2641aeece9df50c5275b692a20da6f900a1a42440adc454765d7f3e6a1b1aeef";
    const std::string tx_deshield_f1 =
        "4d83b22ab6967c83f11e4cb6f417623c553364ddc5c8d658027356bc28fa6f1a";
    const std::string tx_shield_f2 =
        "84a11d9794e0eb318327dd960b7bfa4e1146855fcb1f0aaf6eb40ceadaf9ecbb";
    const std::string tx_deshield_f2 =
        "855e94b007d66f1ee283374c91b559d02fa397079d6f9b5b9012a668680efd71";

    constexpr std::int64_t kAmountA = 347'951'898'254; // 3479.51898254
    constexpr std::int64_t kAmountB = 1'214'981'195;   // 12.14981195
    constexpr std::int64_t kAmountC = 377'326'919;     // 3.77326919
    constexpr std::int64_t kAmountD = 22'001'805'591;  // 220.01805591
    constexpr std::int64_t kShieldF1 = 67'209'594;     // 0.67209594
    constexpr std::int64_t kDeshieldF1 = 67'199'594;   // 0.67199594 = shield - 0.0001
    constexpr std::int64_t kShieldF2 = 638'050'000;    // 6.3805
    constexpr std::int64_t kDeshieldF2 = 637'940'000;  // 6.3794 = shield - 0.0011

    auto minutes = [](std::int64_t m) { return kT0 + m * 60; };

    // a coinbase funding one shield of `amount` (+ tx fee) in the same block
    auto funded_shield = [&](std::int64_t height, const std::string& txid, std::int64_t amount,
                             std::vector<TxRecord>& txs) {
        TxBuilder cb = TxBuilder::coinbase(std::to_string(height));
        cb.output(500 * Amount::kCoin, "reward").output(amount + kFee, "funding");
        TxBuilder shield = TxBuilder::regular(txid);
        shield.input(cb.tx.txid, 1).joinsplit(amount, 0);
        txs.push_back(cb.tx);
        txs.push_back(shield.tx);
    };
    auto coinbase_only = [&](std::int64_t height) {
        return std::vector<TxRecord>{
            TxBuilder::coinbase(std::to_string(height)).output(500 * Amount::kCoin, "reward").tx};
    };
    auto deshield = [&](const std::string& txid, std::vector<std::int64_t> vpub_news) {
        TxBuilder b = TxBuilder::regular(txid);
        std::int64_t total = 0;
        for (std::int64_t v : vpub_news) {
            b.joinsplit(0, v);
            total += v;
        }
        b.output(total - kFee, "payout");
        return b.tx;
    };

    SampleChain chain;
    auto& blocks = chain.batch.blocks;

    std::vector<TxRecord> txs;

    funded_shield(0, tx_shield_c, kAmountC, txs);
    blocks.push_back(make_block(0, minutes(0), txs));

    txs.clear();
    funded_shield(1, tx_shield_f2, kShieldF2, txs);
    blocks.push_back(make_block(1, minutes(880), txs));

    txs.clear();
    funded_shield(2, tx_shield_a, kAmountA, txs);
    blocks.push_back(make_block(2, minutes(900), txs));

    blocks.push_back(make_block(3, minutes(901), coinbase_only(3)));

    txs = coinbase_only(4);
    txs.push_back(deshield(tx_deshield_a, {kAmountA}));
    blocks.push_back(make_block(4, minutes(902), txs));

    txs.clear();
    funded_shield(5, tx_shield_b, kAmountB, txs);
    blocks.push_back(make_block(5, minutes(905), txs));

    txs = coinbase_only(6);
    txs.push_back(deshield(tx_deshield_b, {kAmountB}));
    blocks.push_back(make_block(6, minutes(908), txs));

    txs.clear();
    funded_shield(7, tx_shield_f1, kShieldF1, txs);
    blocks.push_back(make_block(7, minutes(910), txs));

    txs.clear();
    funded_shield(8, tx_shield_d, kAmountD, txs);
    blocks.push_back(make_block(8, minutes(913), txs));

    txs = coinbase_only(9);
    txs.push_back(deshield(tx_deshield_f2, {kDeshieldF2}));
    blocks.push_back(make_block(9, minutes(915), txs));

    txs = coinbase_only(10);
    txs.push_back(deshield(tx_deshield_f1, {kDeshieldF1}));
    blocks.push_back(make_block(10, minutes(918), txs));

    txs = coinbase_only(11);
    txs.push_back(deshield(tx_deshield_cd, {kAmountC, kAmountD}));
    blocks.push_back(make_block(11, minutes(928), txs));

    chain.exact = {
        {tx_shield_a, tx_deshield_a, kAmountA, 0, 2, "[0, 5)"},
        {tx_shield_b, tx_deshield_b, kAmountB, 0, 3, "[0, 5)"},
        {tx_shield_c, tx_deshield_cd, kAmountC, 0, 928, "[120, 1440)"},
        {tx_shield_d, tx_deshield_cd, kAmountD, 0, 15, "[15, 30)"},
    };
    chain.fee1 = {tx_shield_f1, tx_deshield_f1, kShieldF1, 10'000, 8, "[5, 15)"};
    chain.fee2 = {tx_shield_f2, tx_deshield_f2, kShieldF2, 110'000, 35, "[30, 60)"};
    return chain;
}

inline std::string to_jsonl(const IngestBatch& batch) {
    std::ostringstream out;
    write_jsonl(out, batch);
    return out.str();
}

inline ChainStore store_with(const IngestBatch& batch) {
    ChainStore store;
    store.append_blocks(batch);
    return store;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string templ =
            (std::filesystem::temp_directory_path() / "zlink-test-XXXXXX").string();
        std::vector<char> buf(templ.begin(), templ.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const {
        return (std::filesystem::path(path_) / name).string();
    }

private:
    std::string path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace zlink::testsupport
