#pragma once

#include "zlink/chain.hpp"
#include "zlink/rtt.hpp"
#include "zlink/wire.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace zlink {

/// Parameters of a synthetic chain. Defaults give a small, RTT-rich chain
/// whose observable statistics sit near the real-chain values.
struct SynthConfig {
    std::uint64_t seed = 1;
    std::int64_t n_blocks = 50;
    std::int64_t start_time = 1'477'000'000;
    std::int64_t block_interval_seconds = 150;
    std::int64_t block_interval_jitter = 30; // uniform +/- seconds, interval stays >= 1

    std::int64_t txs_per_block_min = 1; // non-coinbase
    std::int64_t txs_per_block_max = 8;

    /// Probability that a regular transaction carries a JoinSplit.
    double fraction_tx_with_joinsplit = 0.20;
    /// Probability that a block carries no JoinSplit transactions at all
    /// (scheduled plants override this).
    double joinsplit_free_block_rate = 0.40;
    /// Share of decoy JoinSplits with neither a shielding nor a deshielding
    /// portion (both vpubs zero).
    double fully_shielded_rate = 0.019;

    /// When set, decoy JoinSplit direction steers the pool toward this share
    /// of total supply (e.g. 0.035); otherwise shield/deshield is a coin flip.
    std::optional<double> target_pool_share;

    std::int64_t planted_exact_count = 0;
    std::int64_t planted_fee1_count = 0;
    std::int64_t planted_fee2_count = 0;
    std::int64_t plant_delay_minutes_min = 1;
    std::int64_t plant_delay_minutes_max = 120;
    /// Probability that a planted exact link gets a duplicate shielding of
    /// the same amount, which destroys the match (a deliberate false
    /// negative for evaluation).
    double collision_rate = 0.0;

    std::int64_t amount_min_zat = 10'000;          // 0.0001 coins
    std::int64_t amount_max_zat = 1'000'000'000'000; // 10,000 coins, log-uniform
    std::int64_t plant_amount_max_zat = 1'000'000'000'000;

    std::int64_t block_reward_zat = 10 * Amount::kCoin;

    /// (fee, weight) mix for transaction fees; defaults echo the common-fee
    /// table of the real chain.
    std::vector<std::pair<std::int64_t, double>> fee_mix = {
        {10000, 46.4}, {100000, 3.0}, {20000, 3.0}, {9000, 2.7}, {5000, 2.1}, {0, 1.4},
    };

    std::vector<Amount> base_fees; // empty = default_base_fees()
    std::int64_t fee_window_hours = 24;

    void validate() const;
};

struct PlantedLink {
    TxId shield_txid{};
    std::uint32_t shield_js = 0;
    TxId deshield_txid{};
    std::uint32_t deshield_js = 0;
    MatchKind kind = MatchKind::Exact;
    Amount amount;   // vpub_old of the shield side
    Amount fee;      // zero for exact
    std::vector<Amount> fee_parts;
    bool collided = false; // a duplicate shielding was injected

    friend bool operator==(const PlantedLink&, const PlantedLink&) = default;
};

struct GroundTruth {
    Hash32 chain_tag{}; // genesis block hash
    std::vector<PlantedLink> planted;
    std::uint64_t decoy_joinsplits = 0;
};

/// Deterministic chain generation: the same config yields byte-identical
/// batches. Planted links use chain-unique amounts (uniqueness is enforced
/// across every vpub value in the chain), so with collision_rate = 0 the
/// detector provably recovers each of them.
std::pair<IngestBatch, GroundTruth> generate(const SynthConfig& config);

/// Inserts a new block right after `insert_after_height` containing an extra
/// shielding of `amount` funded by its own coinbase, renumbering later
/// heights. Duplicating a matched amount ahead of its deshielding destroys
/// that exact match.
void inject_duplicate_shielding(IngestBatch& batch, Amount amount,
                                std::int64_t insert_after_height,
                                const WireLayoutConfig& cfg = WireLayoutConfig());

/// Reference detector: literal nested-loop evaluation of the exact-RTT rule
/// with no indexes. Guarded against quadratic blowups; throws ConfigError
/// when the batch exceeds `max_joinsplits` or any amount accumulates more
/// than 100000 candidate pairs.
std::vector<RttMatch> oracle_exact_rtts(const IngestBatch& batch,
                                        std::size_t max_joinsplits = 10'000);

struct EvalScore {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
    Amount detected_coins;
    Amount planted_coins;
    /// Shielded inflow of the chain under evaluation; set by the caller so
    /// detected/planted coin shares can be reported.
    Amount shielded_inflow;

    /// "1.000"-style fixed three-decimal rendering; undefined ratios render
    /// as "1.000" (nothing to find, nothing found wrongly).
    std::string precision_str() const;
    std::string recall_str() const;
    double precision() const;
    double recall() const;
};

/// Pair-level comparison of detected matches against planted links.
EvalScore score(const std::vector<RttMatch>& detected, const GroundTruth& truth);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);

} // namespace zlink
