#pragma once

#include "zlink/chain.hpp"
#include "zlink/store.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace zlink {

struct BlockParticipation {
    std::int64_t height = 0;
    std::uint64_t tx_count = 0;
    std::uint64_t tx_with_joinsplit_count = 0;
};

struct ParticipationReport {
    std::vector<BlockParticipation> rows;
    /// Histogram over floor(percent), 1-point buckets 0..100. Blocks with no
    /// transactions count in the zero bucket.
    std::array<std::uint64_t, 101> histogram{};
};

/// Per-block JoinSplit participation. Throws StoreError on an empty chain.
ParticipationReport block_participation(const Snapshot& snap);

struct CensusReport {
    bool empty_chain = true;
    std::uint64_t total_blocks = 0;
    std::uint64_t blocks_without_joinsplit_tx = 0;
    std::uint64_t total_txs = 0;
    std::uint64_t txs_with_joinsplit = 0;
    std::uint64_t total_joinsplits = 0;
    /// Indexed by JoinSplitKind.
    std::array<std::uint64_t, 4> kind_counts{};
    Amount total_shielded_inflow;  // sum of vpub_old over all JoinSplits
    Amount total_shielded_outflow; // sum of vpub_new over all JoinSplits

    std::uint64_t kind_count(JoinSplitKind k) const {
        return kind_counts[static_cast<std::size_t>(k)];
    }
};

CensusReport census(const Snapshot& snap);

struct PoolSeriesPoint {
    std::int64_t height = 0;
    std::int64_t shielded_pool = 0; // signed zatoshi
    Amount total_supply;
};

struct PoolSeries {
    std::vector<PoolSeriesPoint> rows;
    std::int64_t final_pool = 0;
    Amount final_supply;
    /// Mean of per-block pool share, in thousandths of a percent
    /// (fixed-point so report rendering never depends on float formatting).
    std::int64_t average_share_milli_pct = 0;
    std::int64_t final_share_milli_pct = 0;
};

/// Running shielded-pool size vs. total supply. Supply is derived from
/// observed coinbase outputs, not a subsidy schedule.
PoolSeries pool_series(const Snapshot& snap);

/// Fee identity: resolved inputs + vpub_new - outputs - vpub_old.
/// nullopt when any input is unresolved. Throws StoreError when called on a
/// coinbase transaction or when the data implies a negative fee.
std::optional<Amount> fee_of(const Snapshot& snap, const TxRecord& tx);

struct FeeHistogram {
    std::map<std::int64_t, std::uint64_t> counts; // fee zatoshi -> tx count
    std::uint64_t known_fee_txs = 0;
    std::uint64_t unknown_fee_txs = 0; // non-coinbase with unresolved inputs
};

struct FeeTableRow {
    std::int64_t fee_zat = 0;
    std::uint64_t count = 0;
};

FeeHistogram fee_histogram(const Snapshot& snap);

/// Rows ordered by descending count (ties by ascending fee); k = 0 means all.
std::vector<FeeTableRow> top_fees(const FeeHistogram& hist, std::size_t k);

/// Exact-rational percentage rendered to one decimal place ("31.5").
/// A zero denominator renders "0.0".
std::string render_percent(std::uint64_t numerator, std::uint64_t denominator);

/// Thousandths of a percent as a one-decimal percentage string.
std::string render_milli_pct(std::int64_t milli_pct);

} // namespace zlink
