#pragma once

#include "zlink/amount.hpp"
#include "zlink/analytics.hpp"
#include "zlink/store.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace zlink {

enum class MatchKind { Exact, Fee1, Fee2 };

const char* to_string(MatchKind kind);

/// One side of a detected pair.
struct JsLocator {
    TxId txid{};
    std::uint32_t js_index = 0;
    std::int64_t height = 0;
    std::int64_t time = 0;

    friend bool operator==(const JsLocator&, const JsLocator&) = default;
};

/// A detected round-trip pair: a shielding JoinSplit and a later deshielding
/// JoinSplit linked by amount, possibly minus a fee adjustment.
struct RttMatch {
    JsLocator shield;
    JsLocator deshield;
    Amount amount;          // the vpub_old side
    Amount fee_adjustment;  // zero for exact matches
    std::vector<Amount> fee_parts;
    MatchKind kind = MatchKind::Exact;
    std::int64_t delta_blocks = 0;  // always >= 1
    std::int64_t delta_minutes = 0; // floor of wall-clock delta, clamped at 0

    friend bool operator==(const RttMatch&, const RttMatch&) = default;
};

/// Canonical output order: shield height, then amount, then fee adjustment.
bool match_order(const RttMatch& a, const RttMatch& b);

/// Exact round-trip detection: for each distinct amount a > 0 the candidate
/// set is every (shielding, later deshielding) pair with that amount; a match
/// is emitted only when exactly one such pair exists over the whole chain.
std::vector<RttMatch> find_exact_rtts(const Snapshot& snap);

/// A fee total together with the base fees it is composed of.
struct FeeSum {
    Amount total;
    std::vector<Amount> parts; // 1 or 2 entries, ascending

    friend bool operator==(const FeeSum&, const FeeSum&) = default;
};

struct FeeSumSet {
    std::vector<Amount> base_fees;
    int k = 1;
    std::vector<FeeSum> sums; // k=1: base-fee order; k=2: descending by total
};

/// k=1: the base fees themselves. k=2: totals of all multiset pairs of base
/// fees, excluding totals that collide with a base fee.
FeeSumSet enumerate_fee_sums(const std::vector<Amount>& base_fees, int k);

struct FeeAdjustedOptions {
    std::int64_t window_hours = 24;
    /// When set, JoinSplits consumed by exact matches cannot participate.
    bool exclude_exact_consumed = true;
};

/// Fee-adjusted detection: vpub_new = vpub_old - f for one of the fee sums,
/// pairs within the time window, exactly one candidate pair per (amount, f).
std::vector<RttMatch> find_fee_adjusted_rtts(const Snapshot& snap, const FeeSumSet& fee_sums,
                                             const FeeAdjustedOptions& options,
                                             const std::vector<RttMatch>& exact_matches);

inline constexpr std::array<std::int64_t, 7> kTimeBucketEdges = {0, 5, 15, 30, 60, 120, 1440};

struct TimeBucketRow {
    std::string label;       // "[0, 5)" ... "[1440, ∞)"
    std::int64_t lo = 0;
    std::int64_t hi = -1;    // -1 = unbounded
    std::uint64_t count = 0;
    Amount coin_sum;
};

std::array<TimeBucketRow, 7> bucket_by_time(const std::vector<RttMatch>& matches);

struct TopNRow {
    std::size_t n_requested = 0;
    std::size_t n_used = 0; // saturates at the number of shielding JoinSplits
    std::uint64_t matched = 0;
    Amount coin_sum; // sum of the matched members' vpub_old
};

/// For each N: the N largest shielding JoinSplits by vpub_old (ties broken by
/// height, then txid, then js_index), how many are the shield side of a
/// match, and the sum of those members' amounts.
std::vector<TopNRow> top_n_coverage(const Snapshot& snap, const std::vector<RttMatch>& matches,
                                    const std::vector<std::size_t>& n_values);

struct FeeBreakdownRow {
    FeeSum fee;
    std::uint64_t count = 0;
    Amount coin_sum;
};

struct RttReport {
    std::vector<RttMatch> matches; // exact + fee-adjusted, canonical order
    std::uint64_t exact_count = 0;
    std::uint64_t fee1_count = 0;
    std::uint64_t fee2_count = 0;
    Amount exact_coin_total;
    Amount fee1_coin_total;
    Amount fee2_coin_total;
    Amount matched_coin_total;
    Amount shielded_inflow_total;
    std::array<TimeBucketRow, 7> buckets_exact;
    std::array<TimeBucketRow, 7> buckets_fee1;
    std::array<TimeBucketRow, 7> buckets_fee2;
    std::vector<TopNRow> top_n; // over exact matches
    std::vector<FeeBreakdownRow> fee1_rows;
    std::vector<FeeBreakdownRow> fee2_rows;
    std::uint64_t exact_within_two_hours = 0;

    std::string matched_share_percent() const;
    std::string exact_within_two_hours_percent() const;
};

RttReport build_report(const Snapshot& snap, const std::vector<RttMatch>& exact,
                       const std::vector<RttMatch>& fee_adjusted, const FeeSumSet& fee1_set,
                       const FeeSumSet& fee2_set, const std::vector<std::size_t>& top_n_values);

/// Default base fees: the five historically most common transaction fees
/// (0.0001, 0.001, 0.0002, 0.00009, 0.00005 coins, most common first).
std::vector<Amount> default_base_fees();

inline constexpr std::array<std::size_t, 5> kDefaultTopN = {10, 50, 250, 500, 1000};

} // namespace zlink
