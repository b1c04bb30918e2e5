#include "zlink/rtt.hpp"

#include "zlink/error.hpp"

#include <algorithm>
#include <set>

namespace zlink {

namespace {

JsLocator locate(const Snapshot& snap, const JsRef& ref) {
    const TxRecord& tx = snap.tx_of(ref);
    return JsLocator{tx.txid, ref.js_index, ref.height, snap.time_of(ref)};
}

std::int64_t minutes_between(std::int64_t t1, std::int64_t t2) {
    if (t2 <= t1) return 0;
    return (t2 - t1) / 60;
}

RttMatch make_match(const Snapshot& snap, const JsRef& shield, const JsRef& deshield,
                    Amount amount, MatchKind kind, const FeeSum* fee) {
    RttMatch m;
    m.shield = locate(snap, shield);
    m.deshield = locate(snap, deshield);
    m.amount = amount;
    m.kind = kind;
    if (fee) {
        m.fee_adjustment = fee->total;
        m.fee_parts = fee->parts;
    }
    m.delta_blocks = m.deshield.height - m.shield.height;
    m.delta_minutes = minutes_between(m.shield.time, m.deshield.time);
    return m;
}

} // namespace

const char* to_string(MatchKind kind) {
    switch (kind) {
        case MatchKind::Exact: return "exact";
        case MatchKind::Fee1: return "fee1";
        case MatchKind::Fee2: return "fee2";
    }
    return "?";
}

bool match_order(const RttMatch& a, const RttMatch& b) {
    if (a.shield.height != b.shield.height) return a.shield.height < b.shield.height;
    if (a.amount != b.amount) return a.amount < b.amount;
    return a.fee_adjustment < b.fee_adjustment;
}

std::vector<RttMatch> find_exact_rtts(const Snapshot& snap) {
    std::vector<RttMatch> matches;

    for (const auto& [amount_zat, shields] : snap.shieldings_by_amount()) {
        std::span<const JsRef> deshields = snap.deshieldings_with_amount(amount_zat);
        if (deshields.empty()) continue;

        // count (shield, later deshield) pairs; bail as soon as two exist
        std::size_t pair_count = 0;
        const JsRef* only_shield = nullptr;
        const JsRef* only_deshield = nullptr;
        std::size_t s = 0;
        for (const JsRef& d : deshields) {
            while (s < shields.size() && shields[s].height < d.height) ++s;
            if (s == 0) continue;
            pair_count += s;
            if (pair_count > 1) break;
            only_shield = &shields[0];
            only_deshield = &d;
        }
        if (pair_count != 1) continue;

        matches.push_back(make_match(snap, *only_shield, *only_deshield,
                                     Amount::zat(amount_zat), MatchKind::Exact, nullptr));
    }

    std::sort(matches.begin(), matches.end(), match_order);
    return matches;
}

FeeSumSet enumerate_fee_sums(const std::vector<Amount>& base_fees, int k) {
    if (base_fees.empty()) throw ConfigError("fee enumeration requires at least one base fee");
    if (k != 1 && k != 2) throw ConfigError("fee enumeration supports k = 1 or 2");
    std::set<Amount> distinct;
    for (Amount fee : base_fees) {
        if (fee.to_zat() <= 0) throw ConfigError("base fees must be positive");
        if (!distinct.insert(fee).second) throw ConfigError("base fees must be distinct");
    }

    FeeSumSet out;
    out.base_fees = base_fees;
    out.k = k;

    if (k == 1) {
        for (Amount fee : base_fees) out.sums.push_back({fee, {fee}});
        return out;
    }

    std::vector<FeeSum> pairs;
    for (std::size_t i = 0; i < base_fees.size(); ++i) {
        for (std::size_t j = i; j < base_fees.size(); ++j) {
            Amount total = base_fees[i] + base_fees[j];
            if (distinct.count(total)) continue; // sums that collide with a common fee
            Amount lo = std::min(base_fees[i], base_fees[j]);
            Amount hi = std::max(base_fees[i], base_fees[j]);
            pairs.push_back({total, {lo, hi}});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const FeeSum& a, const FeeSum& b) {
        if (a.total != b.total) return a.total > b.total;
        return a.parts < b.parts;
    });
    // when two distinct part pairs reach the same total, keep one row
    for (const FeeSum& p : pairs) {
        if (!out.sums.empty() && out.sums.back().total == p.total) continue;
        out.sums.push_back(p);
    }
    return out;
}

std::vector<RttMatch> find_fee_adjusted_rtts(const Snapshot& snap, const FeeSumSet& fee_sums,
                                             const FeeAdjustedOptions& options,
                                             const std::vector<RttMatch>& exact_matches) {
    if (options.window_hours <= 0) throw ConfigError("fee-adjusted window must be positive");
    const std::int64_t window_seconds = options.window_hours * 3600;
    MatchKind kind = fee_sums.k == 1 ? MatchKind::Fee1 : MatchKind::Fee2;

    // JoinSplits consumed by exact matches, by (txid, js_index)
    std::set<std::pair<TxId, std::uint32_t>> consumed;
    if (options.exclude_exact_consumed) {
        for (const RttMatch& m : exact_matches) {
            consumed.insert({m.shield.txid, m.shield.js_index});
            consumed.insert({m.deshield.txid, m.deshield.js_index});
        }
    }
    auto is_consumed = [&](const JsRef& ref) {
        if (consumed.empty()) return false;
        return consumed.count({snap.tx_of(ref).txid, ref.js_index}) > 0;
    };

    std::vector<RttMatch> matches;
    for (const auto& [amount_zat, shields] : snap.shieldings_by_amount()) {
        for (const FeeSum& fee : fee_sums.sums) {
            if (fee.total.to_zat() >= amount_zat) continue;
            std::int64_t target = amount_zat - fee.total.to_zat();
            std::span<const JsRef> deshields = snap.deshieldings_with_amount(target);
            if (deshields.empty()) continue;

            std::size_t pair_count = 0;
            const JsRef* only_shield = nullptr;
            const JsRef* only_deshield = nullptr;
            for (const JsRef& s : shields) {
                if (is_consumed(s)) continue;
                std::int64_t s_time = snap.time_of(s);
                for (const JsRef& d : deshields) {
                    if (d.height <= s.height) continue;
                    if (snap.time_of(d) - s_time > window_seconds) continue;
                    if (is_consumed(d)) continue;
                    ++pair_count;
                    if (pair_count > 1) break;
                    only_shield = &s;
                    only_deshield = &d;
                }
                if (pair_count > 1) break;
            }
            if (pair_count != 1) continue;

            matches.push_back(make_match(snap, *only_shield, *only_deshield,
                                         Amount::zat(amount_zat), kind, &fee));
        }
    }

    std::sort(matches.begin(), matches.end(), match_order);
    return matches;
}

std::array<TimeBucketRow, 7> bucket_by_time(const std::vector<RttMatch>& matches) {
    std::array<TimeBucketRow, 7> rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].lo = kTimeBucketEdges[i];
        rows[i].hi = i + 1 < rows.size() ? kTimeBucketEdges[i + 1] : -1;
        rows[i].label = "[" + std::to_string(rows[i].lo) + ", " +
                        (rows[i].hi < 0 ? std::string("∞") : std::to_string(rows[i].hi)) + ")";
    }
    for (const RttMatch& m : matches) {
        std::size_t i = rows.size() - 1;
        while (i > 0 && m.delta_minutes < kTimeBucketEdges[i]) --i;
        ++rows[i].count;
        rows[i].coin_sum += m.amount;
    }
    return rows;
}

std::vector<TopNRow> top_n_coverage(const Snapshot& snap, const std::vector<RttMatch>& matches,
                                    const std::vector<std::size_t>& n_values) {
    if (n_values.empty()) throw ConfigError("top-N coverage requires at least one N");

    struct Entry {
        std::int64_t amount_zat;
        JsRef ref;
        TxId txid;
    };
    std::vector<Entry> shieldings;
    for (const auto& [amount_zat, refs] : snap.shieldings_by_amount())
        for (const JsRef& ref : refs) shieldings.push_back({amount_zat, ref, snap.tx_of(ref).txid});

    std::sort(shieldings.begin(), shieldings.end(), [](const Entry& a, const Entry& b) {
        if (a.amount_zat != b.amount_zat) return a.amount_zat > b.amount_zat;
        if (a.ref.height != b.ref.height) return a.ref.height < b.ref.height;
        int c = compare_display(a.txid, b.txid);
        if (c != 0) return c < 0;
        return a.ref.js_index < b.ref.js_index;
    });

    std::set<std::pair<TxId, std::uint32_t>> matched_shields;
    for (const RttMatch& m : matches)
        matched_shields.insert({m.shield.txid, m.shield.js_index});

    std::vector<TopNRow> rows;
    for (std::size_t n : n_values) {
        TopNRow row;
        row.n_requested = n;
        row.n_used = std::min(n, shieldings.size());
        for (std::size_t i = 0; i < row.n_used; ++i) {
            const Entry& e = shieldings[i];
            if (matched_shields.count({e.txid, e.ref.js_index})) {
                ++row.matched;
                row.coin_sum += Amount::zat(e.amount_zat);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string RttReport::matched_share_percent() const {
    return render_percent(static_cast<std::uint64_t>(matched_coin_total.to_zat()),
                          static_cast<std::uint64_t>(shielded_inflow_total.to_zat()));
}

std::string RttReport::exact_within_two_hours_percent() const {
    return render_percent(exact_within_two_hours, exact_count);
}

RttReport build_report(const Snapshot& snap, const std::vector<RttMatch>& exact,
                       const std::vector<RttMatch>& fee_adjusted, const FeeSumSet& fee1_set,
                       const FeeSumSet& fee2_set, const std::vector<std::size_t>& top_n_values) {
    RttReport report;

    std::vector<RttMatch> fee1, fee2;
    for (const RttMatch& m : fee_adjusted)
        (m.kind == MatchKind::Fee1 ? fee1 : fee2).push_back(m);

    report.matches = exact;
    report.matches.insert(report.matches.end(), fee_adjusted.begin(), fee_adjusted.end());
    std::sort(report.matches.begin(), report.matches.end(), match_order);

    report.exact_count = exact.size();
    report.fee1_count = fee1.size();
    report.fee2_count = fee2.size();
    for (const RttMatch& m : exact) {
        report.exact_coin_total += m.amount;
        if (m.delta_minutes < 120) ++report.exact_within_two_hours;
    }
    for (const RttMatch& m : fee1) report.fee1_coin_total += m.amount;
    for (const RttMatch& m : fee2) report.fee2_coin_total += m.amount;
    report.matched_coin_total =
        report.exact_coin_total + report.fee1_coin_total + report.fee2_coin_total;

    report.shielded_inflow_total = census(snap).total_shielded_inflow;

    report.buckets_exact = bucket_by_time(exact);
    report.buckets_fee1 = bucket_by_time(fee1);
    report.buckets_fee2 = bucket_by_time(fee2);
    report.top_n = top_n_coverage(snap, exact, top_n_values);

    auto breakdown = [](const FeeSumSet& set, const std::vector<RttMatch>& matches) {
        std::vector<FeeBreakdownRow> rows;
        for (const FeeSum& fee : set.sums) {
            FeeBreakdownRow row;
            row.fee = fee;
            for (const RttMatch& m : matches) {
                if (m.fee_adjustment == fee.total) {
                    ++row.count;
                    row.coin_sum += m.amount;
                }
            }
            rows.push_back(row);
        }
        return rows;
    };
    report.fee1_rows = breakdown(fee1_set, fee1);
    report.fee2_rows = breakdown(fee2_set, fee2);

    return report;
}

std::vector<Amount> default_base_fees() {
    return {Amount::zat(10000), Amount::zat(100000), Amount::zat(20000), Amount::zat(9000),
            Amount::zat(5000)};
}

} // namespace zlink
