#include "zlink/analytics.hpp"

#include "zlink/error.hpp"

#include <algorithm>

namespace zlink {

ParticipationReport block_participation(const Snapshot& snap) {
    if (snap.empty()) throw StoreError("block participation requires a non-empty chain");

    ParticipationReport report;
    report.rows.reserve(snap.block_count());
    for (const BlockRecord& block : snap.blocks()) {
        BlockParticipation row;
        row.height = block.height;
        row.tx_count = block.txs.size();
        for (const TxRecord& tx : block.txs)
            if (tx.has_joinsplit()) ++row.tx_with_joinsplit_count;

        std::size_t bucket = 0;
        if (row.tx_count > 0)
            bucket = static_cast<std::size_t>(100 * row.tx_with_joinsplit_count / row.tx_count);
        ++report.histogram[bucket];
        report.rows.push_back(row);
    }
    return report;
}

CensusReport census(const Snapshot& snap) {
    CensusReport report;
    report.empty_chain = snap.empty();
    for (const BlockRecord& block : snap.blocks()) {
        ++report.total_blocks;
        bool block_has_js = false;
        for (const TxRecord& tx : block.txs) {
            ++report.total_txs;
            if (tx.has_joinsplit()) {
                ++report.txs_with_joinsplit;
                block_has_js = true;
            }
            for (const JoinSplitDesc& js : tx.joinsplits) {
                ++report.total_joinsplits;
                ++report.kind_counts[static_cast<std::size_t>(classify_joinsplit(js))];
                report.total_shielded_inflow += js.vpub_old;
                report.total_shielded_outflow += js.vpub_new;
            }
        }
        if (!block_has_js) ++report.blocks_without_joinsplit_tx;
    }
    return report;
}

PoolSeries pool_series(const Snapshot& snap) {
    PoolSeries series;
    series.rows.reserve(snap.block_count());

    std::int64_t pool = 0;
    Amount supply;
    std::int64_t share_milli_sum = 0;
    for (const BlockRecord& block : snap.blocks()) {
        for (const TxRecord& tx : block.txs) {
            if (tx.is_coinbase)
                for (const TxOut& out : tx.outputs) supply += out.value;
            for (const JoinSplitDesc& js : tx.joinsplits) pool += pool_delta(js);
        }
        series.rows.push_back({block.height, pool, supply});
        if (supply.to_zat() > 0)
            share_milli_sum += static_cast<std::int64_t>(
                static_cast<__int128>(pool) * 100000 / supply.to_zat());
    }

    series.final_pool = pool;
    series.final_supply = supply;
    if (!series.rows.empty())
        series.average_share_milli_pct =
            share_milli_sum / static_cast<std::int64_t>(series.rows.size());
    if (supply.to_zat() > 0)
        series.final_share_milli_pct = static_cast<std::int64_t>(
            static_cast<__int128>(pool) * 100000 / supply.to_zat());
    return series;
}

std::optional<Amount> fee_of(const Snapshot& snap, const TxRecord& tx) {
    if (tx.is_coinbase)
        throw StoreError("coinbase transactions do not have fees");

    std::int64_t credit = 0;
    for (const TxIn& in : tx.inputs) {
        std::optional<Amount> value = snap.resolve_input_value(in.prev_txid, in.prev_vout);
        if (!value) return std::nullopt;
        credit += value->to_zat();
    }
    std::int64_t debit = 0;
    for (const TxOut& out : tx.outputs) debit += out.value.to_zat();
    for (const JoinSplitDesc& js : tx.joinsplits) {
        credit += js.vpub_new.to_zat();
        debit += js.vpub_old.to_zat();
    }

    std::int64_t fee = credit - debit;
    if (fee < 0)
        throw StoreError("negative fee in tx " + hash_to_display_hex(tx.txid) +
                         ": inconsistent chain data");
    return Amount::zat(fee);
}

FeeHistogram fee_histogram(const Snapshot& snap) {
    FeeHistogram hist;
    for (const BlockRecord& block : snap.blocks()) {
        for (const TxRecord& tx : block.txs) {
            if (tx.is_coinbase) continue;
            std::optional<Amount> fee = fee_of(snap, tx);
            if (!fee) {
                ++hist.unknown_fee_txs;
                continue;
            }
            ++hist.counts[fee->to_zat()];
            ++hist.known_fee_txs;
        }
    }
    return hist;
}

std::vector<FeeTableRow> top_fees(const FeeHistogram& hist, std::size_t k) {
    std::vector<FeeTableRow> rows;
    rows.reserve(hist.counts.size());
    for (const auto& [fee, count] : hist.counts) rows.push_back({fee, count});
    std::stable_sort(rows.begin(), rows.end(), [](const FeeTableRow& a, const FeeTableRow& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.fee_zat < b.fee_zat;
    });
    if (k > 0 && rows.size() > k) rows.resize(k);
    return rows;
}

std::string render_percent(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) return "0.0";
    // round(1000 * n / d) half up, then one decimal
    auto scaled = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(numerator) * 1000 + denominator / 2) / denominator);
    return std::to_string(scaled / 10) + "." + std::to_string(scaled % 10);
}

std::string render_milli_pct(std::int64_t milli_pct) {
    bool neg = milli_pct < 0;
    std::int64_t v = neg ? -milli_pct : milli_pct;
    std::int64_t scaled = (v + 50) / 100; // thousandths -> tenths, rounded
    std::string out = neg ? "-" : "";
    out += std::to_string(scaled / 10) + "." + std::to_string(scaled % 10);
    return out;
}

} // namespace zlink
