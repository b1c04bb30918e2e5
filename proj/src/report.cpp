#include "zlink/report.hpp"

#include "zlink/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace zlink {

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name,
                       std::vector<std::string>* written) {
    std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write report file " + path.string());
    if (written) written->push_back(name);
    return out;
}

void version_line(std::ostream& out) {
    out << "# generated by " << kToolName << " " << kToolVersion << "\n";
}

std::string render_total(std::int64_t zat, const ReportOptions& options) {
    return options.exact_amounts ? zat_to_coins(zat) : zat_to_whole_coins(zat);
}

std::string tags_for_scripts(const std::vector<std::string>& script_hexes,
                             const ReportOptions& options) {
    if (options.address_tags.empty()) return "";
    std::string out;
    for (const std::string& hex : script_hexes) {
        auto it = options.address_tags.find(hex);
        if (it == options.address_tags.end()) continue;
        if (!out.empty()) out += ';';
        out += it->second;
    }
    return out;
}

/// Labels of tagged scripts funding the shield transaction's transparent
/// inputs (the visible source side of the round trip).
std::string shield_source_tags(const Snapshot& snap, const RttMatch& m,
                               const ReportOptions& options) {
    if (options.address_tags.empty()) return "";
    auto loc = snap.find_tx(m.shield.txid);
    if (!loc) return "";
    std::vector<std::string> scripts;
    for (const TxIn& in : snap.tx_at(*loc).inputs) {
        auto prev = snap.find_tx(in.prev_txid);
        if (!prev) continue;
        const TxRecord& funding = snap.tx_at(*prev);
        if (in.prev_vout < funding.outputs.size())
            scripts.push_back(to_hex(funding.outputs[in.prev_vout].script_id));
    }
    return tags_for_scripts(scripts, options);
}

/// Labels of tagged scripts receiving the deshield transaction's outputs.
std::string deshield_dest_tags(const Snapshot& snap, const RttMatch& m,
                               const ReportOptions& options) {
    if (options.address_tags.empty()) return "";
    auto loc = snap.find_tx(m.deshield.txid);
    if (!loc) return "";
    std::vector<std::string> scripts;
    for (const TxOut& out : snap.tx_at(*loc).outputs) scripts.push_back(to_hex(out.script_id));
    return tags_for_scripts(scripts, options);
}

std::string fee_parts_str(const std::vector<Amount>& parts) {
    std::string out;
    for (Amount part : parts) {
        if (!out.empty()) out += '+';
        out += part.coins();
    }
    return out;
}

void write_census_csv(const Snapshot& snap, const CensusReport& report,
                      const ReportOptions& options, std::vector<std::string>* written) {
    std::ofstream out = open_out(options.out_dir, "census.csv", written);
    version_line(out);
    out << "metric,count,percent\n";
    out << "blocks," << report.total_blocks << ",\n";
    out << "blocks_without_joinsplit_tx," << report.blocks_without_joinsplit_tx << ","
        << render_percent(report.blocks_without_joinsplit_tx, report.total_blocks) << "\n";
    out << "transactions," << report.total_txs << ",\n";
    out << "transactions_with_joinsplit," << report.txs_with_joinsplit << ","
        << render_percent(report.txs_with_joinsplit, report.total_txs) << "\n";
    out << "joinsplits," << report.total_joinsplits << ",\n";
    for (JoinSplitKind kind : {JoinSplitKind::Shielding, JoinSplitKind::Deshielding,
                               JoinSplitKind::FullyShielded, JoinSplitKind::Mixed}) {
        out << "joinsplit_" << to_string(kind) << "," << report.kind_count(kind) << ","
            << render_percent(report.kind_count(kind), report.total_joinsplits) << "\n";
    }
    out << "shielded_inflow_coins," << render_total(report.total_shielded_inflow.to_zat(), options)
        << ",\n";
    (void)snap;
}

void write_participation_dat(const ParticipationReport& report, const ReportOptions& options,
                             std::vector<std::string>* written) {
    std::ofstream out = open_out(options.out_dir, "participation_histogram.dat", written);
    version_line(out);
    out << "# percent_bucket blocks\n";
    for (std::size_t i = 0; i < report.histogram.size(); ++i)
        out << i << ' ' << report.histogram[i] << '\n';
}

void write_pool_series_dat(const PoolSeries& series, const ReportOptions& options,
                           std::vector<std::string>* written) {
    std::ofstream out = open_out(options.out_dir, "pool_series.dat", written);
    version_line(out);
    out << "# height shielded_pool total_supply\n";
    for (const PoolSeriesPoint& row : series.rows) {
        out << row.height << ' ' << render_total(row.shielded_pool, options) << ' '
            << render_total(row.total_supply.to_zat(), options) << '\n';
    }
}

void write_fee_table_csv(const FeeHistogram& hist, const ReportOptions& options,
                         std::vector<std::string>* written) {
    std::ofstream out = open_out(options.out_dir, "fee_table.csv", written);
    version_line(out);
    out << "fee,tx_count,percent\n";
    for (const FeeTableRow& row : top_fees(hist, 0)) {
        out << zat_to_coins(row.fee_zat) << ',' << row.count << ','
            << render_percent(row.count, hist.known_fee_txs) << '\n';
    }
}

void summary_analytics_section(std::ostream& out, const Snapshot& snap,
                               const CensusReport& censusr, const PoolSeries& pool,
                               const FeeHistogram& fees, const ReportOptions& options) {
    out << "## Chain\n\n";
    out << "- blocks: " << censusr.total_blocks << " (heights " << snap.first_height() << ".."
        << snap.tip_height() << ")\n";
    out << "- transactions: " << censusr.total_txs << "\n";
    out << "- joinsplits: " << censusr.total_joinsplits << "\n\n";

    out << "## JoinSplit census\n\n";
    out << "- transactions with a JoinSplit: " << censusr.txs_with_joinsplit << " ("
        << render_percent(censusr.txs_with_joinsplit, censusr.total_txs) << "%)\n";
    out << "- blocks without a JoinSplit transaction: " << censusr.blocks_without_joinsplit_tx
        << " (" << render_percent(censusr.blocks_without_joinsplit_tx, censusr.total_blocks)
        << "%)\n";
    for (JoinSplitKind kind : {JoinSplitKind::Shielding, JoinSplitKind::Deshielding,
                               JoinSplitKind::FullyShielded, JoinSplitKind::Mixed}) {
        out << "- " << to_string(kind) << " joinsplits: " << censusr.kind_count(kind) << " ("
            << render_percent(censusr.kind_count(kind), censusr.total_joinsplits) << "%)\n";
    }
    out << "- total shielded inflow: "
        << render_total(censusr.total_shielded_inflow.to_zat(), options) << " coins\n\n";

    out << "## Shielded pool\n\n";
    out << "- final pool: " << render_total(pool.final_pool, options) << " of "
        << render_total(pool.final_supply.to_zat(), options) << " coins ("
        << render_milli_pct(pool.final_share_milli_pct) << "%)\n";
    out << "- average per-block pool share: " << render_milli_pct(pool.average_share_milli_pct)
        << "%\n\n";

    out << "## Fees\n\n";
    out << "- non-coinbase transactions with known fee: " << fees.known_fee_txs << "\n";
    out << "- fee unknown (unresolved inputs): " << fees.unknown_fee_txs << "\n\n";
    std::vector<FeeTableRow> top = top_fees(fees, options.top_k_fees);
    if (!top.empty()) {
        out << "| fee | txs | % |\n|---|---|---|\n";
        for (const FeeTableRow& row : top) {
            out << "| " << zat_to_coins(row.fee_zat) << " | " << row.count << " | "
                << render_percent(row.count, fees.known_fee_txs) << " |\n";
        }
        out << "\n";
    }
}

void write_bucket_csv(std::ostream& out, const RttReport& report,
                      const ReportOptions& options) {
    out << "bucket_minutes,exact_count,exact_coins,fee1_count,fee1_coins,fee2_count,fee2_coins\n";
    for (std::size_t i = 0; i < report.buckets_exact.size(); ++i) {
        const TimeBucketRow& e = report.buckets_exact[i];
        const TimeBucketRow& f1 = report.buckets_fee1[i];
        const TimeBucketRow& f2 = report.buckets_fee2[i];
        out << csv_escape(e.label) << ',' << e.count << ','
            << render_total(e.coin_sum.to_zat(), options) << ',' << f1.count << ','
            << render_total(f1.coin_sum.to_zat(), options) << ',' << f2.count << ','
            << render_total(f2.coin_sum.to_zat(), options) << '\n';
    }
}

} // namespace

std::string csv_escape(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::map<std::string, std::string> read_address_tags(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read address tag file " + path);
    std::map<std::string, std::string> tags;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("script_id,", 0) == 0) continue; // header
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("tag file line " + std::to_string(line_no) +
                             ": expected script_id,label");
        tags[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return tags;
}

std::vector<std::string> write_analytics_reports(const Snapshot& snap,
                                                 const ReportOptions& options) {
    if (snap.empty()) throw StoreError("analytics reports require a non-empty store");
    std::filesystem::create_directories(options.out_dir);
    std::vector<std::string> written;

    CensusReport censusr = census(snap);
    ParticipationReport participation = block_participation(snap);
    PoolSeries pool = pool_series(snap);
    FeeHistogram fees = fee_histogram(snap);

    write_census_csv(snap, censusr, options, &written);
    write_participation_dat(participation, options, &written);
    write_pool_series_dat(pool, options, &written);
    write_fee_table_csv(fees, options, &written);

    std::ofstream out = open_out(options.out_dir, "summary.md", &written);
    out << "# " << kToolName << " report\n\n";
    summary_analytics_section(out, snap, censusr, pool, fees, options);
    out << "Run the `rtt` command to add round-trip detection results.\n\n";
    out << "<!-- generated by " << kToolName << " " << kToolVersion << " -->\n";
    return written;
}

std::vector<std::string> write_rtt_reports(const Snapshot& snap, const RttReport& report,
                                           const ReportOptions& options) {
    std::filesystem::create_directories(options.out_dir);
    std::vector<std::string> written;

    {
        std::ofstream out = open_out(options.out_dir, "rtt_matches.csv", &written);
        version_line(out);
        out << "kind,amount,fee_adjustment,fee_parts,shield_txid,shield_js,shield_height,"
               "shield_time,deshield_txid,deshield_js,deshield_height,deshield_time,"
               "delta_blocks,delta_minutes,shield_source_tags,deshield_dest_tags\n";
        for (const RttMatch& m : report.matches) {
            out << to_string(m.kind) << ',' << m.amount.coins() << ','
                << m.fee_adjustment.coins() << ',' << fee_parts_str(m.fee_parts) << ','
                << hash_to_display_hex(m.shield.txid) << ',' << m.shield.js_index << ','
                << m.shield.height << ',' << m.shield.time << ','
                << hash_to_display_hex(m.deshield.txid) << ',' << m.deshield.js_index << ','
                << m.deshield.height << ',' << m.deshield.time << ',' << m.delta_blocks << ','
                << m.delta_minutes << ',' << csv_escape(shield_source_tags(snap, m, options))
                << ',' << csv_escape(deshield_dest_tags(snap, m, options)) << '\n';
        }
    }
    {
        std::ofstream out = open_out(options.out_dir, "rtt_time_buckets.csv", &written);
        version_line(out);
        write_bucket_csv(out, report, options);
    }
    {
        std::ofstream out = open_out(options.out_dir, "rtt_topn.csv", &written);
        version_line(out);
        out << "top_n,matched,coins\n";
        for (const TopNRow& row : report.top_n) {
            out << row.n_requested << ',' << row.matched << ','
                << render_total(row.coin_sum.to_zat(), options) << '\n';
        }
    }
    auto fee_table = [&](const char* name, const std::vector<FeeBreakdownRow>& rows) {
        std::ofstream out = open_out(options.out_dir, name, &written);
        version_line(out);
        out << "fee,fee_parts,rtt_count,coins\n";
        for (const FeeBreakdownRow& row : rows) {
            out << row.fee.total.coins() << ',' << fee_parts_str(row.fee.parts) << ',' << row.count
                << ',' << render_total(row.coin_sum.to_zat(), options) << '\n';
        }
    };
    fee_table("fee1_table.csv", report.fee1_rows);
    fee_table("fee2_table.csv", report.fee2_rows);

    // summary.md gets both the analytics and the detection sections, so the
    // file is complete after the rtt stage of the pipeline
    CensusReport censusr = census(snap);
    PoolSeries pool = pool_series(snap);
    FeeHistogram fees = fee_histogram(snap);
    std::ofstream out = open_out(options.out_dir, "summary.md", &written);
    out << "# " << kToolName << " report\n\n";
    summary_analytics_section(out, snap, censusr, pool, fees, options);

    out << "## Round-trip transactions\n\n";
    out << "- exact matches: " << report.exact_count << " ("
        << render_total(report.exact_coin_total.to_zat(), options) << " coins)\n";
    out << "- 1-fee matches: " << report.fee1_count << " ("
        << render_total(report.fee1_coin_total.to_zat(), options) << " coins)\n";
    out << "- 2-fee matches: " << report.fee2_count << " ("
        << render_total(report.fee2_coin_total.to_zat(), options) << " coins)\n";
    out << "- matched coins: " << render_total(report.matched_coin_total.to_zat(), options)
        << " of " << render_total(report.shielded_inflow_total.to_zat(), options)
        << " entering the pool (" << report.matched_share_percent() << "%)\n";
    out << "- exact matches within two hours: " << report.exact_within_two_hours << " ("
        << report.exact_within_two_hours_percent() << "%)\n\n";

    out << "| Δ block time (min) | exact | Σ coins |\n|---|---|---|\n";
    for (const TimeBucketRow& row : report.buckets_exact) {
        out << "| " << row.label << " | " << row.count << " | "
            << render_total(row.coin_sum.to_zat(), options) << " |\n";
    }
    out << "\n| top n | matched | Σ coins |\n|---|---|---|\n";
    for (const TopNRow& row : report.top_n) {
        out << "| " << row.n_requested << " | " << row.matched << " | "
            << render_total(row.coin_sum.to_zat(), options) << " |\n";
    }
    out << "\n<!-- generated by " << kToolName << " " << kToolVersion << " -->\n";
    return written;
}

void write_eval_report(const std::string& path, const EvalScore& score) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write eval report " + path);
    version_line(out);
    out << "metric,value\n";
    out << "true_positives," << score.true_positives << '\n';
    out << "false_positives," << score.false_positives << '\n';
    out << "false_negatives," << score.false_negatives << '\n';
    out << "precision," << score.precision_str() << '\n';
    out << "recall," << score.recall_str() << '\n';
    out << "detected_coins," << score.detected_coins.coins() << '\n';
    out << "planted_coins," << score.planted_coins.coins() << '\n';
    out << "detected_coin_share_pct,"
        << render_percent(static_cast<std::uint64_t>(score.detected_coins.to_zat()),
                          static_cast<std::uint64_t>(score.shielded_inflow.to_zat()))
        << '\n';
    out << "planted_coin_share_pct,"
        << render_percent(static_cast<std::uint64_t>(score.planted_coins.to_zat()),
                          static_cast<std::uint64_t>(score.shielded_inflow.to_zat()))
        << '\n';
}

} // namespace zlink
