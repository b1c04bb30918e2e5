#pragma once

#include "zlink/analytics.hpp"
#include "zlink/rtt.hpp"
#include "zlink/store.hpp"
#include "zlink/synth.hpp"

#include <map>
#include <string>
#include <vector>

namespace zlink {

inline constexpr const char* kToolName = "zlink";
inline constexpr const char* kToolVersion = "0.1.0";

struct ReportOptions {
    std::string out_dir;
    bool exact_amounts = false; // default renders whole-coin totals
    std::size_t top_k_fees = 10;
    /// script_id hex -> label, from an address-tag file.
    std::map<std::string, std::string> address_tags;
};

/// RFC-style CSV escaping: quotes fields containing commas, quotes or
/// newlines, doubling embedded quotes.
std::string csv_escape(const std::string& field);

std::map<std::string, std::string> read_address_tags(const std::string& path);

/// census.csv, participation_histogram.dat, pool_series.dat, fee_table.csv
/// plus the analytics sections of summary.md. Returns the file names written.
std::vector<std::string> write_analytics_reports(const Snapshot& snap,
                                                 const ReportOptions& options);

/// rtt_matches.csv, rtt_time_buckets.csv, rtt_topn.csv, fee1_table.csv,
/// fee2_table.csv plus a full summary.md (analytics + detection sections).
std::vector<std::string> write_rtt_reports(const Snapshot& snap, const RttReport& report,
                                           const ReportOptions& options);

void write_eval_report(const std::string& path, const EvalScore& score);

} // namespace zlink
