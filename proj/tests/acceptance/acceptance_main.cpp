// Acceptance suite: each criterion prints one PASS/FAIL line and the binary
// exits nonzero if any gating criterion fails. --perf adds a measured (but
// non-gating) large-scale detection benchmark.

#include "zlink/analytics.hpp"
#include "zlink/jsonl.hpp"
#include "zlink/rpc.hpp"
#include "zlink/rtt.hpp"
#include "zlink/sha256.hpp"
#include "zlink/store.hpp"
#include "zlink/synth.hpp"
#include "zlink/wire.hpp"

#include "../support/fixtures.hpp"
#include "../support/rpc_fixture.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace zlink;
using namespace zlink::testsupport;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Check {
    std::string name;
    std::function<Outcome()> run;
    double budget_seconds = 0; // 0 = untimed
};

Outcome pass(std::string detail = "") { return {true, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, std::move(detail)}; }

// ---- criterion: fee-sum enumeration --------------------------------------

Outcome check_fee_sum_enumeration() {
    FeeSumSet set = enumerate_fee_sums(default_base_fees(), 2);

    const std::vector<std::string> expected = {
        "0.002",   "0.0012",  "0.0011",  "0.00109", "0.00105", "0.0004", "0.0003",
        "0.00029", "0.00025", "0.00019", "0.00018", "0.00015", "0.00014",
    };
    if (set.sums.size() != expected.size())
        return fail("expected 13 totals, got " + std::to_string(set.sums.size()));

    std::set<std::string> got, want(expected.begin(), expected.end());
    for (const FeeSum& sum : set.sums) got.insert(sum.total.coins());
    if (got != want) {
        std::string detail = "set mismatch:";
        for (const std::string& v : got)
            if (!want.count(v)) detail += " unexpected " + v;
        for (const std::string& v : want)
            if (!got.count(v)) detail += " missing " + v;
        return fail(detail);
    }
    // the two collision exclusions
    if (got.count("0.0002") || got.count("0.0001"))
        return fail("collision totals 0.0002/0.0001 must be excluded");
    // sanity: rendered order is descending by total
    for (std::size_t i = 1; i < set.sums.size(); ++i)
        if (!(set.sums[i - 1].total > set.sums[i].total)) return fail("not descending");
    return pass("13 totals, collisions excluded");
}

// ---- criterion: published-sample fixture replay ---------------------------

Outcome check_sample_replay() {
    SampleChain sample = sample_chain();

    // replay through the JSONL path, exactly as external data would arrive
    std::stringstream stream;
    write_jsonl(stream, sample.batch);
    IngestBatch batch = read_jsonl(stream);
    ChainStore store;
    store.append_blocks(batch);
    Snapshot snap = store.snapshot();

    std::vector<RttMatch> exact = find_exact_rtts(snap);
    FeeAdjustedOptions options; // 24-hour window
    std::vector<RttMatch> fee1 =
        find_fee_adjusted_rtts(snap, enumerate_fee_sums(default_base_fees(), 1), options, exact);
    std::vector<RttMatch> fee2 =
        find_fee_adjusted_rtts(snap, enumerate_fee_sums(default_base_fees(), 2), options, exact);

    if (exact.size() != 4)
        return fail("expected 4 exact matches, got " + std::to_string(exact.size()));
    if (fee1.size() != 1 || fee2.size() != 1)
        return fail("expected 1 fee1 + 1 fee2, got " + std::to_string(fee1.size()) + "+" +
                    std::to_string(fee2.size()));

    auto find_match = [&](const std::vector<RttMatch>& matches, const SamplePair& want,
                          MatchKind kind) -> std::string {
        for (const RttMatch& m : matches) {
            if (m.amount.to_zat() != want.amount_zat) continue;
            if (hash_to_display_hex(m.shield.txid) != want.shield_txid)
                return "wrong shield txid for " + std::to_string(want.amount_zat);
            if (hash_to_display_hex(m.deshield.txid) != want.deshield_txid)
                return "wrong deshield txid for " + std::to_string(want.amount_zat);
            if (m.kind != kind) return "wrong kind for " + std::to_string(want.amount_zat);
            if (m.fee_adjustment.to_zat() != want.fee_zat)
                return "wrong fee for " + std::to_string(want.amount_zat);
            if (m.delta_minutes != want.delta_minutes)
                return "wrong delta for " + std::to_string(want.amount_zat) + ": " +
                       std::to_string(m.delta_minutes);
            return "";
        }
        return "no match for amount " + std::to_string(want.amount_zat);
    };

    for (const SamplePair& want : sample.exact) {
        std::string err = find_match(exact, want, MatchKind::Exact);
        if (!err.empty()) return fail(err);
    }
    if (std::string err = find_match(fee1, sample.fee1, MatchKind::Fee1); !err.empty())
        return fail(err);
    if (std::string err = find_match(fee2, sample.fee2, MatchKind::Fee2); !err.empty())
        return fail(err);

    // bucket assignment of the four exact samples
    auto rows = bucket_by_time(exact);
    auto label_count = [&](const char* label) -> std::uint64_t {
        for (const TimeBucketRow& row : rows)
            if (row.label == label) return row.count;
        return 0;
    };
    if (label_count("[0, 5)") != 2 || label_count("[15, 30)") != 1 ||
        label_count("[120, 1440)") != 1)
        return fail("exact matches landed in the wrong time buckets");

    return pass("4 exact + 1 fee1 + 1 fee2 with published deltas and buckets");
}

// ---- criterion: oracle equivalence over randomized chains -----------------

SynthConfig randomized_config(std::uint64_t seed) {
    SynthConfig config;
    config.seed = seed;
    config.n_blocks = 10 + static_cast<std::int64_t>(seed % 41);        // <= 50
    config.txs_per_block_min = 0;
    config.txs_per_block_max = 1 + static_cast<std::int64_t>(seed % 9); // <= 500 joinsplits
    config.fraction_tx_with_joinsplit = 0.1 + 0.06 * static_cast<double>(seed % 7);
    config.joinsplit_free_block_rate = 0.05 * static_cast<double>(seed % 8);
    config.planted_exact_count = static_cast<std::int64_t>(seed % 4);
    config.planted_fee1_count = static_cast<std::int64_t>(seed % 3);
    config.planted_fee2_count = static_cast<std::int64_t>((seed / 3) % 2);
    config.collision_rate = 0.1 * static_cast<double>(seed % 6);
    return config;
}

Outcome check_oracle_equivalence() {
    std::size_t max_joinsplits = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto [batch, truth] = generate(randomized_config(seed));

        std::size_t joinsplits = 0;
        for (const BlockRecord& b : batch.blocks)
            for (const TxRecord& tx : b.txs) joinsplits += tx.joinsplits.size();
        max_joinsplits = std::max(max_joinsplits, joinsplits);
        if (joinsplits > 500) return fail("seed " + std::to_string(seed) + " exceeds 500 joinsplits");

        ChainStore store;
        store.append_blocks(batch);
        std::vector<RttMatch> indexed = find_exact_rtts(store.snapshot());
        std::vector<RttMatch> oracle = oracle_exact_rtts(batch);
        if (indexed != oracle)
            return fail("seed " + std::to_string(seed) + ": indexed " +
                        std::to_string(indexed.size()) + " vs oracle " +
                        std::to_string(oracle.size()));
    }
    return pass("200 chains, max " + std::to_string(max_joinsplits) + " joinsplits");
}

// ---- criterion: planted-link recovery -------------------------------------

Outcome check_planted_recovery() {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        SynthConfig config;
        config.seed = 3000 + seed;
        config.n_blocks = 40;
        config.planted_exact_count = 1 + static_cast<std::int64_t>(seed % 5);
        config.planted_fee1_count = 1 + static_cast<std::int64_t>(seed % 3);
        config.planted_fee2_count = 1 + static_cast<std::int64_t>(seed % 2);
        config.collision_rate = 0;

        auto [batch, truth] = generate(config);
        ChainStore store;
        store.append_blocks(batch);
        Snapshot snap = store.snapshot();

        std::vector<RttMatch> exact = find_exact_rtts(snap);
        FeeAdjustedOptions options; // 24-hour window
        std::vector<RttMatch> fee1 = find_fee_adjusted_rtts(
            snap, enumerate_fee_sums(default_base_fees(), 1), options, exact);
        std::vector<RttMatch> fee2 = find_fee_adjusted_rtts(
            snap, enumerate_fee_sums(default_base_fees(), 2), options, exact);

        GroundTruth exact_truth, fee_truth;
        for (const PlantedLink& link : truth.planted)
            (link.kind == MatchKind::Exact ? exact_truth : fee_truth).planted.push_back(link);

        EvalScore exact_score = score(exact, exact_truth);
        if (exact_score.precision() != 1.0 || exact_score.recall() != 1.0)
            return fail("seed " + std::to_string(config.seed) +
                        ": exact precision=" + exact_score.precision_str() +
                        " recall=" + exact_score.recall_str());

        std::vector<RttMatch> fee_matches = fee1;
        fee_matches.insert(fee_matches.end(), fee2.begin(), fee2.end());
        EvalScore fee_score = score(fee_matches, fee_truth);
        if (fee_score.recall() != 1.0)
            return fail("seed " + std::to_string(config.seed) +
                        ": fee recall=" + fee_score.recall_str());
    }
    return pass("50 seeds, exact precision/recall 1.0, fee recall 1.0");
}

// ---- criterion: uniqueness destruction ------------------------------------

Outcome check_uniqueness_destruction() {
    std::size_t links_tested = 0;
    for (std::uint64_t seed : {101u, 102u, 103u, 104u, 105u}) {
        SynthConfig config;
        config.seed = seed;
        config.n_blocks = 30;
        config.planted_exact_count = 3;
        config.collision_rate = 0;

        auto [batch, truth] = generate(config);
        ChainStore store;
        store.append_blocks(batch);
        std::vector<RttMatch> before = find_exact_rtts(store.snapshot());
        if (score(before, truth).recall() != 1.0)
            return fail("seed " + std::to_string(seed) + ": baseline recall not 1.0");

        for (const PlantedLink& link : truth.planted) {
            std::int64_t shield_height = -1;
            for (const BlockRecord& block : batch.blocks)
                for (const TxRecord& tx : block.txs)
                    if (tx.txid == link.shield_txid) shield_height = block.height;

            IngestBatch modified = batch;
            inject_duplicate_shielding(modified, link.amount, shield_height);
            ChainStore modified_store;
            modified_store.append_blocks(modified);
            std::vector<RttMatch> after = find_exact_rtts(modified_store.snapshot());

            for (const RttMatch& m : after) {
                if (m.shield.txid == link.shield_txid && m.deshield.txid == link.deshield_txid)
                    return fail("seed " + std::to_string(seed) +
                                ": duplicated amount still matched");
            }
            if (after.size() != before.size() - 1)
                return fail("seed " + std::to_string(seed) + ": unrelated matches changed");
            ++links_tested;
        }
    }
    return pass(std::to_string(links_tested) + " planted links individually destroyed");
}

// ---- criterion: pool accounting --------------------------------------------

Outcome check_pool_accounting() {
    for (std::uint64_t seed = 500; seed < 520; ++seed) {
        SynthConfig config;
        config.seed = seed;
        config.n_blocks = 60;
        config.planted_exact_count = 2;
        config.planted_fee1_count = 1;
        config.fraction_tx_with_joinsplit = 0.4;
        auto [batch, truth] = generate(config);
        ChainStore store;
        store.append_blocks(batch);
        Snapshot snap = store.snapshot();

        PoolSeries series = pool_series(snap);
        CensusReport totals = census(snap);

        // single pass equals running sum
        std::int64_t expected_final =
            totals.total_shielded_inflow.to_zat() - totals.total_shielded_outflow.to_zat();
        if (series.final_pool != expected_final)
            return fail("seed " + std::to_string(seed) + ": final pool " +
                        std::to_string(series.final_pool) + " != " +
                        std::to_string(expected_final));

        // never negative under the generator's withdraw cap
        for (const PoolSeriesPoint& row : series.rows)
            if (row.shielded_pool < 0)
                return fail("seed " + std::to_string(seed) + ": negative pool at height " +
                            std::to_string(row.height));

        // prefix consistency
        for (std::size_t k : {std::size_t{1}, std::size_t{13}, std::size_t{37}}) {
            IngestBatch prefix;
            prefix.blocks.assign(batch.blocks.begin(),
                                 batch.blocks.begin() + static_cast<std::ptrdiff_t>(k));
            ChainStore prefix_store;
            prefix_store.append_blocks(prefix);
            PoolSeries prefix_series = pool_series(prefix_store.snapshot());
            for (std::size_t i = 0; i < k; ++i) {
                if (prefix_series.rows[i].shielded_pool != series.rows[i].shielded_pool)
                    return fail("seed " + std::to_string(seed) + ": prefix mismatch at " +
                                std::to_string(i));
            }
        }
    }
    return pass("20 chains: running sum, prefixes and non-negativity agree");
}

// ---- criterion: ingest equivalence -----------------------------------------

Outcome check_ingest_equivalence() {
    SynthConfig config;
    config.seed = 777;
    config.n_blocks = 40;
    config.planted_exact_count = 3;
    config.planted_fee1_count = 1;
    auto [batch, truth] = generate(config);
    WireLayoutConfig wire;

    // JSONL path
    std::stringstream jsonl_stream;
    write_jsonl(jsonl_stream, batch);
    ChainStore via_jsonl;
    via_jsonl.append_blocks(read_jsonl(jsonl_stream));

    // raw binary path
    std::stringstream raw_stream;
    write_raw_chain(raw_stream, batch, wire);
    ChainStore via_raw;
    via_raw.append_blocks(read_raw_chain(raw_stream, wire));

    // RPC playback path
    RpcFixtureServer server(batch);
    RpcConfig rpc_config;
    rpc_config.url = server.url();
    rpc_config.backoff_ms = 1;
    RpcClient client(rpc_config);
    ChainStore via_rpc;
    via_rpc.append_blocks(client.fetch_range(0, batch.blocks.back().height));

    std::string jsonl_hash = via_jsonl.snapshot().content_hash();
    std::string raw_hash = via_raw.snapshot().content_hash();
    std::string rpc_hash = via_rpc.snapshot().content_hash();
    if (jsonl_hash != raw_hash) return fail("raw != jsonl store hash");
    if (jsonl_hash != rpc_hash) return fail("rpc != jsonl store hash");
    return pass("store hash " + jsonl_hash.substr(0, 16) + "... identical across 3 paths");
}

// ---- criterion: generator echo ---------------------------------------------

Outcome check_generator_echo() {
    SynthConfig config;
    config.seed = 2026;
    config.n_blocks = 2000;
    config.joinsplit_free_block_rate = 0.40;
    config.target_pool_share = 0.035;
    config.txs_per_block_min = 1;
    config.txs_per_block_max = 6;

    auto [batch, truth] = generate(config);
    ChainStore store;
    store.append_blocks(batch);
    Snapshot snap = store.snapshot();

    CensusReport report = census(snap);
    double js_free_pct = 100.0 * static_cast<double>(report.blocks_without_joinsplit_tx) /
                         static_cast<double>(report.total_blocks);
    if (js_free_pct < 38.0 || js_free_pct > 42.0)
        return fail("joinsplit-free blocks " + std::to_string(js_free_pct) +
                    "% outside 40 +/- 2");

    PoolSeries series = pool_series(snap);
    double avg_share_pct = static_cast<double>(series.average_share_milli_pct) / 1000.0;
    if (avg_share_pct < 1.5 || avg_share_pct > 5.5)
        return fail("average pool share " + std::to_string(avg_share_pct) +
                    "% outside 3.5 +/- 2");

    std::ostringstream detail;
    detail.precision(3);
    detail << "echoed " << js_free_pct << "% joinsplit-free, " << avg_share_pct
           << "% mean pool share at 2000 blocks";
    return pass(detail.str());
}

// ---- measured (non-gating): large-scale detection --------------------------

Outcome check_performance() {
    // one million JoinSplits with ~1000 planted pairs, built directly
    constexpr std::int64_t kBlocks = 2000;
    constexpr std::int64_t kJsPerBlock = 500;
    constexpr std::int64_t kBase = 50'000'000'000;

    ChainStore store;
    std::int64_t counter = 0;
    for (std::int64_t h = 0; h < kBlocks; ++h) {
        BlockRecord block;
        block.height = h;
        block.time = 1'477'000'000 + h * 150;
        block.hash = hash_from_tag("perf-block-" + std::to_string(h));

        TxRecord coinbase;
        coinbase.is_coinbase = true;
        coinbase.txid = hash_from_tag("perf-coinbase-" + std::to_string(h));
        coinbase.outputs.push_back({Amount::zat(10 * Amount::kCoin), {}});
        block.txs.push_back(std::move(coinbase));

        for (std::int64_t i = 0; i < kJsPerBlock; ++i) {
            TxRecord tx;
            tx.txid = hash_from_tag("perf-tx-" + std::to_string(h) + "-" + std::to_string(i));
            std::int64_t c = counter++;
            if (i == 0 && h % 2 == 0) {
                // even block: shield one pair amount...
                tx.joinsplits.push_back({Amount::zat(kBase + h), Amount::zat(0)});
            } else if (i == 0) {
                // ...odd block: deshield the previous block's pair amount
                tx.joinsplits.push_back({Amount::zat(0), Amount::zat(kBase + h - 1)});
            } else if (c % 2 == 0) {
                tx.joinsplits.push_back({Amount::zat(kBase * 2 + c), Amount::zat(0)});
            } else {
                tx.joinsplits.push_back({Amount::zat(0), Amount::zat(kBase * 3 + c)});
            }
            block.txs.push_back(std::move(tx));
        }
        IngestBatch one;
        one.blocks.push_back(std::move(block));
        store.append_blocks(one);
    }

    Snapshot snap = store.snapshot();
    auto start = std::chrono::steady_clock::now();
    std::vector<RttMatch> matches = find_exact_rtts(snap);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    std::uint64_t n_js = snap.joinsplit_count();
    std::ostringstream detail;
    detail.precision(3);
    detail << "exact detection over " << n_js << " joinsplits: " << elapsed.count() << " s, "
           << matches.size() << " matches; nested-loop oracle would need ~" << n_js << "^2 = "
           << static_cast<double>(n_js) * static_cast<double>(n_js)
           << " pair checks and is refused by its guard";
    bool under_budget = elapsed.count() < 10.0;
    return {under_budget, detail.str()};
}

} // namespace

int main(int argc, char** argv) {
    bool run_perf = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--perf") == 0) run_perf = true;
    }

    std::vector<Check> checks = {
        {"fee-sum enumeration", check_fee_sum_enumeration, 1.0},
        {"sample fixture replay", check_sample_replay, 1.0},
        {"oracle equivalence (200 chains)", check_oracle_equivalence, 60.0},
        {"planted-link recovery (50 seeds)", check_planted_recovery, 30.0},
        {"uniqueness destruction", check_uniqueness_destruction, 0},
        {"pool accounting", check_pool_accounting, 0},
        {"ingest equivalence (raw/jsonl/rpc)", check_ingest_equivalence, 0},
        {"generator echo (2000 blocks)", check_generator_echo, 30.0},
    };

    int failures = 0;
    for (const Check& check : checks) {
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = check.run();
        } catch (const std::exception& e) {
            outcome = fail(std::string("exception: ") + e.what());
        }
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        if (outcome.passed && check.budget_seconds > 0 &&
            elapsed.count() > check.budget_seconds) {
            outcome = fail("exceeded the " + std::to_string(check.budget_seconds) +
                           " s budget: " + outcome.detail);
        }
        std::ostringstream line;
        line.precision(2);
        line << (outcome.passed ? "[PASS] " : "[FAIL] ") << check.name << " (" << std::fixed
             << elapsed.count() << " s)";
        if (!outcome.detail.empty()) line << ": " << outcome.detail;
        std::cout << line.str() << "\n";
        if (!outcome.passed) ++failures;
    }

    if (run_perf) {
        auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = check_performance();
        } catch (const std::exception& e) {
            outcome = fail(std::string("exception: ") + e.what());
        }
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        std::ostringstream line;
        line.precision(2);
        // measured, not gating
        line << (outcome.passed ? "[PASS] " : "[SLOW] ") << "performance (" << std::fixed
             << elapsed.count() << " s total): " << outcome.detail;
        std::cout << line.str() << "\n";
    }

    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
