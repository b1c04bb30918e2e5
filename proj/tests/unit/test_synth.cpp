#include "zlink/synth.hpp"
#include "zlink/analytics.hpp"
#include "zlink/jsonl.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace zlink;
using namespace zlink::testsupport;

TEST_SUITE_BEGIN("synth");

TEST_CASE("same seed yields byte-identical batches") {
    SynthConfig config;
    config.seed = 1234;
    config.n_blocks = 25;
    config.planted_exact_count = 2;
    config.planted_fee1_count = 1;
    config.planted_fee2_count = 1;

    auto [batch_a, truth_a] = generate(config);
    auto [batch_b, truth_b] = generate(config);
    CHECK(to_jsonl(batch_a) == to_jsonl(batch_b));
    CHECK(truth_a.planted == truth_b.planted);

    config.seed = 1235;
    auto [batch_c, truth_c] = generate(config);
    CHECK(to_jsonl(batch_a) != to_jsonl(batch_c));
}

TEST_CASE("no-joinsplit config yields a joinsplit-free chain") {
    SynthConfig config;
    config.seed = 2;
    config.n_blocks = 12;
    config.fraction_tx_with_joinsplit = 0;
    config.joinsplit_free_block_rate = 1.0;
    config.planted_exact_count = 0;

    auto [batch, truth] = generate(config);
    std::size_t joinsplits = 0;
    for (const BlockRecord& b : batch.blocks)
        for (const TxRecord& tx : b.txs) joinsplits += tx.joinsplits.size();
    CHECK(joinsplits == 0);
    CHECK(truth.planted.empty());
    CHECK(find_exact_rtts(store_with(batch).snapshot()).empty());
}

TEST_CASE("generated chains pass store ingestion invariants") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        SynthConfig config;
        config.seed = seed;
        config.n_blocks = 35;
        config.planted_exact_count = 2;
        config.planted_fee1_count = 1;
        config.planted_fee2_count = 1;
        config.collision_rate = seed % 2 ? 0.5 : 0.0;
        auto [batch, truth] = generate(config);

        // contiguous heights from zero, coinbase-first everywhere
        for (std::size_t i = 0; i < batch.blocks.size(); ++i) {
            CHECK(batch.blocks[i].height == static_cast<std::int64_t>(i));
            REQUIRE_FALSE(batch.blocks[i].txs.empty());
            CHECK(batch.blocks[i].txs[0].is_coinbase);
        }

        ChainStore store = store_with(batch); // would throw on duplicate txids
        CHECK(store.snapshot().block_count() == batch.blocks.size());

        // pool cap: the running pool never goes negative
        PoolSeries series = pool_series(store.snapshot());
        for (const PoolSeriesPoint& row : series.rows) CHECK(row.shielded_pool >= 0);
    }
}

TEST_CASE("planted links are recovered exactly with no collisions") {
    SynthConfig config;
    config.seed = 99;
    config.n_blocks = 45;
    config.planted_exact_count = 4;
    config.planted_fee1_count = 2;
    config.planted_fee2_count = 2;
    config.collision_rate = 0;

    auto [batch, truth] = generate(config);
    ChainStore store = store_with(batch);
    Snapshot snap = store.snapshot();

    std::vector<RttMatch> exact = find_exact_rtts(snap);
    FeeAdjustedOptions options;
    std::vector<RttMatch> fee1 =
        find_fee_adjusted_rtts(snap, enumerate_fee_sums(default_base_fees(), 1), options, exact);
    std::vector<RttMatch> fee2 =
        find_fee_adjusted_rtts(snap, enumerate_fee_sums(default_base_fees(), 2), options, exact);

    std::vector<RttMatch> all = exact;
    all.insert(all.end(), fee1.begin(), fee1.end());
    all.insert(all.end(), fee2.begin(), fee2.end());

    EvalScore result = score(all, truth);
    CHECK(result.true_positives == truth.planted.size());
    CHECK(result.false_positives == 0);
    CHECK(result.false_negatives == 0);
    CHECK(result.precision() == 1.0);
    CHECK(result.recall() == 1.0);
    CHECK(result.precision_str() == "1.000");
    CHECK(result.recall_str() == "1.000");
    CHECK(result.detected_coins == result.planted_coins);

    // kinds survive detection
    std::size_t fee1_planted = 0, fee2_planted = 0;
    for (const PlantedLink& link : truth.planted) {
        if (link.kind == MatchKind::Fee1) ++fee1_planted;
        if (link.kind == MatchKind::Fee2) ++fee2_planted;
    }
    CHECK(fee1.size() == fee1_planted);
    CHECK(fee2.size() == fee2_planted);
}

TEST_CASE("collision injection produces counted false negatives") {
    SynthConfig config;
    config.seed = 7;
    config.n_blocks = 40;
    config.planted_exact_count = 5;
    config.collision_rate = 1.0; // every planted link gets a duplicate shielding

    auto [batch, truth] = generate(config);
    for (const PlantedLink& link : truth.planted) CHECK(link.collided);

    std::vector<RttMatch> exact = find_exact_rtts(store_with(batch).snapshot());
    EvalScore result = score(exact, truth);
    CHECK(result.true_positives == 0);
    CHECK(result.false_negatives == truth.planted.size());
    CHECK(result.recall() == 0.0);
    CHECK(result.recall_str() == "0.000");
}

TEST_CASE("score trivia") {
    GroundTruth truth;
    truth.planted.push_back({});
    EvalScore none = score({}, truth);
    CHECK(none.true_positives == 0);
    CHECK(none.false_negatives == 1);
    CHECK(none.recall() == 0.0);
    CHECK(none.precision() == 1.0); // nothing detected, nothing wrong

    EvalScore empty = score({}, GroundTruth{});
    CHECK(empty.precision_str() == "1.000");
    CHECK(empty.recall_str() == "1.000");
}

TEST_CASE("injected duplicate shielding destroys the targeted match") {
    SynthConfig config;
    config.seed = 50;
    config.n_blocks = 30;
    config.planted_exact_count = 3;
    config.collision_rate = 0;

    auto [batch, truth] = generate(config);
    std::vector<RttMatch> before = find_exact_rtts(store_with(batch).snapshot());
    CHECK(score(before, truth).recall() == 1.0);

    for (const PlantedLink& link : truth.planted) {
        std::int64_t shield_height = -1;
        for (const BlockRecord& block : batch.blocks)
            for (const TxRecord& tx : block.txs)
                if (tx.txid == link.shield_txid) shield_height = block.height;
        REQUIRE(shield_height >= 0);

        IngestBatch copy = batch;
        inject_duplicate_shielding(copy, link.amount, shield_height);
        std::vector<RttMatch> after = find_exact_rtts(store_with(copy).snapshot());

        bool still_there = false;
        for (const RttMatch& m : after) {
            if (m.shield.txid == link.shield_txid && m.deshield.txid == link.deshield_txid)
                still_there = true;
        }
        CHECK_FALSE(still_there);
        CHECK(after.size() == before.size() - 1); // only that link is affected
    }
}

TEST_CASE("oracle guard rejects oversized batches") {
    SynthConfig config;
    config.seed = 3;
    config.n_blocks = 20;
    auto [batch, truth] = generate(config);
    CHECK_THROWS_AS(oracle_exact_rtts(batch, 1), ConfigError);
    CHECK(oracle_exact_rtts(batch).size() <= batch.blocks.size() * 10);
}

TEST_CASE("oracle on the sample chain finds the four exact pairs") {
    SampleChain sample = sample_chain();
    std::vector<RttMatch> oracle = oracle_exact_rtts(sample.batch);
    std::vector<RttMatch> indexed = find_exact_rtts(store_with(sample.batch).snapshot());
    CHECK(oracle.size() == 4);
    CHECK(oracle == indexed);

    CHECK(oracle_exact_rtts(IngestBatch{}).empty());
}

TEST_CASE("ground truth round-trips through its sidecar format") {
    SynthConfig config;
    config.seed = 8;
    config.n_blocks = 25;
    config.planted_exact_count = 2;
    config.planted_fee2_count = 1;
    auto [batch, truth] = generate(config);

    std::stringstream stream;
    write_ground_truth(stream, truth);
    GroundTruth parsed = read_ground_truth(stream);
    CHECK(parsed.chain_tag == truth.chain_tag);
    CHECK(parsed.planted == truth.planted);
    CHECK(parsed.decoy_joinsplits == truth.decoy_joinsplits);
}

TEST_CASE("the seeded fee mix is recovered as the top-5 histogram fees") {
    SynthConfig config;
    config.seed = 404;
    config.n_blocks = 250;
    config.txs_per_block_min = 2;
    config.txs_per_block_max = 8;
    auto [batch, truth] = generate(config);

    FeeHistogram hist = fee_histogram(store_with(batch).snapshot());
    std::set<std::int64_t> top5;
    for (const FeeTableRow& row : top_fees(hist, 0)) {
        if (row.fee_zat > 0 && top5.size() < 5) top5.insert(row.fee_zat);
    }
    CHECK(top5 == std::set<std::int64_t>{10'000, 100'000, 20'000, 9'000, 5'000});
}

TEST_CASE("infeasible configs are rejected") {
    SynthConfig config;
    config.n_blocks = 0;
    CHECK_THROWS_AS(generate(config), ConfigError);

    config = SynthConfig{};
    config.n_blocks = 1;
    config.planted_exact_count = 1;
    CHECK_THROWS_AS(generate(config), ConfigError);

    config = SynthConfig{};
    config.collision_rate = 1.5;
    CHECK_THROWS_AS(generate(config), ConfigError);

    config = SynthConfig{};
    config.fee_mix.clear();
    CHECK_THROWS_AS(generate(config), ConfigError);

    config = SynthConfig{};
    config.block_interval_seconds = 30 * 3600; // a fee plant cannot fit the window
    config.planted_fee1_count = 1;
    config.n_blocks = 10;
    CHECK_THROWS_AS(generate(config), ConfigError);
}

TEST_SUITE_END();
