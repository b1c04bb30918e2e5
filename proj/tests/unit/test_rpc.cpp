#include "zlink/rpc.hpp"
#include "zlink/store.hpp"
#include "zlink/synth.hpp"

#include "../support/fixtures.hpp"
#include "../support/rpc_fixture.hpp"

#include <doctest.h>

using namespace zlink;
using namespace zlink::testsupport;

namespace {

RpcConfig fast_config(const std::string& url) {
    RpcConfig config;
    config.url = url;
    config.timeout_seconds = 5;
    config.max_attempts = 3;
    config.backoff_ms = 1;
    config.concurrency = 3;
    return config;
}

} // namespace

TEST_SUITE_BEGIN("rpc");

TEST_CASE("playback of a recorded chain is identical to the canonical form") {
    SampleChain sample = sample_chain();
    IngestBatch recorded;
    recorded.blocks.assign(sample.batch.blocks.begin(), sample.batch.blocks.begin() + 3);
    RpcFixtureServer server(recorded);

    RpcClient client(fast_config(server.url()));
    CHECK(client.block_count() == 2);

    IngestBatch fetched = client.fetch_range(0, 2);
    CHECK(fetched.source == IngestSource::Rpc);
    REQUIRE(fetched.blocks.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(fetched.blocks[i] == recorded.blocks[i]);
}

TEST_CASE("invalid ranges and beyond-tip heights are errors") {
    SampleChain sample = sample_chain();
    RpcFixtureServer server(sample.batch);
    RpcClient client(fast_config(server.url()));

    CHECK_THROWS_WITH_AS(client.fetch_range(5, 4), doctest::Contains("invalid height range"),
                         RpcError);
    CHECK_THROWS_WITH_AS(client.fetch_range(0, 99), doctest::Contains("beyond the tip"),
                         RpcError);
}

TEST_CASE("transient failures are retried with bounded backoff") {
    SampleChain sample = sample_chain();
    RpcFixtureServer server(sample.batch);
    server.fail_next(2); // first two requests answer 500

    RpcClient client(fast_config(server.url()));
    CHECK(client.block_count() == sample.batch.blocks.back().height);
    CHECK(server.request_count() >= 3);
}

TEST_CASE("an endpoint that keeps failing is reported unreachable") {
    SampleChain sample = sample_chain();
    RpcFixtureServer server(sample.batch);
    server.fail_next(1000);

    RpcConfig config = fast_config(server.url());
    config.max_attempts = 2;
    RpcClient client(config);
    CHECK_THROWS_WITH_AS(client.block_count(), doctest::Contains("unreachable"), RpcError);
}

TEST_CASE("connection refused surfaces as an rpc error") {
    RpcConfig config = fast_config("http://127.0.0.1:1"); // nothing listens there
    config.max_attempts = 1;
    config.timeout_seconds = 1;
    RpcClient client(config);
    CHECK_THROWS_AS(client.block_count(), RpcError);
}

TEST_CASE("rpc ingestion equals jsonl ingestion of the same chain") {
    SynthConfig config;
    config.seed = 61;
    config.n_blocks = 20;
    config.planted_exact_count = 1;
    auto [batch, truth] = generate(config);

    RpcFixtureServer server(batch);
    RpcClient client(fast_config(server.url()));
    IngestBatch fetched = client.fetch_range(0, batch.blocks.back().height);

    ChainStore via_rpc = store_with(fetched);
    ChainStore via_memory = store_with(batch);
    CHECK(via_rpc.snapshot().content_hash() == via_memory.snapshot().content_hash());
}

TEST_CASE("malformed endpoint configuration is rejected") {
    CHECK_THROWS_AS(RpcClient{RpcConfig{}}, ConfigError);
    RpcConfig https;
    https.url = "https://example.invalid";
    CHECK_THROWS_AS(RpcClient{https}, ConfigError);
}

TEST_SUITE_END();
