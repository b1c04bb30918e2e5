#pragma once

#include "zlink/chain.hpp"

#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

namespace zlink {

struct RpcConfig {
    std::string url; // http://host:port
    std::string user;
    std::string password;
    int timeout_seconds = 30;
    int max_attempts = 3;    // per request, transient failures only
    int backoff_ms = 100;    // doubled per retry
    int concurrency = 4;     // parallel block fetches
};

/// JSON-RPC client for a node exposing tip height, hash-by-height and
/// verbose-block methods. Verbose blocks use the same JSON schema as the
/// JSONL interchange format.
class RpcClient {
public:
    explicit RpcClient(RpcConfig config);
    ~RpcClient();

    RpcClient(const RpcClient&) = delete;
    RpcClient& operator=(const RpcClient&) = delete;

    std::int64_t block_count();
    std::string block_hash(std::int64_t height);
    BlockRecord block_by_hash(const std::string& hash_hex);

    /// Fetches [from, to] inclusive as canonical records, issuing bounded
    /// concurrent requests but yielding a height-ordered batch. Throws
    /// RpcError on invalid ranges, heights beyond the tip, or unreachable
    /// endpoints after retries.
    IngestBatch fetch_range(std::int64_t from_height, std::int64_t to_height);

private:
    nlohmann::json call(const std::string& method, const nlohmann::json& params);

    RpcConfig config_;
    std::string host_port_;
};

} // namespace zlink
