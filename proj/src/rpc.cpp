#include "zlink/rpc.hpp"

#include "zlink/error.hpp"
#include "zlink/jsonl.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>

namespace zlink {

namespace {

std::atomic<std::uint64_t> g_rpc_id{0};

} // namespace

RpcClient::RpcClient(RpcConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw ConfigError("rpc: endpoint URL is required");
    host_port_ = config_.url;
    if (host_port_.rfind("http://", 0) == 0)
        host_port_ = host_port_.substr(7);
    else if (host_port_.rfind("https://", 0) == 0)
        throw ConfigError("rpc: https endpoints are not supported");
    while (!host_port_.empty() && host_port_.back() == '/') host_port_.pop_back();
    if (host_port_.empty()) throw ConfigError("rpc: malformed endpoint URL " + config_.url);
    if (config_.max_attempts < 1) throw ConfigError("rpc: max_attempts must be at least 1");
    if (config_.concurrency < 1) throw ConfigError("rpc: concurrency must be at least 1");
}

RpcClient::~RpcClient() = default;

nlohmann::json RpcClient::call(const std::string& method, const nlohmann::json& params) {
    nlohmann::json request = {
        {"jsonrpc", "1.0"},
        {"id", g_rpc_id.fetch_add(1)},
        {"method", method},
        {"params", params},
    };
    std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(config_.backoff_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }

        httplib::Client client(host_port_);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        if (!config_.user.empty()) client.set_basic_auth(config_.user, config_.password);

        httplib::Result res = client.Post("/", body, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue; // transient
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue; // transient
        }
        if (res->status != 200)
            throw RpcError("rpc " + method + ": HTTP status " + std::to_string(res->status));

        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw RpcError("rpc " + method + ": malformed response: " + e.what());
        }
        if (reply.contains("error") && !reply["error"].is_null()) {
            std::string detail = reply["error"].dump();
            throw RpcError("rpc " + method + " failed: " + detail);
        }
        if (!reply.contains("result"))
            throw RpcError("rpc " + method + ": response has no result");
        return reply["result"];
    }
    throw RpcError("rpc " + method + ": endpoint unreachable after " +
                   std::to_string(config_.max_attempts) + " attempts (" + last_error + ")");
}

std::int64_t RpcClient::block_count() {
    nlohmann::json result = call("getblockcount", nlohmann::json::array());
    if (!result.is_number_integer())
        throw RpcError("rpc getblockcount: result is not an integer");
    return result.get<std::int64_t>();
}

std::string RpcClient::block_hash(std::int64_t height) {
    nlohmann::json result = call("getblockhash", nlohmann::json::array({height}));
    if (!result.is_string()) throw RpcError("rpc getblockhash: result is not a string");
    return result.get<std::string>();
}

BlockRecord RpcClient::block_by_hash(const std::string& hash_hex) {
    nlohmann::json result = call("getblock", nlohmann::json::array({hash_hex, 2}));
    try {
        return block_from_json(result, "rpc block " + hash_hex);
    } catch (const ParseError& e) {
        throw RpcError(std::string("rpc getblock: ") + e.what());
    }
}

IngestBatch RpcClient::fetch_range(std::int64_t from_height, std::int64_t to_height) {
    if (from_height < 0 || to_height < from_height)
        throw RpcError("rpc: invalid height range " + std::to_string(from_height) + ".." +
                       std::to_string(to_height));
    std::int64_t tip = block_count();
    if (to_height > tip)
        throw RpcError("rpc: height " + std::to_string(to_height) + " is beyond the tip " +
                       std::to_string(tip));

    std::size_t n = static_cast<std::size_t>(to_height - from_height + 1);
    std::vector<BlockRecord> blocks(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mu;

    auto worker = [&]() {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                std::string hash = block_hash(from_height + static_cast<std::int64_t>(i));
                blocks[i] = block_by_hash(hash);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) first_error = e.what();
                break;
            }
        }
    };

    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(config_.concurrency), n);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failed.load()) throw RpcError(first_error);

    IngestBatch batch;
    batch.source = IngestSource::Rpc;
    batch.blocks = std::move(blocks);
    for (std::size_t i = 0; i < batch.blocks.size(); ++i) {
        std::int64_t expect = from_height + static_cast<std::int64_t>(i);
        if (batch.blocks[i].height != expect)
            throw RpcError("rpc: node returned height " + std::to_string(batch.blocks[i].height) +
                           " where " + std::to_string(expect) + " was requested");
    }
    validate_batch(batch);
    return batch;
}

} // namespace zlink
