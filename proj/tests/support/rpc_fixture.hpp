#pragma once

// In-process JSON-RPC playback server: serves a fixed chain over HTTP the way
// a node would, with optional transient-failure injection for retry tests.

#include "zlink/chain.hpp"
#include "zlink/jsonl.hpp"
#include "zlink/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <stdexcept>
#include <string>
#include <thread>

namespace zlink::testsupport {

class RpcFixtureServer {
public:
    explicit RpcFixtureServer(IngestBatch chain) : chain_(std::move(chain)) {
        server_.Post("/", [this](const httplib::Request& req, httplib::Response& res) {
            handle(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("rpc fixture: cannot bind a port");
        thread_ = std::thread([this]() { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~RpcFixtureServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    /// The next `n` requests answer 500 before the server recovers.
    void fail_next(int n) { fail_countdown_ = n; }

    int request_count() const { return requests_.load(); }

private:
    void handle(const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        if (fail_countdown_ > 0) {
            --fail_countdown_;
            res.status = 500;
            res.set_content("injected failure", "text/plain");
            return;
        }

        nlohmann::json request = nlohmann::json::parse(req.body, nullptr, false);
        nlohmann::json reply;
        reply["id"] = request.value("id", 0);
        reply["error"] = nullptr;

        std::string method = request.value("method", "");
        nlohmann::json params = request.value("params", nlohmann::json::array());

        if (method == "getblockcount") {
            reply["result"] = chain_.blocks.empty() ? -1 : chain_.blocks.back().height;
        } else if (method == "getblockhash") {
            std::int64_t height = params.at(0).get<std::int64_t>();
            const BlockRecord* block = find_height(height);
            if (!block) {
                reply["error"] = {{"code", -8}, {"message", "Block height out of range"}};
            } else {
                reply["result"] = hash_to_display_hex(block->hash);
            }
        } else if (method == "getblock") {
            std::string hash = params.at(0).get<std::string>();
            const BlockRecord* block = find_hash(hash);
            if (!block) {
                reply["error"] = {{"code", -5}, {"message", "Block not found"}};
            } else {
                reply["result"] = block_to_json(*block);
            }
        } else {
            reply["error"] = {{"code", -32601}, {"message", "Method not found"}};
        }
        res.set_content(reply.dump(), "application/json");
    }

    const BlockRecord* find_height(std::int64_t height) const {
        for (const BlockRecord& b : chain_.blocks)
            if (b.height == height) return &b;
        return nullptr;
    }

    const BlockRecord* find_hash(const std::string& display_hex) const {
        for (const BlockRecord& b : chain_.blocks)
            if (hash_to_display_hex(b.hash) == display_hex) return &b;
        return nullptr;
    }

    IngestBatch chain_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> fail_countdown_{0};
    std::atomic<int> requests_{0};
};

} // namespace zlink::testsupport
