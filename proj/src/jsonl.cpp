#include "zlink/jsonl.hpp"

#include "zlink/error.hpp"

#include <istream>
#include <ostream>

namespace zlink {

namespace {

using nlohmann::json;

const json& require_key(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(where + ": missing required key \"" + key + "\"");
    return *it;
}

std::int64_t get_int(const json& j, const char* key, const std::string& where) {
    const json& v = require_key(j, key, where);
    if (!v.is_number_integer())
        throw ParseError(where + ": key \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

Hash32 get_hash(const json& j, const char* key, const std::string& where) {
    const json& v = require_key(j, key, where);
    if (!v.is_string())
        throw ParseError(where + ": key \"" + key + "\" must be a hex string");
    try {
        return hash_from_display_hex(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(where + ": key \"" + key + "\": " + e.what());
    }
}

/// Amounts come either as integer zatoshi or as exact decimal coin strings.
/// Floating-point JSON numbers are rejected: they cannot carry exact zatoshi.
Amount get_amount(const json& v, const char* key, const std::string& where) {
    if (v.is_number_integer()) {
        std::int64_t zat = v.get<std::int64_t>();
        if (zat < 0) throw ParseError(where + ": key \"" + key + "\" is negative");
        if (zat > Amount::kMaxMoney)
            throw ParseError(where + ": key \"" + key + "\" exceeds the coin cap");
        return Amount::zat(zat);
    }
    if (v.is_string()) {
        try {
            return Amount::parse(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": key \"" + key + "\": " + e.what());
        }
    }
    throw ParseError(where + ": key \"" + key +
                     "\" must be integer zatoshi or a decimal coin string");
}

Amount get_amount_key(const json& j, const char* key, const std::string& where) {
    return get_amount(require_key(j, key, where), key, where);
}

TxRecord tx_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": transaction must be an object");
    TxRecord tx;
    tx.txid = get_hash(j, "txid", where);
    if (auto it = j.find("coinbase"); it != j.end()) {
        if (!it->is_boolean()) throw ParseError(where + ": key \"coinbase\" must be a boolean");
        tx.is_coinbase = it->get<bool>();
    }

    if (auto it = j.find("vin"); it != j.end()) {
        if (!it->is_array()) throw ParseError(where + ": key \"vin\" must be an array");
        for (const json& vin : *it) {
            TxIn in;
            in.prev_txid = get_hash(vin, "txid", where + " vin");
            std::int64_t vout = get_int(vin, "vout", where + " vin");
            if (vout < 0 || vout > 0xfffffffeLL)
                throw ParseError(where + ": vin vout out of range");
            in.prev_vout = static_cast<std::uint32_t>(vout);
            tx.inputs.push_back(in);
        }
    }
    if (tx.is_coinbase && !tx.inputs.empty())
        throw ParseError(where + ": coinbase transaction must not list inputs");

    if (auto it = j.find("vout"); it != j.end()) {
        if (!it->is_array()) throw ParseError(where + ": key \"vout\" must be an array");
        for (const json& vout : *it) {
            TxOut out;
            out.value = get_amount_key(vout, "value_zat", where + " vout");
            if (auto sit = vout.find("script_id"); sit != vout.end()) {
                if (!sit->is_string())
                    throw ParseError(where + ": key \"script_id\" must be a hex string");
                out.script_id = from_hex(sit->get<std::string>());
            }
            tx.outputs.push_back(std::move(out));
        }
    }

    if (auto it = j.find("joinsplits"); it != j.end()) {
        if (!it->is_array()) throw ParseError(where + ": key \"joinsplits\" must be an array");
        for (const json& js : *it) {
            JoinSplitDesc desc;
            desc.vpub_old = get_amount_key(js, "vpub_old_zat", where + " joinsplit");
            desc.vpub_new = get_amount_key(js, "vpub_new_zat", where + " joinsplit");
            tx.joinsplits.push_back(desc);
        }
    }
    return tx;
}

} // namespace

nlohmann::ordered_json block_to_json(const BlockRecord& block) {
    nlohmann::ordered_json j;
    j["height"] = block.height;
    j["hash"] = hash_to_display_hex(block.hash);
    j["time"] = block.time;
    auto& txs = j["txs"] = nlohmann::ordered_json::array();
    for (const TxRecord& tx : block.txs) {
        nlohmann::ordered_json tj;
        tj["txid"] = hash_to_display_hex(tx.txid);
        tj["coinbase"] = tx.is_coinbase;
        auto& vin = tj["vin"] = nlohmann::ordered_json::array();
        for (const TxIn& in : tx.inputs) {
            vin.push_back({{"txid", hash_to_display_hex(in.prev_txid)},
                           {"vout", in.prev_vout}});
        }
        auto& vout = tj["vout"] = nlohmann::ordered_json::array();
        for (const TxOut& out : tx.outputs) {
            vout.push_back({{"value_zat", out.value.to_zat()},
                            {"script_id", to_hex(out.script_id)}});
        }
        auto& jss = tj["joinsplits"] = nlohmann::ordered_json::array();
        for (const JoinSplitDesc& js : tx.joinsplits) {
            jss.push_back({{"vpub_old_zat", js.vpub_old.to_zat()},
                           {"vpub_new_zat", js.vpub_new.to_zat()}});
        }
        txs.push_back(std::move(tj));
    }
    return j;
}

BlockRecord block_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": block must be a JSON object");
    BlockRecord block;
    block.height = get_int(j, "height", where);
    if (block.height < 0) throw ParseError(where + ": negative height");
    block.hash = get_hash(j, "hash", where);
    block.time = get_int(j, "time", where);
    const json& txs = require_key(j, "txs", where);
    if (!txs.is_array()) throw ParseError(where + ": key \"txs\" must be an array");
    for (const json& tj : txs) block.txs.push_back(tx_from_json(tj, where));
    return block;
}

IngestBatch read_jsonl(std::istream& in, std::size_t max_blocks, std::size_t* line_no) {
    IngestBatch batch;
    batch.source = IngestSource::Jsonl;

    std::size_t local_line = 0;
    std::size_t& line = line_no ? *line_no : local_line;
    std::string text;
    while ((max_blocks == 0 || batch.blocks.size() < max_blocks) && std::getline(in, text)) {
        ++line;
        if (text.empty()) continue;
        std::string where = "line " + std::to_string(line);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": invalid JSON: " + e.what());
        }
        batch.blocks.push_back(block_from_json(j, where));
    }
    validate_batch(batch);
    return batch;
}

void write_jsonl(std::ostream& out, const IngestBatch& batch) {
    for (const BlockRecord& block : batch.blocks)
        out << block_to_json(block).dump() << '\n';
    if (!out) throw ParseError("failed to write JSONL stream");
}

} // namespace zlink
