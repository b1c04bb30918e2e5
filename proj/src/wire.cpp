#include "zlink/wire.hpp"

#include "zlink/sha256.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

namespace zlink {

namespace {

constexpr std::uint32_t kNullPrevVout = 0xffffffff;

class Reader {
public:
    explicit Reader(ByteSpan bytes) : bytes_(bytes) {}

    std::size_t consumed() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    void need(std::size_t n, const char* what) const {
        if (remaining() < n)
            throw ParseError(std::string("truncated input: need ") + std::to_string(n) +
                             " bytes for " + what + ", have " + std::to_string(remaining()));
    }

    std::uint8_t u8(const char* what) {
        need(1, what);
        return bytes_[pos_++];
    }

    std::uint32_t u32le(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }

    std::uint64_t u64le(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        return v;
    }

    std::int64_t i64le(const char* what) { return static_cast<std::int64_t>(u64le(what)); }

    Hash32 hash(const char* what) {
        need(32, what);
        Hash32 h;
        std::memcpy(h.data(), bytes_.data() + pos_, 32);
        pos_ += 32;
        return h;
    }

    Bytes bytes(std::size_t n, const char* what) {
        need(n, what);
        Bytes out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    void skip(std::size_t n, const char* what) {
        need(n, what);
        pos_ += n;
    }

    std::uint64_t varint(const char* what) {
        auto [value, len] = parse_varint(bytes_.subspan(pos_));
        (void)what;
        pos_ += len;
        return value;
    }

    /// A declared element count; rejects counts that cannot possibly fit in
    /// the remaining bytes, so hostile inputs cannot force huge allocations.
    std::uint64_t count(std::size_t min_elem_size, const char* what) {
        std::uint64_t n = varint(what);
        if (min_elem_size > 0 && n > remaining() / min_elem_size)
            throw ParseError(std::string("declared ") + what + " count " + std::to_string(n) +
                             " exceeds remaining bytes");
        return n;
    }

private:
    ByteSpan bytes_;
    std::size_t pos_ = 0;
};

void put_u32le(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
}

void put_u64le(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
}

bool is_null_prevout(const TxIn& in) {
    return in.prev_vout == kNullPrevVout &&
           std::all_of(in.prev_txid.begin(), in.prev_txid.end(), [](std::uint8_t b) { return b == 0; });
}

Amount wire_amount(std::uint64_t raw, const char* what) {
    if (raw > static_cast<std::uint64_t>(Amount::kMaxMoney))
        throw ParseError(std::string(what) + " value " + std::to_string(raw) + " exceeds the coin cap");
    return Amount::zat(static_cast<std::int64_t>(raw));
}

} // namespace

void WireLayoutConfig::validate() const {
    auto check = [](std::uint32_t v, const char* name) {
        if (v == 0) throw ConfigError(std::string("wire layout field ") + name + " must be positive");
    };
    check(anchor_size, "anchor_size");
    check(nullifiers_size, "nullifiers_size");
    check(commitments_size, "commitments_size");
    check(ephemeral_key_size, "ephemeral_key_size");
    check(random_seed_size, "random_seed_size");
    check(macs_size, "macs_size");
    check(proof_size, "proof_size");
    check(ciphertexts_size, "ciphertexts_size");
    check(joinsplit_pubkey_size, "joinsplit_pubkey_size");
    check(joinsplit_sig_size, "joinsplit_sig_size");
    if (tx_version_with_joinsplits == 0)
        throw ConfigError("tx_version_with_joinsplits must be positive");
}

std::pair<std::uint64_t, std::size_t> parse_varint(ByteSpan bytes) {
    if (bytes.empty()) throw ParseError("truncated input: empty varint");
    std::uint8_t tag = bytes[0];
    if (tag < 0xfd) return {tag, 1};

    std::size_t width = tag == 0xfd ? 2 : tag == 0xfe ? 4 : 8;
    if (bytes.size() < 1 + width)
        throw ParseError("truncated varint: tag 0x" + to_hex(ByteSpan(&tag, 1)) + " needs " +
                         std::to_string(width) + " more bytes");
    std::uint64_t v = 0;
    for (std::size_t i = width; i > 0; --i) v = (v << 8) | bytes[i];

    std::uint64_t min = width == 2 ? 0xfdu : width == 4 ? 0x10000u : 0x100000000u;
    if (v < min)
        throw ParseError("non-canonical varint: value " + std::to_string(v) + " encoded in " +
                         std::to_string(1 + width) + " bytes");
    return {v, 1 + width};
}

void write_varint(Bytes& out, std::uint64_t value) {
    if (value < 0xfd) {
        out.push_back(static_cast<std::uint8_t>(value));
    } else if (value <= 0xffff) {
        out.push_back(0xfd);
        for (int i = 0; i < 2; ++i) out.push_back(static_cast<std::uint8_t>(value >> (i * 8)));
    } else if (value <= 0xffffffff) {
        out.push_back(0xfe);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(value >> (i * 8)));
    } else {
        out.push_back(0xff);
        put_u64le(out, value);
    }
}

std::pair<TxRecord, std::size_t> parse_transaction(ByteSpan bytes, const WireLayoutConfig& cfg) {
    cfg.validate();
    Reader r(bytes);
    TxRecord tx;

    std::uint32_t version = r.u32le("tx version");

    std::uint64_t n_in = r.count(32 + 4 + 1 + 4, "input");
    std::vector<TxIn> inputs;
    inputs.reserve(n_in);
    for (std::uint64_t i = 0; i < n_in; ++i) {
        TxIn in;
        in.prev_txid = r.hash("input prev txid");
        in.prev_vout = r.u32le("input prev vout");
        std::uint64_t script_len = r.count(1, "input script");
        r.skip(script_len, "input script");
        r.u32le("input sequence");
        inputs.push_back(in);
    }

    if (inputs.size() == 1 && is_null_prevout(inputs[0])) {
        tx.is_coinbase = true;
    } else {
        for (const TxIn& in : inputs) {
            if (is_null_prevout(in))
                throw ParseError("unexpected null prevout in non-coinbase input list");
        }
        tx.inputs = std::move(inputs);
    }

    std::uint64_t n_out = r.count(8 + 1, "output");
    tx.outputs.reserve(n_out);
    for (std::uint64_t i = 0; i < n_out; ++i) {
        TxOut out;
        out.value = wire_amount(r.u64le("output value"), "output");
        std::uint64_t script_len = r.count(1, "output script");
        out.script_id = r.bytes(script_len, "output script");
        tx.outputs.push_back(std::move(out));
    }

    r.u32le("lock time");

    if (version >= cfg.tx_version_with_joinsplits) {
        std::uint64_t n_js = r.count(cfg.joinsplit_desc_size(), "joinsplit");
        tx.joinsplits.reserve(n_js);
        for (std::uint64_t i = 0; i < n_js; ++i) {
            JoinSplitDesc js;
            js.vpub_old = wire_amount(r.u64le("vpub_old"), "vpub_old");
            js.vpub_new = wire_amount(r.u64le("vpub_new"), "vpub_new");
            r.skip(cfg.joinsplit_opaque_size(), "joinsplit opaque fields");
            tx.joinsplits.push_back(js);
        }
        if (n_js > 0) {
            r.skip(cfg.joinsplit_pubkey_size, "joinsplit pubkey");
            r.skip(cfg.joinsplit_sig_size, "joinsplit signature");
        }
    }

    tx.txid = dsha256(bytes.first(r.consumed()));
    return {std::move(tx), r.consumed()};
}

Bytes serialize_transaction(const TxRecord& tx, const WireLayoutConfig& cfg) {
    cfg.validate();
    Bytes out;

    std::uint32_t version = tx.joinsplits.empty() ? 1 : cfg.tx_version_with_joinsplits;
    put_u32le(out, version);

    if (tx.is_coinbase) {
        write_varint(out, 1);
        out.insert(out.end(), 32, 0); // null prev txid
        put_u32le(out, kNullPrevVout);
        write_varint(out, 0); // empty script
        put_u32le(out, 0xffffffff);
    } else {
        write_varint(out, tx.inputs.size());
        for (const TxIn& in : tx.inputs) {
            out.insert(out.end(), in.prev_txid.begin(), in.prev_txid.end());
            put_u32le(out, in.prev_vout);
            write_varint(out, 0);
            put_u32le(out, 0xffffffff);
        }
    }

    write_varint(out, tx.outputs.size());
    for (const TxOut& o : tx.outputs) {
        put_u64le(out, static_cast<std::uint64_t>(o.value.to_zat()));
        write_varint(out, o.script_id.size());
        out.insert(out.end(), o.script_id.begin(), o.script_id.end());
    }

    put_u32le(out, 0); // lock time

    if (version >= cfg.tx_version_with_joinsplits) {
        write_varint(out, tx.joinsplits.size());
        for (const JoinSplitDesc& js : tx.joinsplits) {
            put_u64le(out, static_cast<std::uint64_t>(js.vpub_old.to_zat()));
            put_u64le(out, static_cast<std::uint64_t>(js.vpub_new.to_zat()));
            out.insert(out.end(), cfg.joinsplit_opaque_size(), 0);
        }
        if (!tx.joinsplits.empty())
            out.insert(out.end(), cfg.joinsplit_pubkey_size + cfg.joinsplit_sig_size, 0);
    }

    return out;
}

Bytes serialize_block(const BlockRecord& block, const WireLayoutConfig& cfg) {
    Bytes payload;
    put_u64le(payload, static_cast<std::uint64_t>(block.height));
    put_u64le(payload, static_cast<std::uint64_t>(block.time));
    payload.insert(payload.end(), block.hash.begin(), block.hash.end());
    write_varint(payload, block.txs.size());
    for (const TxRecord& tx : block.txs) {
        Bytes tx_bytes = serialize_transaction(tx, cfg);
        payload.insert(payload.end(), tx_bytes.begin(), tx_bytes.end());
    }

    Bytes out;
    put_u32le(out, cfg.raw_block_magic);
    put_u32le(out, static_cast<std::uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::pair<BlockRecord, std::size_t> parse_block(ByteSpan bytes, const WireLayoutConfig& cfg) {
    Reader r(bytes);
    std::uint32_t magic = r.u32le("block magic");
    if (magic != cfg.raw_block_magic)
        throw ParseError("bad block record magic");
    std::uint32_t payload_len = r.u32le("block payload length");
    r.need(payload_len, "block payload");

    BlockRecord block;
    block.height = r.i64le("block height");
    if (block.height < 0) throw ParseError("negative block height in raw record");
    block.time = r.i64le("block time");
    block.hash = r.hash("block hash");
    std::uint64_t n_tx = r.count(4 + 1 + 1 + 4, "transaction");
    block.txs.reserve(n_tx);
    std::size_t payload_start = 8; // after magic + length
    for (std::uint64_t i = 0; i < n_tx; ++i) {
        auto [tx, used] = parse_transaction(bytes.subspan(r.consumed()), cfg);
        r.skip(used, "transaction body");
        block.txs.push_back(std::move(tx));
    }
    if (r.consumed() - payload_start != payload_len)
        throw ParseError("block payload length mismatch: declared " + std::to_string(payload_len) +
                         ", parsed " + std::to_string(r.consumed() - payload_start));
    return {std::move(block), r.consumed()};
}

void write_raw_chain(std::ostream& out, const IngestBatch& batch, const WireLayoutConfig& cfg) {
    for (const BlockRecord& block : batch.blocks) {
        Bytes rec = serialize_block(block, cfg);
        out.write(reinterpret_cast<const char*>(rec.data()),
                  static_cast<std::streamsize>(rec.size()));
    }
    if (!out) throw ParseError("failed to write raw chain stream");
}

IngestBatch read_raw_chain(std::istream& in, const WireLayoutConfig& cfg) {
    IngestBatch batch;
    batch.source = IngestSource::RawFile;

    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    while (pos < data.size()) {
        auto [block, used] = parse_block(ByteSpan(data).subspan(pos), cfg);
        pos += used;
        batch.blocks.push_back(std::move(block));
    }
    validate_batch(batch);
    return batch;
}

} // namespace zlink
