#include "zlink/store.hpp"

#include "zlink/error.hpp"
#include "zlink/sha256.hpp"
#include "zlink/wire.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace zlink {

using detail::ChainData;

namespace {

constexpr char kFileMagic[8] = {'Z', 'L', 'N', 'K', 'S', 'T', 'O', 'R'};

void put_u32le(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
}

void put_u64le(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
}

/// Canonical structured serialization of one block; the store file body and
/// the content hash are both built from this.
void serialize_block_body(Bytes& out, const BlockRecord& block) {
    put_u64le(out, static_cast<std::uint64_t>(block.height));
    put_u64le(out, static_cast<std::uint64_t>(block.time));
    out.insert(out.end(), block.hash.begin(), block.hash.end());
    write_varint(out, block.txs.size());
    for (const TxRecord& tx : block.txs) {
        out.insert(out.end(), tx.txid.begin(), tx.txid.end());
        out.push_back(tx.is_coinbase ? 1 : 0);
        write_varint(out, tx.inputs.size());
        for (const TxIn& in : tx.inputs) {
            out.insert(out.end(), in.prev_txid.begin(), in.prev_txid.end());
            put_u32le(out, in.prev_vout);
        }
        write_varint(out, tx.outputs.size());
        for (const TxOut& o : tx.outputs) {
            put_u64le(out, static_cast<std::uint64_t>(o.value.to_zat()));
            write_varint(out, o.script_id.size());
            out.insert(out.end(), o.script_id.begin(), o.script_id.end());
        }
        write_varint(out, tx.joinsplits.size());
        for (const JoinSplitDesc& js : tx.joinsplits) {
            put_u64le(out, static_cast<std::uint64_t>(js.vpub_old.to_zat()));
            put_u64le(out, static_cast<std::uint64_t>(js.vpub_new.to_zat()));
        }
    }
}

class BodyReader {
public:
    BodyReader(ByteSpan bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

    std::size_t pos() const { return pos_; }

    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw StoreError("store file truncated");
    }
    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32le() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    std::uint64_t u64le() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        return v;
    }
    Hash32 hash() {
        need(32);
        Hash32 h;
        std::memcpy(h.data(), bytes_.data() + pos_, 32);
        pos_ += 32;
        return h;
    }
    Bytes bytes(std::size_t n) {
        need(n);
        Bytes out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    std::uint64_t varint() {
        auto [v, len] = parse_varint(bytes_.subspan(pos_));
        pos_ += len;
        return v;
    }

private:
    ByteSpan bytes_;
    std::size_t pos_;
};

BlockRecord deserialize_block_body(BodyReader& r) {
    BlockRecord block;
    block.height = static_cast<std::int64_t>(r.u64le());
    block.time = static_cast<std::int64_t>(r.u64le());
    block.hash = r.hash();
    std::uint64_t n_tx = r.varint();
    block.txs.reserve(n_tx);
    for (std::uint64_t t = 0; t < n_tx; ++t) {
        TxRecord tx;
        tx.txid = r.hash();
        tx.is_coinbase = r.u8() != 0;
        std::uint64_t n_in = r.varint();
        tx.inputs.reserve(n_in);
        for (std::uint64_t i = 0; i < n_in; ++i) {
            TxIn in;
            in.prev_txid = r.hash();
            in.prev_vout = r.u32le();
            tx.inputs.push_back(in);
        }
        std::uint64_t n_out = r.varint();
        tx.outputs.reserve(n_out);
        for (std::uint64_t i = 0; i < n_out; ++i) {
            TxOut o;
            o.value = Amount::zat(static_cast<std::int64_t>(r.u64le()));
            o.script_id = r.bytes(r.varint());
            tx.outputs.push_back(std::move(o));
        }
        std::uint64_t n_js = r.varint();
        tx.joinsplits.reserve(n_js);
        for (std::uint64_t i = 0; i < n_js; ++i) {
            JoinSplitDesc js;
            js.vpub_old = Amount::zat(static_cast<std::int64_t>(r.u64le()));
            js.vpub_new = Amount::zat(static_cast<std::int64_t>(r.u64le()));
            tx.joinsplits.push_back(js);
        }
        block.txs.push_back(std::move(tx));
    }
    return block;
}

/// Bucket entries for one height must sort by txid display order, then
/// js_index; appends within a block arrive in tx order, so the freshly added
/// tail is re-sorted once per (bucket, block).
void sort_bucket_tail(const BlockRecord& block, std::vector<JsRef>& bucket, std::size_t tail_start) {
    if (bucket.size() - tail_start < 2) return;
    std::sort(bucket.begin() + static_cast<std::ptrdiff_t>(tail_start), bucket.end(),
              [&](const JsRef& a, const JsRef& b) {
                  int c = compare_display(block.txs[a.tx_index].txid, block.txs[b.tx_index].txid);
                  if (c != 0) return c < 0;
                  return a.js_index < b.js_index;
              });
}

void index_block(ChainData& data, const BlockRecord& block) {
    std::uint32_t tx_index = 0;
    std::vector<std::pair<std::int64_t, std::size_t>> touched_sh, touched_de;
    for (const TxRecord& tx : block.txs) {
        data.tx_by_id.emplace(tx.txid, TxLocation{block.height, tx_index});
        std::uint32_t js_index = 0;
        for (const JoinSplitDesc& js : tx.joinsplits) {
            JsRef ref{block.height, tx_index, js_index};
            if (js.vpub_old.to_zat() > 0) {
                auto& bucket = data.shieldings_by_amount[js.vpub_old.to_zat()];
                if (touched_sh.empty() || touched_sh.back().first != js.vpub_old.to_zat())
                    touched_sh.emplace_back(js.vpub_old.to_zat(), bucket.size());
                bucket.push_back(ref);
            }
            if (js.vpub_new.to_zat() > 0) {
                auto& bucket = data.deshieldings_by_amount[js.vpub_new.to_zat()];
                if (touched_de.empty() || touched_de.back().first != js.vpub_new.to_zat())
                    touched_de.emplace_back(js.vpub_new.to_zat(), bucket.size());
                bucket.push_back(ref);
            }
            ++js_index;
            ++data.total_joinsplits;
        }
        ++tx_index;
        ++data.total_txs;
    }
    for (auto& [amount, tail] : touched_sh)
        sort_bucket_tail(block, data.shieldings_by_amount[amount], tail);
    for (auto& [amount, tail] : touched_de)
        sort_bucket_tail(block, data.deshieldings_by_amount[amount], tail);
}

} // namespace

// ---- Snapshot ----

std::int64_t Snapshot::tip_height() const {
    if (empty()) return -1;
    return d_->first_height + static_cast<std::int64_t>(d_->blocks.size()) - 1;
}

std::span<const BlockRecord> Snapshot::blocks() const {
    if (!d_) return {};
    return d_->blocks;
}

bool Snapshot::has_height(std::int64_t height) const {
    return d_ && height >= d_->first_height && height <= tip_height();
}

const BlockRecord& Snapshot::block_at(std::int64_t height) const {
    if (!has_height(height))
        throw StoreError("height " + std::to_string(height) + " not in store");
    return d_->blocks[static_cast<std::size_t>(height - d_->first_height)];
}

std::optional<TxLocation> Snapshot::find_tx(const TxId& txid) const {
    if (!d_) return std::nullopt;
    auto it = d_->tx_by_id.find(txid);
    if (it == d_->tx_by_id.end()) return std::nullopt;
    return it->second;
}

const TxRecord& Snapshot::tx_at(const TxLocation& loc) const {
    return block_at(loc.height).txs[loc.tx_index];
}

std::span<const JsRef> Snapshot::shieldings_with_amount(std::int64_t zat) const {
    if (!d_) return {};
    auto it = d_->shieldings_by_amount.find(zat);
    if (it == d_->shieldings_by_amount.end()) return {};
    return it->second;
}

std::span<const JsRef> Snapshot::deshieldings_with_amount(std::int64_t zat) const {
    if (!d_) return {};
    auto it = d_->deshieldings_by_amount.find(zat);
    if (it == d_->deshieldings_by_amount.end()) return {};
    return it->second;
}

const std::unordered_map<std::int64_t, std::vector<JsRef>>& Snapshot::shieldings_by_amount() const {
    static const std::unordered_map<std::int64_t, std::vector<JsRef>> kEmpty;
    return d_ ? d_->shieldings_by_amount : kEmpty;
}

const std::unordered_map<std::int64_t, std::vector<JsRef>>& Snapshot::deshieldings_by_amount() const {
    static const std::unordered_map<std::int64_t, std::vector<JsRef>> kEmpty;
    return d_ ? d_->deshieldings_by_amount : kEmpty;
}

const TxRecord& Snapshot::tx_of(const JsRef& ref) const {
    return block_at(ref.height).txs[ref.tx_index];
}

const JoinSplitDesc& Snapshot::joinsplit_of(const JsRef& ref) const {
    return tx_of(ref).joinsplits[ref.js_index];
}

std::optional<Amount> Snapshot::resolve_input_value(const TxId& prev_txid,
                                                    std::uint32_t prev_vout) const {
    auto loc = find_tx(prev_txid);
    if (!loc) return std::nullopt;
    const TxRecord& tx = tx_at(*loc);
    if (prev_vout >= tx.outputs.size()) return std::nullopt;
    return tx.outputs[prev_vout].value;
}

std::string Snapshot::content_hash() const {
    Sha256 h;
    if (d_) {
        for (const BlockRecord& block : d_->blocks) {
            Bytes body;
            serialize_block_body(body, block);
            h.update(body);
        }
    }
    Hash32 digest = h.finish();
    return to_hex(ByteSpan(digest.data(), digest.size()));
}

// ---- ChainStore ----

ChainStore::ChainStore() : d_(std::make_shared<ChainData>()) {}

ChainStore::ChainStore(const std::string& path) : d_(std::make_shared<ChainData>()), path_(path) {
    if (!path.empty() && std::filesystem::exists(path)) load(path);
}

ChainStore::ChainStore(ChainStore&& other) noexcept {
    std::lock_guard<std::mutex> lock(other.mu_);
    d_ = std::move(other.d_);
    path_ = std::move(other.path_);
    other.d_ = std::make_shared<ChainData>();
}

Snapshot ChainStore::snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return Snapshot(d_);
}

ChainData& ChainStore::writable() {
    // copy-on-write: clone only when a snapshot still shares the data
    if (d_.use_count() > 1) d_ = std::make_shared<ChainData>(*d_);
    return *d_;
}

AppendSummary ChainStore::append_blocks(const IngestBatch& batch) {
    try {
        validate_batch(batch);
    } catch (const ParseError& e) {
        throw StoreError(e.what());
    }

    std::lock_guard<std::mutex> lock(mu_);
    AppendSummary summary;
    ChainData* data = nullptr;

    for (const BlockRecord& block : batch.blocks) {
        std::int64_t tip = -1;
        const ChainData& cur = data ? *data : *d_;
        if (!cur.blocks.empty())
            tip = cur.first_height + static_cast<std::int64_t>(cur.blocks.size()) - 1;

        if (!cur.blocks.empty() && block.height >= cur.first_height && block.height <= tip) {
            const BlockRecord& existing =
                cur.blocks[static_cast<std::size_t>(block.height - cur.first_height)];
            if (existing.hash != block.hash)
                throw StoreError("block " + std::to_string(block.height) +
                                 " already stored with a different hash");
            ++summary.skipped_blocks;
            continue;
        }
        if (!cur.blocks.empty() && block.height != tip + 1)
            throw StoreError("height gap: tip is " + std::to_string(tip) + ", got block " +
                             std::to_string(block.height));

        if (!data) data = &writable();
        for (const TxRecord& tx : block.txs) {
            if (data->tx_by_id.count(tx.txid))
                throw StoreError("duplicate txid " + hash_to_display_hex(tx.txid) + " in block " +
                                 std::to_string(block.height));
        }

        if (data->blocks.empty()) data->first_height = block.height;
        data->blocks.push_back(block);
        index_block(*data, data->blocks.back());
        ++summary.new_blocks;
        summary.new_txs += block.txs.size();
        for (const TxRecord& tx : block.txs) summary.new_joinsplits += tx.joinsplits.size();
    }

    summary.tip_height =
        d_->blocks.empty() ? -1
                           : d_->first_height + static_cast<std::int64_t>(d_->blocks.size()) - 1;
    return summary;
}

void ChainStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open store file " + path);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (data.size() < sizeof(kFileMagic) + 4 + 8 + 32)
        throw StoreError("store file " + path + " is too short");
    if (std::memcmp(data.data(), kFileMagic, sizeof(kFileMagic)) != 0)
        throw StoreError("store file " + path + " has a bad magic");

    BodyReader r(data, sizeof(kFileMagic));
    std::uint32_t version = r.u32le();
    if (version != kFileVersion)
        throw StoreError("store file " + path + " has unsupported version " +
                         std::to_string(version));
    std::uint64_t n_blocks = r.u64le();

    // trailing 32 bytes are the body checksum
    if (data.size() < 32) throw StoreError("store file truncated");
    std::size_t body_start = r.pos();
    std::size_t body_end = data.size() - 32;
    if (body_end < body_start) throw StoreError("store file truncated");
    Hash32 expect;
    std::memcpy(expect.data(), data.data() + body_end, 32);
    Hash32 actual = sha256(ByteSpan(data).subspan(body_start, body_end - body_start));
    if (expect != actual) throw StoreError("store file " + path + " checksum mismatch");

    IngestBatch batch;
    for (std::uint64_t i = 0; i < n_blocks; ++i) {
        if (r.pos() >= body_end) throw StoreError("store file truncated");
        batch.blocks.push_back(deserialize_block_body(r));
    }
    if (r.pos() != body_end) throw StoreError("store file has trailing data");

    append_blocks(batch);
}

void ChainStore::save() const {
    if (path_.empty()) throw StoreError("store has no file path bound");
    save_as(path_);
}

void ChainStore::save_as(const std::string& path) const {
    Snapshot snap = snapshot();

    Bytes body;
    for (const BlockRecord& block : snap.blocks()) serialize_block_body(body, block);
    Hash32 checksum = sha256(body);

    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError("cannot write store file " + tmp);
        out.write(kFileMagic, sizeof(kFileMagic));
        Bytes header;
        put_u32le(header, kFileVersion);
        put_u64le(header, snap.block_count());
        out.write(reinterpret_cast<const char*>(header.data()),
                  static_cast<std::streamsize>(header.size()));
        out.write(reinterpret_cast<const char*>(body.data()),
                  static_cast<std::streamsize>(body.size()));
        out.write(reinterpret_cast<const char*>(checksum.data()), 32);
        if (!out) throw StoreError("failed writing store file " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StoreError("cannot replace store file " + path + ": " + ec.message());
}

// ---- StoreWriteLock ----

StoreWriteLock::StoreWriteLock(const std::string& store_path) : lock_path_(store_path + ".lock") {
    fd_ = ::open(lock_path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw StoreError("cannot open lock file " + lock_path_ + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw StoreError("store " + store_path + " is locked by another writer");
    }
}

StoreWriteLock::~StoreWriteLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

} // namespace zlink
