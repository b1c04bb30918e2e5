#pragma once

#include "zlink/chain.hpp"
#include "zlink/util.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace zlink {

/// Location of one JoinSplit inside the chain.
struct JsRef {
    std::int64_t height = 0;
    std::uint32_t tx_index = 0;
    std::uint32_t js_index = 0;

    friend bool operator==(const JsRef&, const JsRef&) = default;
};

struct TxLocation {
    std::int64_t height = 0;
    std::uint32_t tx_index = 0;
};

struct AppendSummary {
    std::size_t new_blocks = 0;
    std::size_t skipped_blocks = 0; // idempotent re-appends
    std::size_t new_txs = 0;
    std::size_t new_joinsplits = 0;
    std::int64_t tip_height = -1;
};

namespace detail {

struct ChainData {
    std::int64_t first_height = 0;
    std::vector<BlockRecord> blocks;
    std::unordered_map<TxId, TxLocation, Hash32Hasher> tx_by_id;
    // exact zatoshi keys; every JoinSplit with vpub_old > 0 appears once under
    // that key, symmetric for vpub_new; bucket lists sorted by
    // (height, txid display order, js_index)
    std::unordered_map<std::int64_t, std::vector<JsRef>> shieldings_by_amount;
    std::unordered_map<std::int64_t, std::vector<JsRef>> deshieldings_by_amount;
    std::uint64_t total_txs = 0;
    std::uint64_t total_joinsplits = 0;
};

} // namespace detail

/// Immutable view of the chain at a fixed tip. Cheap to copy; safe to use
/// from any thread while ingestion continues.
class Snapshot {
public:
    Snapshot() = default;

    bool empty() const { return !d_ || d_->blocks.empty(); }
    std::int64_t first_height() const { return d_ ? d_->first_height : 0; }
    std::int64_t tip_height() const;
    std::size_t block_count() const { return d_ ? d_->blocks.size() : 0; }
    std::uint64_t tx_count() const { return d_ ? d_->total_txs : 0; }
    std::uint64_t joinsplit_count() const { return d_ ? d_->total_joinsplits : 0; }

    std::span<const BlockRecord> blocks() const;
    const BlockRecord& block_at(std::int64_t height) const;
    bool has_height(std::int64_t height) const;

    std::optional<TxLocation> find_tx(const TxId& txid) const;
    const TxRecord& tx_at(const TxLocation& loc) const;

    /// Shielding-side JoinSplits with exactly this vpub_old, height-ordered.
    std::span<const JsRef> shieldings_with_amount(std::int64_t zat) const;
    /// Deshielding-side JoinSplits with exactly this vpub_new, height-ordered.
    std::span<const JsRef> deshieldings_with_amount(std::int64_t zat) const;

    const std::unordered_map<std::int64_t, std::vector<JsRef>>& shieldings_by_amount() const;
    const std::unordered_map<std::int64_t, std::vector<JsRef>>& deshieldings_by_amount() const;

    const TxRecord& tx_of(const JsRef& ref) const;
    const JoinSplitDesc& joinsplit_of(const JsRef& ref) const;
    std::int64_t time_of(const JsRef& ref) const { return block_at(ref.height).time; }

    /// Value of the referenced output if its transaction is stored, including
    /// outputs that were later spent (historical lookup). nullopt otherwise.
    std::optional<Amount> resolve_input_value(const TxId& prev_txid, std::uint32_t prev_vout) const;

    /// SHA-256 of the canonical serialization of all stored blocks; equal
    /// hashes mean equal chain content regardless of ingestion source.
    std::string content_hash() const;

private:
    friend class ChainStore;
    explicit Snapshot(std::shared_ptr<const detail::ChainData> d) : d_(std::move(d)) {}
    std::shared_ptr<const detail::ChainData> d_;
};

/// Single-writer chain store with snapshot-isolated readers and optional
/// single-file persistence. Appends publish a new tip atomically; open
/// snapshots keep observing the data they were taken from.
class ChainStore {
public:
    /// In-memory store (tests, synthesis pipelines).
    ChainStore();

    /// File-backed store: loads `path` if it exists, otherwise starts empty.
    /// Writes back only on save().
    explicit ChainStore(const std::string& path);

    ChainStore(ChainStore&& other) noexcept;
    ChainStore& operator=(ChainStore&&) = delete;
    ChainStore(const ChainStore&) = delete;
    ChainStore& operator=(const ChainStore&) = delete;

    /// Appends blocks continuing the current tip. Re-appending an existing
    /// block with an identical hash is a no-op; a differing hash, a height
    /// gap, or a duplicate txid is a StoreError.
    AppendSummary append_blocks(const IngestBatch& batch);

    Snapshot snapshot() const;

    std::int64_t tip_height() const { return snapshot().tip_height(); }

    /// Serializes to the bound path via a temp file + atomic rename.
    void save() const;
    /// Re-serializes into an arbitrary path.
    void save_as(const std::string& path) const;

    static constexpr std::uint32_t kFileVersion = 1;

private:
    void load(const std::string& path);
    detail::ChainData& writable();

    mutable std::mutex mu_;
    std::shared_ptr<detail::ChainData> d_;
    std::string path_;
};

/// Advisory exclusive lock guarding a store file against concurrent writers.
/// Throws StoreError if another process holds it.
class StoreWriteLock {
public:
    explicit StoreWriteLock(const std::string& store_path);
    ~StoreWriteLock();
    StoreWriteLock(const StoreWriteLock&) = delete;
    StoreWriteLock& operator=(const StoreWriteLock&) = delete;

private:
    int fd_ = -1;
    std::string lock_path_;
};

} // namespace zlink
