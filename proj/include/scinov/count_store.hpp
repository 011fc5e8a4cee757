#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace scinov::novelty {

inline constexpr std::uint32_t kNoPaper = std::numeric_limits<std::uint32_t>::max();

/// Per-term aggregate: number of distinct papers and the two earliest paper
/// ordinals. Merging is associative and commutative.
struct CountRecord {
    std::uint64_t key = 0;
    std::uint32_t occ = 0;
    std::uint32_t first = kNoPaper;
    std::uint32_t second = kNoPaper;
    std::uint32_t pad = 0;

    void absorb(const CountRecord& other);
};
static_assert(sizeof(CountRecord) == 24);

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Byte accounting shared by every shard of a pass.
class MemoryBudget {
public:
    /// `tables` is the number of tables that will share the budget.
    MemoryBudget(std::uint64_t bytes, std::size_t tables);
    /// Reserves `bytes` if usage stays under the soft limit (80% of the
    /// budget); false otherwise. The remaining 20% is split evenly between
    /// the tables, which may always grow within their share.
    bool try_acquire(std::uint64_t bytes);
    void acquire(std::uint64_t bytes);
    void release(std::uint64_t bytes);
    [[nodiscard]] std::uint64_t used() const { return used_.load(); }
    [[nodiscard]] std::uint64_t peak() const { return peak_.load(); }
    [[nodiscard]] std::uint64_t limit() const { return limit_; }

    /// Per-table share of the reserve.
    [[nodiscard]] std::uint64_t small_table_bytes() const { return small_table_bytes_; }
    /// Slot count every table starts from and shrinks back to.
    [[nodiscard]] std::size_t base_capacity() const { return base_capacity_; }

private:
    void note_peak(std::uint64_t now);
    std::uint64_t limit_;
    std::uint64_t small_table_bytes_;
    std::size_t base_capacity_;
    std::atomic<std::uint64_t> used_{0};
    std::atomic<std::uint64_t> peak_{0};
};

/// Open-addressing term -> CountRecord table for one hash shard. When the
/// budget refuses a resize the table contents are sorted and written to a
/// run file; finish() k-way merges all runs with the in-memory remainder.
class CountShard {
public:
    CountShard(std::filesystem::path spill_dir, std::string name, MemoryBudget& budget);
    ~CountShard();
    CountShard(const CountShard&) = delete;
    CountShard& operator=(const CountShard&) = delete;

    /// Counts one paper occurrence of `key`. Callers guarantee that a paper
    /// adds a key at most once and that ordinals arrive non-decreasing.
    void add(std::uint64_t key, std::uint32_t paper);

    /// Streams the merged records in ascending key order and empties the
    /// shard (run files are deleted).
    void drain_merged(const std::function<void(const CountRecord&)>& fn);

    [[nodiscard]] std::size_t spill_count() const { return spills_; }
    [[nodiscard]] std::size_t size_in_memory() const { return size_; }

private:
    void grow_or_spill();
    void spill();
    void allocate(std::size_t capacity);

    std::filesystem::path spill_dir_;
    std::string name_;
    MemoryBudget& budget_;
    std::vector<CountRecord> slots_;
    std::size_t size_ = 0;
    std::vector<std::filesystem::path> runs_;
    std::size_t spills_ = 0;
};

/// Key space split into `shards` independent CountShards.
class ShardedCounter {
public:
    ShardedCounter(std::filesystem::path spill_dir, std::string name, std::size_t shards,
                   MemoryBudget& budget);

    [[nodiscard]] std::size_t shard_of(std::uint64_t key) const { return mix64(key) % shards_.size(); }
    [[nodiscard]] std::size_t shard_count() const { return shards_.size(); }
    CountShard& shard(std::size_t i) { return *shards_[i]; }

    [[nodiscard]] std::size_t spill_count() const;

private:
    std::vector<std::unique_ptr<CountShard>> shards_;
};

}  // namespace scinov::novelty
