#include "scinov/count_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <queue>

#include "scinov/error.hpp"

namespace scinov::novelty {

namespace {

constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();
constexpr std::size_t kMaxBaseCapacity = 1024;
constexpr std::size_t kMinBaseCapacity = 16;

void keep_two_smallest(std::uint32_t& first, std::uint32_t& second, std::uint32_t v) {
    if (v < first) {
        second = first;
        first = v;
    } else if (v != first && v < second) {
        second = v;
    }
}

class RunReader {
public:
    explicit RunReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot reopen spill run " + path.string());
        fill();
    }
    [[nodiscard]] bool done() const { return pos_ == buf_.size(); }
    [[nodiscard]] const CountRecord& peek() const { return buf_[pos_]; }
    void pop() {
        if (++pos_ == buf_.size()) fill();
    }

private:
    void fill() {
        buf_.resize(8192);
        in_.read(reinterpret_cast<char*>(buf_.data()),
                 static_cast<std::streamsize>(buf_.size() * sizeof(CountRecord)));
        buf_.resize(static_cast<std::size_t>(in_.gcount()) / sizeof(CountRecord));
        pos_ = 0;
    }
    std::ifstream in_;
    std::vector<CountRecord> buf_;
    std::size_t pos_ = 0;
};

}  // namespace

void CountRecord::absorb(const CountRecord& other) {
    occ += other.occ;
    keep_two_smallest(first, second, other.first);
    if (other.second != kNoPaper) keep_two_smallest(first, second, other.second);
}

bool MemoryBudget::try_acquire(std::uint64_t bytes) {
    auto cur = used_.load();
    do {
        if (cur + bytes > limit_ / 5 * 4) return false;
    } while (!used_.compare_exchange_weak(cur, cur + bytes));
    note_peak(cur + bytes);
    return true;
}

void MemoryBudget::acquire(std::uint64_t bytes) { note_peak(used_.fetch_add(bytes) + bytes); }

MemoryBudget::MemoryBudget(std::uint64_t bytes, std::size_t tables)
    : limit_(bytes), small_table_bytes_(bytes / 5 / std::max<std::size_t>(1, tables)) {
    std::size_t cap = kMaxBaseCapacity;
    while (cap > kMinBaseCapacity && cap * sizeof(CountRecord) > small_table_bytes_) cap /= 2;
    base_capacity_ = cap;
}

void MemoryBudget::release(std::uint64_t bytes) { used_.fetch_sub(bytes); }

void MemoryBudget::note_peak(std::uint64_t now) {
    auto p = peak_.load();
    while (now > p && !peak_.compare_exchange_weak(p, now)) {
    }
}

CountShard::CountShard(std::filesystem::path spill_dir, std::string name, MemoryBudget& budget)
    : spill_dir_(std::move(spill_dir)), name_(std::move(name)), budget_(budget) {
    budget_.acquire(budget_.base_capacity() * sizeof(CountRecord));
    allocate(budget_.base_capacity());
}

CountShard::~CountShard() {
    budget_.release(slots_.size() * sizeof(CountRecord));
    std::error_code ec;
    for (const auto& run : runs_) std::filesystem::remove(run, ec);
}

void CountShard::allocate(std::size_t capacity) {
    slots_.assign(capacity, CountRecord{kEmpty, 0, kNoPaper, kNoPaper, 0});
    size_ = 0;
}

void CountShard::add(std::uint64_t key, std::uint32_t paper) {
    if ((size_ + 1) * 10 > slots_.size() * 7) grow_or_spill();
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = mix64(key) & mask;
    while (true) {
        auto& s = slots_[i];
        if (s.key == key) {
            ++s.occ;
            keep_two_smallest(s.first, s.second, paper);
            return;
        }
        if (s.key == kEmpty) {
            s = CountRecord{key, 1, paper, kNoPaper, 0};
            ++size_;
            return;
        }
        i = (i + 1) & mask;
    }
}

void CountShard::grow_or_spill() {
    const std::size_t bigger = slots_.size() * 2;
    const std::uint64_t extra = (bigger - slots_.size()) * sizeof(CountRecord);
    const bool small = bigger * sizeof(CountRecord) <= budget_.small_table_bytes();
    if (small) {
        budget_.acquire(extra);
    } else if (!budget_.try_acquire(extra)) {
        spill();
        return;
    }
    std::vector<CountRecord> old;
    old.swap(slots_);
    allocate(bigger);
    const std::size_t mask = slots_.size() - 1;
    for (const auto& s : old) {
        if (s.key == kEmpty) continue;
        std::size_t i = mix64(s.key) & mask;
        while (slots_[i].key != kEmpty) i = (i + 1) & mask;
        slots_[i] = s;
        ++size_;
    }
}

void CountShard::spill() {
    std::vector<CountRecord> live;
    live.reserve(size_);
    for (const auto& s : slots_)
        if (s.key != kEmpty) live.push_back(s);
    std::sort(live.begin(), live.end(),
              [](const CountRecord& a, const CountRecord& b) { return a.key < b.key; });
    auto path = spill_dir_ / (name_ + ".run" + std::to_string(runs_.size()));
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write spill run " + path.string());
        out.write(reinterpret_cast<const char*>(live.data()),
                  static_cast<std::streamsize>(live.size() * sizeof(CountRecord)));
        if (!out) throw std::runtime_error("short write to spill run " + path.string());
    }
    runs_.push_back(std::move(path));
    ++spills_;
    budget_.release((slots_.size() - budget_.base_capacity()) * sizeof(CountRecord));
    std::vector<CountRecord>().swap(slots_);
    allocate(budget_.base_capacity());
}

void CountShard::drain_merged(const std::function<void(const CountRecord&)>& fn) {
    // Compact the live in-memory records to the front and sort them.
    std::size_t n = 0;
    for (auto& s : slots_)
        if (s.key != kEmpty) slots_[n++] = s;
    std::sort(slots_.begin(), slots_.begin() + static_cast<std::ptrdiff_t>(n),
              [](const CountRecord& a, const CountRecord& b) { return a.key < b.key; });
    auto restore = [&] {
        budget_.release((slots_.size() - budget_.base_capacity()) * sizeof(CountRecord));
        std::vector<CountRecord>().swap(slots_);
        allocate(budget_.base_capacity());
        std::error_code ec;
        for (const auto& run : runs_) std::filesystem::remove(run, ec);
        runs_.clear();
    };

    if (runs_.empty()) {
        for (std::size_t i = 0; i < n; ++i) fn(slots_[i]);
        restore();
        return;
    }

    std::vector<std::unique_ptr<RunReader>> readers;
    for (const auto& run : runs_) readers.push_back(std::make_unique<RunReader>(run));
    std::size_t mem_pos = 0;

    using Item = std::pair<std::uint64_t, std::size_t>;  // key, source (readers.size() = memory)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t r = 0; r < readers.size(); ++r)
        if (!readers[r]->done()) heap.emplace(readers[r]->peek().key, r);
    if (mem_pos < n) heap.emplace(slots_[mem_pos].key, readers.size());

    auto take = [&](std::size_t src) {
        CountRecord rec;
        if (src == readers.size()) {
            rec = slots_[mem_pos++];
            if (mem_pos < n) heap.emplace(slots_[mem_pos].key, src);
        } else {
            rec = readers[src]->peek();
            readers[src]->pop();
            if (!readers[src]->done()) heap.emplace(readers[src]->peek().key, src);
        }
        return rec;
    };

    while (!heap.empty()) {
        auto [key, src] = heap.top();
        heap.pop();
        CountRecord acc = take(src);
        while (!heap.empty() && heap.top().first == key) {
            auto [k2, s2] = heap.top();
            heap.pop();
            acc.absorb(take(s2));
        }
        fn(acc);
    }
    restore();
}

ShardedCounter::ShardedCounter(std::filesystem::path spill_dir, std::string name, std::size_t shards,
                               MemoryBudget& budget) {
    if (shards == 0) throw UsageError("shard count must be positive");
    for (std::size_t i = 0; i < shards; ++i)
        shards_.push_back(std::make_unique<CountShard>(spill_dir, name + ".s" + std::to_string(i), budget));
}

std::size_t ShardedCounter::spill_count() const {
    std::size_t n = 0;
    for (const auto& s : shards_) n += s->spill_count();
    return n;
}

}  // namespace scinov::novelty
