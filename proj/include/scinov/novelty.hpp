#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scinov/baseline.hpp"
#include "scinov/count_store.hpp"
#include "scinov/date.hpp"
#include "scinov/text.hpp"

namespace scinov::novelty {

enum class TermKind : std::uint8_t { Word = 0, Phrase = 1, WordPair = 2, PhrasePair = 3 };
inline constexpr std::size_t kKinds = 4;
inline constexpr std::array<TermKind, kKinds> kAllKinds{TermKind::Word, TermKind::Phrase,
                                                        TermKind::WordPair, TermKind::PhrasePair};

std::string_view kind_name(TermKind kind);
TermKind parse_kind(std::string_view name);
inline std::size_t idx(TermKind k) { return static_cast<std::size_t>(k); }

/// One paper of the chronologically ordered stream.
struct PaperTerms {
    std::string paper_id;
    Date date;
    text::TermSets sets;
};

class PaperSource {
public:
    virtual ~PaperSource() = default;
    /// Fills `out` with the next paper; false at end of stream.
    virtual bool next(PaperTerms& out) = 0;
    virtual void rewind() = 0;
};

class VectorSource final : public PaperSource {
public:
    explicit VectorSource(const std::vector<PaperTerms>& papers) : papers_(papers) {}
    bool next(PaperTerms& out) override;
    void rewind() override { pos_ = 0; }

private:
    const std::vector<PaperTerms>& papers_;
    std::size_t pos_ = 0;
};

/// String <-> dense id.
class TermDictionary {
public:
    std::uint32_t intern(std::string_view term);
    [[nodiscard]] std::optional<std::uint32_t> find(std::string_view term) const;
    [[nodiscard]] const std::string& str(std::uint32_t id) const { return strings_[id]; }
    [[nodiscard]] std::size_t size() const { return strings_.size(); }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> strings_;
};

struct EngineOptions {
    std::array<bool, kKinds> kinds{true, true, true, true};
    /// Terms seen in fewer papers are never credited.
    std::uint32_t min_occurrence = 2;
    std::uint64_t memory_budget = 4ULL << 30;
    std::size_t shards = 16;
    unsigned threads = 1;
    /// Run files go here; a private temporary directory when empty.
    std::filesystem::path spill_dir;
    /// Block pairs that co-occur in the baseline as well as words and phrases.
    bool pair_baseline = true;
    bool collect_term_stats = true;
    std::size_t batch_papers = 2048;
};

struct TermStat {
    TermKind kind = TermKind::Word;
    std::string term;
    std::uint32_t occ = 0;
    std::uint32_t pioneer = 0;  // paper ordinal
    std::uint32_t reuse = 0;    // occ - 1
};

/// A credited term whose runner-up paper shares the pioneer's date.
struct PioneerTie {
    TermKind kind = TermKind::Word;
    std::string term;
    std::uint32_t pioneer = 0;
    std::uint32_t runner_up = 0;
};

struct PaperNovelty {
    std::array<std::uint64_t, kKinds> new_terms{};
    std::array<std::uint64_t, kKinds> reuse{};  // sum over new terms of (1 + u)
    std::uint32_t word_count = 0;
    std::uint32_t phrase_count = 0;
};

struct EngineSummary {
    std::array<std::uint64_t, kKinds> distinct_terms{};
    std::array<std::uint64_t, kKinds> credited_terms{};
    std::array<std::uint64_t, kKinds> below_min_occurrence{};
    std::array<std::uint64_t, kKinds> baseline_blocked{};
    std::size_t spills = 0;
    std::uint64_t peak_table_bytes = 0;
};

struct NoveltyResult {
    std::vector<std::string> paper_ids;  // by ordinal
    std::vector<Date> dates;
    std::vector<PaperNovelty> papers;
    std::vector<TermStat> term_stats;  // credited terms, sorted by kind, pioneer, term
    std::vector<PioneerTie> ties;
    EngineSummary summary;
};

/// Weight of one new term in the reuse metrics.
constexpr std::uint64_t reuse_weight(std::uint64_t later_papers) { return 1 + later_papers; }

/// Two-pass first-occurrence engine.
///
/// pass1 interns every term, counts distinct papers per term in hash shards
/// (spilling sorted runs to disk under the memory budget) and keeps the two
/// earliest paper ordinals per term. pass2 re-reads the same stream to check
/// that it matches what was counted, then reduces the merged counts: a term
/// with occ >= min_occurrence that is not in the baseline is credited to its
/// earliest paper, and every later paper containing it is a reuse.
class NoveltyEngine {
public:
    explicit NoveltyEngine(EngineOptions options, const corpus::BaselineDictionary* baseline = nullptr);
    ~NoveltyEngine();
    NoveltyEngine(const NoveltyEngine&) = delete;
    NoveltyEngine& operator=(const NoveltyEngine&) = delete;

    /// Throws DataError if the stream is not strictly increasing in order_key.
    void pass1(PaperSource& source);
    /// Throws DataError if the stream differs from the one given to pass1.
    NoveltyResult pass2(PaperSource& source);

    [[nodiscard]] const TermDictionary& words() const { return words_; }
    [[nodiscard]] const TermDictionary& phrases() const { return phrases_; }

private:
    void paper_keys(const PaperTerms& paper, bool intern, std::array<std::vector<std::uint64_t>, kKinds>& keys);
    void flush_batch();
    [[nodiscard]] std::string term_string(TermKind kind, std::uint64_t key) const;

    EngineOptions options_;
    std::filesystem::path spill_dir_;
    bool own_spill_dir_ = false;
    std::unique_ptr<MemoryBudget> budget_;
    std::array<std::unique_ptr<ShardedCounter>, kKinds> counters_;
    TermDictionary words_;
    TermDictionary phrases_;
    std::array<std::unordered_set<std::uint64_t>, kKinds> baseline_keys_;
    std::array<std::uint64_t, kKinds> fingerprint_{};

    std::vector<std::string> paper_ids_;
    std::vector<Date> dates_;
    std::vector<PaperNovelty> papers_;
    // pending (key, ordinal) per kind
    std::array<std::vector<std::pair<std::uint64_t, std::uint32_t>>, kKinds> batch_;
    bool pass1_done_ = false;
};

}  // namespace scinov::novelty
