#include "scinov/novelty.hpp"

#include <algorithm>
#include <random>

#include "scinov/error.hpp"
#include "scinov/parallel.hpp"

namespace scinov::novelty {

namespace {

constexpr std::array<std::string_view, kKinds> kKindNames{"word", "phrase", "word_pair", "phrase_pair"};

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::filesystem::path make_private_dir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto dir = base / ("scinov-spill-" + std::to_string(rd()) + std::to_string(rd()));
        if (std::filesystem::create_directory(dir)) return dir;
    }
    throw std::runtime_error("cannot create spill directory under " + base.string());
}

}  // namespace

std::string_view kind_name(TermKind kind) { return kKindNames[idx(kind)]; }

TermKind parse_kind(std::string_view name) {
    for (std::size_t i = 0; i < kKinds; ++i)
        if (kKindNames[i] == name) return static_cast<TermKind>(i);
    throw DataError("unknown term kind '" + std::string(name) + "'");
}

bool VectorSource::next(PaperTerms& out) {
    if (pos_ >= papers_.size()) return false;
    out = papers_[pos_++];
    return true;
}

std::uint32_t TermDictionary::intern(std::string_view term) {
    auto it = ids_.find(std::string(term));
    if (it != ids_.end()) return it->second;
    if (strings_.size() >= std::numeric_limits<std::uint32_t>::max() - 1)
        throw std::runtime_error("term dictionary overflow");
    const auto id = static_cast<std::uint32_t>(strings_.size());
    strings_.emplace_back(term);
    ids_.emplace(strings_.back(), id);
    return id;
}

std::optional<std::uint32_t> TermDictionary::find(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

NoveltyEngine::NoveltyEngine(EngineOptions options, const corpus::BaselineDictionary* baseline)
    : options_(std::move(options)) {
    if (options_.min_occurrence < 1) throw UsageError("min_occurrence must be at least 1");
    if (options_.spill_dir.empty()) {
        spill_dir_ = make_private_dir();
        own_spill_dir_ = true;
    } else {
        spill_dir_ = options_.spill_dir;
        std::filesystem::create_directories(spill_dir_);
    }
    std::size_t tables = 0;
    for (auto k : kAllKinds) tables += options_.kinds[idx(k)] ? options_.shards : 0;
    budget_ = std::make_unique<MemoryBudget>(options_.memory_budget, tables);
    for (auto k : kAllKinds)
        if (options_.kinds[idx(k)])
            counters_[idx(k)] = std::make_unique<ShardedCounter>(spill_dir_, std::string(kind_name(k)),
                                                                 options_.shards, *budget_);

    if (baseline != nullptr) {
        for (const auto& w : baseline->words) baseline_keys_[idx(TermKind::Word)].insert(words_.intern(w));
        for (const auto& p : baseline->phrases)
            baseline_keys_[idx(TermKind::Phrase)].insert(phrases_.intern(p));
        if (options_.pair_baseline) {
            auto add_pairs = [](const std::unordered_set<std::string>& pairs, TermDictionary& dict,
                                std::unordered_set<std::uint64_t>& keys) {
                for (const auto& p : pairs) {
                    const auto bar = p.find('|');
                    if (bar == std::string::npos) throw DataError("baseline pair without '|': " + p);
                    keys.insert(pair_key(dict.intern(std::string_view(p).substr(0, bar)),
                                         dict.intern(std::string_view(p).substr(bar + 1))));
                }
            };
            add_pairs(baseline->word_pairs, words_, baseline_keys_[idx(TermKind::WordPair)]);
            add_pairs(baseline->phrase_pairs, phrases_, baseline_keys_[idx(TermKind::PhrasePair)]);
        }
    }
}

NoveltyEngine::~NoveltyEngine() {
    for (auto& c : counters_) c.reset();
    if (own_spill_dir_) {
        std::error_code ec;
        std::filesystem::remove_all(spill_dir_, ec);
    }
}

void NoveltyEngine::paper_keys(const PaperTerms& paper, bool intern,
                               std::array<std::vector<std::uint64_t>, kKinds>& keys) {
    for (auto& k : keys) k.clear();
    const auto& s = paper.sets;
    auto id_of = [&](TermDictionary& dict, std::string_view term) -> std::uint32_t {
        if (intern) return dict.intern(term);
        auto id = dict.find(term);
        if (!id)
            throw DataError("pass 2 stream contains term '" + std::string(term) + "' unknown to pass 1 (paper " +
                            paper.paper_id + ")");
        return *id;
    };
    const bool want_words = options_.kinds[idx(TermKind::Word)];
    const bool want_phrases = options_.kinds[idx(TermKind::Phrase)];
    const bool want_word_pairs = options_.kinds[idx(TermKind::WordPair)];
    const bool want_phrase_pairs = options_.kinds[idx(TermKind::PhrasePair)];

    if (want_words || want_word_pairs) {
        std::unordered_map<std::string_view, std::uint32_t> local;
        local.reserve(s.words.size() + s.partner_words.size());
        for (const auto& w : s.words) {
            const auto id = id_of(words_, w);
            local.emplace(w, id);
            if (want_words) keys[idx(TermKind::Word)].push_back(id);
        }
        if (want_word_pairs) {
            for (const auto& w : s.partner_words) local.emplace(w, id_of(words_, w));
            for (const auto& [a, b] : s.word_pairs) {
                auto ia = local.find(a), ib = local.find(b);
                const auto ka = ia != local.end() ? ia->second : id_of(words_, a);
                const auto kb = ib != local.end() ? ib->second : id_of(words_, b);
                keys[idx(TermKind::WordPair)].push_back(pair_key(ka, kb));
            }
        }
    }
    if (want_phrases || want_phrase_pairs) {
        std::unordered_map<std::string_view, std::uint32_t> local;
        local.reserve(s.phrases.size());
        for (const auto& p : s.phrases) {
            const auto id = id_of(phrases_, p);
            local.emplace(p, id);
            if (want_phrases) keys[idx(TermKind::Phrase)].push_back(id);
        }
        if (want_phrase_pairs) {
            for (const auto& [a, b] : s.phrase_pairs) {
                auto ia = local.find(a), ib = local.find(b);
                const auto ka = ia != local.end() ? ia->second : id_of(phrases_, a);
                const auto kb = ib != local.end() ? ib->second : id_of(phrases_, b);
                keys[idx(TermKind::PhrasePair)].push_back(pair_key(ka, kb));
            }
        }
    }
}

void NoveltyEngine::flush_batch() {
    // Bucket keys by shard so each shard is touched by exactly one worker.
    struct Task {
        std::size_t kind;
        std::size_t shard;
    };
    std::vector<Task> tasks;
    std::array<std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>>, kKinds> buckets;
    for (std::size_t k = 0; k < kKinds; ++k) {
        if (!counters_[k] || batch_[k].empty()) continue;
        auto& counter = *counters_[k];
        buckets[k].resize(counter.shard_count());
        for (const auto& entry : batch_[k]) buckets[k][counter.shard_of(entry.first)].push_back(entry);
        batch_[k].clear();
        for (std::size_t s = 0; s < counter.shard_count(); ++s)
            if (!buckets[k][s].empty()) tasks.push_back({k, s});
    }
    parallel_for(tasks.size(), options_.threads, [&](std::size_t t) {
        auto& shard = counters_[tasks[t].kind]->shard(tasks[t].shard);
        for (const auto& [key, paper] : buckets[tasks[t].kind][tasks[t].shard]) shard.add(key, paper);
    });
}

void NoveltyEngine::pass1(PaperSource& source) {
    if (pass1_done_) throw std::logic_error("pass1 already run");
    source.rewind();
    PaperTerms paper;
    std::array<std::vector<std::uint64_t>, kKinds> keys;
    std::size_t in_batch = 0;
    while (source.next(paper)) {
        if (!paper_ids_.empty()) {
            const corpus::OrderKey prev{dates_.back(), paper_ids_.back()};
            const corpus::OrderKey cur{paper.date, paper.paper_id};
            if (!(prev < cur))
                throw DataError("stream not sorted by (date, id): " + paper.paper_id + " follows " +
                                paper_ids_.back());
        }
        if (paper_ids_.size() >= kNoPaper) throw std::runtime_error("too many papers");
        const auto ordinal = static_cast<std::uint32_t>(paper_ids_.size());
        paper_ids_.push_back(paper.paper_id);
        dates_.push_back(paper.date);
        PaperNovelty pn;
        pn.word_count = static_cast<std::uint32_t>(paper.sets.word_count());
        pn.phrase_count = static_cast<std::uint32_t>(paper.sets.phrase_count());
        papers_.push_back(pn);

        paper_keys(paper, true, keys);
        for (std::size_t k = 0; k < kKinds; ++k) {
            if (!counters_[k]) continue;
            for (auto key : keys[k]) {
                fingerprint_[k] += mix64(key ^ mix64(ordinal));
                batch_[k].emplace_back(key, ordinal);
            }
        }
        if (++in_batch >= options_.batch_papers) {
            flush_batch();
            in_batch = 0;
        }
    }
    flush_batch();
    pass1_done_ = true;
}

std::string NoveltyEngine::term_string(TermKind kind, std::uint64_t key) const {
    const auto lo = static_cast<std::uint32_t>(key & 0xffffffffULL);
    const auto hi = static_cast<std::uint32_t>(key >> 32);
    switch (kind) {
        case TermKind::Word: return words_.str(lo);
        case TermKind::Phrase: return phrases_.str(lo);
        case TermKind::WordPair: return words_.str(hi) + "|" + words_.str(lo);
        case TermKind::PhrasePair: return phrases_.str(hi) + "|" + phrases_.str(lo);
    }
    return {};
}

NoveltyResult NoveltyEngine::pass2(PaperSource& source) {
    if (!pass1_done_) throw std::logic_error("pass2 before pass1");

    // Re-read the stream: same papers, same order, same terms.
    source.rewind();
    PaperTerms paper;
    std::array<std::vector<std::uint64_t>, kKinds> keys;
    std::array<std::uint64_t, kKinds> fp{};
    std::size_t ordinal = 0;
    while (source.next(paper)) {
        if (ordinal >= paper_ids_.size() || paper_ids_[ordinal] != paper.paper_id || dates_[ordinal] != paper.date)
            throw DataError("pass 2 stream diverges from pass 1 at position " + std::to_string(ordinal) +
                            " (paper " + paper.paper_id + ")");
        paper_keys(paper, false, keys);
        for (std::size_t k = 0; k < kKinds; ++k)
            for (auto key : keys[k]) fp[k] += mix64(key ^ mix64(ordinal));
        ++ordinal;
    }
    if (ordinal != paper_ids_.size())
        throw DataError("pass 2 stream has " + std::to_string(ordinal) + " papers, pass 1 had " +
                        std::to_string(paper_ids_.size()));
    if (fp != fingerprint_) throw DataError("pass 2 stream terms do not match pass 1 counts");

    NoveltyResult result;
    auto& summary = result.summary;
    summary.peak_table_bytes = budget_->peak();
    for (std::size_t k = 0; k < kKinds; ++k) {
        if (!counters_[k]) continue;
        const auto kind = static_cast<TermKind>(k);
        auto& counter = *counters_[k];
        summary.spills += counter.spill_count();
        for (std::size_t s = 0; s < counter.shard_count(); ++s) {
            counter.shard(s).drain_merged([&](const CountRecord& rec) {
                ++summary.distinct_terms[k];
                if (rec.occ < options_.min_occurrence) {
                    ++summary.below_min_occurrence[k];
                    return;
                }
                if (baseline_keys_[k].count(rec.key)) {
                    ++summary.baseline_blocked[k];
                    return;
                }
                ++summary.credited_terms[k];
                auto& pn = papers_[rec.first];
                ++pn.new_terms[k];
                pn.reuse[k] += reuse_weight(rec.occ - 1);
                if (!options_.collect_term_stats) return;
                result.term_stats.push_back({kind, term_string(kind, rec.key), rec.occ, rec.first, rec.occ - 1});
                if (rec.second != kNoPaper && dates_[rec.second] == dates_[rec.first])
                    result.ties.push_back({kind, result.term_stats.back().term, rec.first, rec.second});
            });
        }
    }
    summary.peak_table_bytes = std::max(summary.peak_table_bytes, budget_->peak());

    auto by_kind_pioneer_term = [](const auto& a, const auto& b) {
        return std::tie(a.kind, a.pioneer, a.term) < std::tie(b.kind, b.pioneer, b.term);
    };
    std::sort(result.term_stats.begin(), result.term_stats.end(), by_kind_pioneer_term);
    std::sort(result.ties.begin(), result.ties.end(), by_kind_pioneer_term);

    result.paper_ids = paper_ids_;
    result.dates = dates_;
    result.papers = papers_;
    return result;
}

}  // namespace scinov::novelty
