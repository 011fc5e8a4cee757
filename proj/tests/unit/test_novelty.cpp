#include <doctest.h>

#include <map>
#include <numeric>

#include "scinov/error.hpp"
#include "scinov/novelty.hpp"
#include "support/novelty_oracle.hpp"
#include "support/synthetic.hpp"

using namespace scinov;
using namespace scinov::novelty;

namespace {

PaperTerms paper(std::string id, std::string date, std::vector<std::string> words,
                 std::vector<std::string> phrases = {}) {
    PaperTerms p;
    p.paper_id = std::move(id);
    p.date = Date::parse(date);
    std::sort(words.begin(), words.end());
    std::sort(phrases.begin(), phrases.end());
    p.sets.words = std::move(words);
    p.sets.phrases = std::move(phrases);
    text::build_pairs(p.sets);
    return p;
}

NoveltyResult run(const std::vector<PaperTerms>& papers, EngineOptions opts = {},
                  const corpus::BaselineDictionary* baseline = nullptr) {
    NoveltyEngine engine(opts, baseline);
    VectorSource src(papers);
    engine.pass1(src);
    src.rewind();
    return engine.pass2(src);
}

const TermStat* find_stat(const NoveltyResult& r, TermKind kind, const std::string& term) {
    for (const auto& s : r.term_stats)
        if (s.kind == kind && s.term == term) return &s;
    return nullptr;
}

void check_against_oracle(const std::vector<PaperTerms>& papers, const NoveltyResult& got,
                          const corpus::BaselineDictionary* baseline = nullptr) {
    auto want = oracle::run(papers, baseline);
    REQUIRE(got.papers.size() == papers.size());
    for (std::size_t i = 0; i < papers.size(); ++i) {
        CHECK(got.paper_ids[i] == papers[i].paper_id);
        for (std::size_t k = 0; k < kKinds; ++k) {
            CHECK(got.papers[i].new_terms[k] == want.rows[i].new_terms[k]);
            CHECK(got.papers[i].reuse[k] == want.rows[i].reuse[k]);
        }
        CHECK(got.papers[i].word_count == papers[i].sets.word_count());
        CHECK(got.papers[i].phrase_count == papers[i].sets.phrase_count());
    }
    std::array<std::size_t, kKinds> credited{};
    for (const auto& s : got.term_stats) {
        auto k = idx(s.kind);
        ++credited[k];
        auto it = want.credited[k].find(s.term);
        REQUIRE(it != want.credited[k].end());
        CHECK(got.paper_ids[s.pioneer] == it->second.pioneer);
        CHECK(s.occ == it->second.occ);
        CHECK(s.reuse == s.occ - 1);
    }
    for (std::size_t k = 0; k < kKinds; ++k) CHECK(credited[k] == want.credited[k].size());
}

}  // namespace

TEST_CASE("occurrence counts") {
    auto r = run({paper("A", "1950-01-01", {"q"}), paper("B", "1950-01-02", {"q"}),
                  paper("C", "1950-01-03", {"q"})});
    auto* s = find_stat(r, TermKind::Word, "q");
    REQUIRE(s);
    CHECK(s->occ == 3);
    CHECK(s->reuse == 2);
    CHECK(r.paper_ids[s->pioneer] == "A");

    auto single = run({paper("A", "1950-01-01", {"q"})});
    CHECK(single.term_stats.empty());
    CHECK(single.summary.below_min_occurrence[0] == 1);
}

TEST_CASE("pioneer and reuse") {
    std::vector<PaperTerms> ps{paper("A", "1948-06-30", {"transistor"}),
                               paper("B", "1949-01-01", {"transistor"}),
                               paper("C", "1950-01-01", {"transistor", "hapax"}),
                               paper("D", "1951-01-01", {"transistor"}),
                               paper("E", "1952-01-01", {"transistor"})};
    auto r = run(ps);
    auto* s = find_stat(r, TermKind::Word, "transistor");
    REQUIRE(s);
    CHECK(r.paper_ids[s->pioneer] == "A");
    CHECK(s->reuse == 4);
    CHECK(find_stat(r, TermKind::Word, "hapax") == nullptr);
    for (const auto& p : r.papers) CHECK(p.new_terms[idx(TermKind::Word)] <= 1);
}

TEST_CASE("same-day tie goes to the smaller id and is logged") {
    auto r = run({paper("A", "1960-05-05", {"memristor"}), paper("B", "1960-05-05", {"memristor"})});
    auto* s = find_stat(r, TermKind::Word, "memristor");
    REQUIRE(s);
    CHECK(r.paper_ids[s->pioneer] == "A");
    CHECK(r.papers[1].new_terms[0] == 0);
    REQUIRE(r.ties.size() == 1);
    CHECK(r.paper_ids[r.ties[0].runner_up] == "B");
}

TEST_CASE("reuse sums one plus later papers") {
    // x appears in 4 later papers, y in 1
    std::vector<PaperTerms> ps{paper("P0", "1950-01-01", {"x", "y"}), paper("P1", "1950-01-02", {"x", "y"}),
                               paper("P2", "1950-01-03", {"x"}), paper("P3", "1950-01-04", {"x"}),
                               paper("P4", "1950-01-05", {"x"})};
    EngineOptions opts;
    opts.kinds = {true, false, false, false};
    auto r = run(ps, opts);
    CHECK(r.papers[0].new_terms[0] == 2);
    CHECK(r.papers[0].reuse[0] == 7);
    for (std::size_t i = 1; i < ps.size(); ++i) CHECK(r.papers[i].reuse[0] == 0);
    CHECK(reuse_weight(4) + reuse_weight(1) == 7);
}

TEST_CASE("baseline blocks words, phrases and pairs independently") {
    corpus::BaselineDictionary base;
    base.words = {"ether"};
    base.phrases = {"natural_philosophy"};
    std::vector<PaperTerms> ps{paper("A", "1901-01-01", {"ether", "philosophy"}, {"natural_philosophy"}),
                               paper("B", "1902-01-01", {"ether", "philosophy"}, {"natural_philosophy"})};
    auto r = run(ps, {}, &base);
    CHECK(find_stat(r, TermKind::Word, "ether") == nullptr);
    CHECK(find_stat(r, TermKind::Phrase, "natural_philosophy") == nullptr);
    CHECK(find_stat(r, TermKind::Word, "philosophy") != nullptr);
    CHECK(find_stat(r, TermKind::WordPair, "ether|philosophy") != nullptr);
    check_against_oracle(ps, r, &base);

    base.word_pairs = {"ether|philosophy"};
    auto blocked = run(ps, {}, &base);
    CHECK(find_stat(blocked, TermKind::WordPair, "ether|philosophy") == nullptr);
    EngineOptions no_pairs;
    no_pairs.pair_baseline = false;
    CHECK(find_stat(run(ps, no_pairs, &base), TermKind::WordPair, "ether|philosophy") != nullptr);
}

TEST_CASE("stream errors") {
    SUBCASE("order regression") {
        std::vector<PaperTerms> ps{paper("B", "1950-01-01", {"a"}), paper("A", "1950-01-01", {"a"})};
        NoveltyEngine engine({});
        VectorSource src(ps);
        CHECK_THROWS_AS(engine.pass1(src), DataError);
    }
    SUBCASE("pass2 stream differs") {
        std::vector<PaperTerms> one{paper("A", "1950-01-01", {"a"}), paper("B", "1950-01-02", {"a"})};
        std::vector<PaperTerms> two{paper("A", "1950-01-01", {"a"}), paper("B", "1950-01-02", {"zzz"})};
        NoveltyEngine engine({});
        VectorSource s1(one), s2(two);
        engine.pass1(s1);
        CHECK_THROWS_AS(engine.pass2(s2), DataError);
    }
    SUBCASE("pass2 stream with a known term removed") {
        std::vector<PaperTerms> one{paper("A", "1950-01-01", {"a", "b"}), paper("B", "1950-01-02", {"a"})};
        std::vector<PaperTerms> two{paper("A", "1950-01-01", {"a"}), paper("B", "1950-01-02", {"a", "b"})};
        NoveltyEngine engine({});
        VectorSource s1(one), s2(two);
        engine.pass1(s1);
        CHECK_THROWS_AS(engine.pass2(s2), DataError);
    }
}

TEST_CASE("random corpora match the chronological oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::CorpusShape shape;
        shape.papers = 50 + seed * 10;
        auto ps = synth::corpus(seed, shape);
        corpus::BaselineDictionary base;
        if (seed % 2) base.words = {"w0", "w3"}, base.phrases = {"ph1_x1"}, base.word_pairs = {"w1|w2"};
        EngineOptions opts;
        opts.shards = 1 + seed % 5;
        opts.threads = 1 + static_cast<unsigned>(seed % 3);
        opts.batch_papers = 1 + seed * 7;
        auto r = run(ps, opts, &base);
        check_against_oracle(ps, r, &base);

        // reuse identity: sum of reuse equals sum of occ over credited terms
        std::array<std::uint64_t, kKinds> reuse{}, occ{};
        for (const auto& p : r.papers)
            for (std::size_t k = 0; k < kKinds; ++k) reuse[k] += p.reuse[k];
        for (const auto& s : r.term_stats) occ[idx(s.kind)] += s.occ;
        CHECK(reuse == occ);
    }
}

TEST_CASE("spilling does not change results") {
    synth::CorpusShape shape;
    shape.papers = 400;
    auto ps = synth::corpus(99, shape);
    auto reference = run(ps);
    EngineOptions tight;
    tight.memory_budget = 64 * 1024;
    tight.shards = 4;
    tight.batch_papers = 16;
    auto spilled = run(ps, tight);
    CHECK(spilled.summary.spills > 0);
    CHECK(spilled.summary.peak_table_bytes <= tight.memory_budget);
    REQUIRE(spilled.papers.size() == reference.papers.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(spilled.papers[i].new_terms == reference.papers[i].new_terms);
        CHECK(spilled.papers[i].reuse == reference.papers[i].reuse);
    }
    REQUIRE(spilled.term_stats.size() == reference.term_stats.size());
    for (std::size_t i = 0; i < reference.term_stats.size(); ++i) {
        CHECK(spilled.term_stats[i].term == reference.term_stats[i].term);
        CHECK(spilled.term_stats[i].pioneer == reference.term_stats[i].pioneer);
    }
}

TEST_CASE("adding a later paper only bumps reuse") {
    synth::CorpusShape shape;
    shape.papers = 120;
    auto ps = synth::corpus(5, shape);
    auto before = run(ps);
    auto last = ps.back();
    auto extra = paper("ZZZ", Date(last.date.days() + 1).to_string(), {ps.front().sets.words.empty() ? "w0" : ps.front().sets.words.front()});
    extra.sets.phrases.clear();
    extra.sets.word_pairs.clear();
    auto grown = ps;
    grown.push_back(extra);
    auto after = run(grown);
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(after.papers[i].new_terms == before.papers[i].new_terms);
    std::uint64_t delta = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) delta += after.papers[i].reuse[0] - before.papers[i].reuse[0];
    CHECK(delta <= 1);
}
