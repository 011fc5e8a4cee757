// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit status
// is nonzero when any selected criterion fails.
//
//   acceptance                      run every criterion
//   acceptance --criterion <id>     run one (repeatable)
//   acceptance --list               print ids
//   acceptance --perf-papers <n>    corpus size for the performance check

#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "scinov/citemetrics.hpp"
#include "scinov/count_store.hpp"
#include "scinov/format.hpp"
#include "scinov/novelty.hpp"
#include "scinov/pipeline.hpp"
#include "scinov/semdist.hpp"
#include "scinov/stats.hpp"
#include "scinov/text.hpp"
#include "support/novelty_oracle.hpp"
#include "support/semdist_oracle.hpp"
#include "support/stats_oracle.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace scinov;

namespace {

const fs::path kData = SCINOV_DATA_DIR;
const fs::path kFixture = fs::path(SCINOV_FIXTURE_DIR) / "mini";

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> warnings;
};

/// Collects the first few mismatches of a check.
class Tally {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (ok) return;
        if (failures_.size() < 5) failures_.push_back(what);
        ++failed_;
    }
    [[nodiscard]] bool ok() const { return failed_ == 0; }
    [[nodiscard]] std::string summary(const std::string& note = {}) const {
        std::ostringstream out;
        out << checks_ - failed_ << "/" << checks_ << " checks";
        if (!note.empty()) out << "; " << note;
        for (const auto& f : failures_) out << "\n      mismatch: " << f;
        return out.str();
    }
    [[nodiscard]] Outcome outcome(const std::string& note = {}) const { return {ok(), summary(note), {}}; }

private:
    std::size_t checks_ = 0, failed_ = 0;
    std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

novelty::NoveltyResult run_engine(const std::vector<novelty::PaperTerms>& papers, novelty::EngineOptions opts = {},
                                  const corpus::BaselineDictionary* baseline = nullptr) {
    novelty::NoveltyEngine engine(opts, baseline);
    novelty::VectorSource src(papers);
    engine.pass1(src);
    src.rewind();
    return engine.pass2(src);
}

novelty::PaperTerms hand_paper(std::string id, std::string date, std::vector<std::string> words) {
    novelty::PaperTerms p;
    p.paper_id = std::move(id);
    p.date = Date::parse(date);
    std::sort(words.begin(), words.end());
    p.sets.words = std::move(words);
    text::build_pairs(p.sets);
    return p;
}

// 200 seeded corpora shared by the novelty criteria
struct SyntheticRun {
    std::vector<novelty::PaperTerms> papers;
    corpus::BaselineDictionary baseline;
    novelty::NoveltyResult result;
};

const std::vector<SyntheticRun>& synthetic_runs(double* elapsed = nullptr) {
    static double seconds = 0;
    static const std::vector<SyntheticRun> runs = [] {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<SyntheticRun> out;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            SyntheticRun r;
            synth::CorpusShape shape;
            shape.papers = 20 + (seed * 37) % 481;
            shape.vocab = 20 + (seed * 13) % 181;
            shape.phrase_vocab = 10 + seed % 110;
            shape.years = 30;
            r.papers = synth::corpus(seed, shape);
            if (seed % 3 == 0) {
                r.baseline.words = {"w0", "w2"};
                r.baseline.phrases = {"ph1_x1"};
                r.baseline.word_pairs = {"w1|w3"};
            }
            novelty::EngineOptions opts;
            opts.shards = 1 + seed % 7;
            opts.threads = 1 + static_cast<unsigned>(seed % 4);
            opts.batch_papers = 1 + (seed * 11) % 300;
            if (seed % 10 == 0) opts.memory_budget = 64 * 1024;
            r.result = run_engine(r.papers, opts, &r.baseline);
            out.push_back(std::move(r));
        }
        seconds = seconds_since(t0);
        return out;
    }();
    if (elapsed) *elapsed = seconds;
    return runs;
}

// --- pipeline helpers -------------------------------------------------------------

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("scinov_acceptance_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

pipeline::PipelineConfig fixture_config(const fs::path& output, unsigned threads) {
    auto c = pipeline::PipelineConfig::load(kFixture / "pipeline.conf");
    c.output = output;
    c.threads = threads;
    return c;
}

void run_all(const pipeline::PipelineConfig& c) { pipeline::run(c, pipeline::all_stages(), {true}); }

/// Relative paths of regular files under `root`, skipping run bookkeeping.
std::vector<fs::path> artifacts(const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        auto rel = fs::relative(e.path(), root);
        if (rel == "run_manifest.json" || *rel.begin() == ".stamps") continue;
        out.push_back(rel);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void compare_trees(const fs::path& want, const fs::path& got, Tally& t, const std::string& label) {
    const auto a = artifacts(want), b = artifacts(got);
    t.expect(a == b, label + ": artifact lists differ");
    for (const auto& rel : a)
        if (fs::exists(got / rel)) t.expect(slurp(want / rel) == slurp(got / rel), label + ": " + rel.string());
}

// --- criteria -------------------------------------------------------------------------

Outcome novelty_oracle() {
    double elapsed = 0;
    const auto& runs = synthetic_runs(&elapsed);
    Tally t;
    std::size_t papers = 0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        const auto& r = runs[s];
        const auto want = oracle::run(r.papers, &r.baseline);
        t.expect(r.result.papers.size() == r.papers.size(), "corpus " + std::to_string(s) + " row count");
        for (std::size_t i = 0; i < r.papers.size() && i < r.result.papers.size(); ++i, ++papers) {
            const auto& got = r.result.papers[i];
            for (std::size_t k = 0; k < novelty::kKinds; ++k) {
                const std::string where = "corpus " + std::to_string(s) + " paper " + r.papers[i].paper_id;
                t.expect(got.new_terms[k] == want.rows[i].new_terms[k], where + " new_terms");
                t.expect((got.new_terms[k] > 0) == (want.rows[i].new_terms[k] > 0), where + " indicator");
                t.expect(got.reuse[k] == want.rows[i].reuse[k], where + " reuse");
            }
        }
    }
    auto o = t.outcome(std::to_string(runs.size()) + " corpora, " + std::to_string(papers) + " papers, " +
                       std::to_string(elapsed).substr(0, 5) + " s (limit 60 s)");
    if (elapsed >= 60) o.pass = false;
    return o;
}

Outcome reuse_identity() {
    Tally t;
    auto check = [&](const novelty::NoveltyResult& r, const std::string& label) {
        std::array<std::uint64_t, novelty::kKinds> reuse{}, occ{};
        for (const auto& p : r.papers)
            for (std::size_t k = 0; k < novelty::kKinds; ++k) reuse[k] += p.reuse[k];
        for (const auto& s : r.term_stats) occ[novelty::idx(s.kind)] += s.occ;
        for (std::size_t k = 0; k < novelty::kKinds; ++k)
            t.expect(reuse[k] == occ[k], label + " kind " + std::string(novelty::kind_name(novelty::TermKind(k))));
    };
    const auto& runs = synthetic_runs();
    for (std::size_t s = 0; s < runs.size(); ++s) check(runs[s].result, "corpus " + std::to_string(s));

    // bundled fixture, from the checked-in artifacts
    std::map<std::string, std::uint64_t> occ, reuse;
    std::ifstream ts(kFixture / "golden" / "term_stats.tsv");
    std::string line;
    std::getline(ts, line);
    while (std::getline(ts, line)) {
        const auto f = split(line, '\t');
        occ[std::string(f[0])] += std::stoull(std::string(f[2]));
    }
    std::ifstream mt(kFixture / "golden" / "metrics.tsv");
    std::getline(mt, line);
    std::vector<std::string> header;
    for (auto h : split(line, '\t')) header.emplace_back(h);
    while (std::getline(mt, line)) {
        const auto f = split(line, '\t');
        for (std::size_t c = 0; c < header.size(); ++c)
            for (const char* kind : {"word", "phrase", "word_comb", "phrase_comb"})
                if (header[c] == "new_" + std::string(kind) + "_reuse") reuse[kind] += std::stoull(std::string(f[c]));
    }
    const std::map<std::string, std::string> names{
        {"word", "word"}, {"phrase", "phrase"}, {"word_pair", "word_comb"}, {"phrase_pair", "phrase_comb"}};
    for (const auto& [kind, column] : names) t.expect(occ[kind] == reuse[column], "fixture kind " + kind);
    return t.outcome(std::to_string(runs.size() + 1) + " corpora, four kinds each");
}

Outcome reuse_formula() {
    // w1 reappears in four later papers, w2 in one
    std::vector<novelty::PaperTerms> ps{hand_paper("P0", "1950-01-01", {"w1", "w2"}),
                                        hand_paper("P1", "1950-01-02", {"w1", "w2"}),
                                        hand_paper("P2", "1950-01-03", {"w1"}), hand_paper("P3", "1950-01-04", {"w1"}),
                                        hand_paper("P4", "1950-01-05", {"w1"})};
    novelty::EngineOptions opts;
    opts.kinds = {true, false, false, false};
    const auto r = run_engine(ps, opts);
    Tally t;
    t.expect(r.papers[0].new_terms[0] == 2, "two new words");
    t.expect(r.papers[0].reuse[0] == 7, "new_word_reuse = " + std::to_string(r.papers[0].reuse[0]));
    return t.outcome("new_word_reuse = " + std::to_string(r.papers[0].reuse[0]) + " (want 7)");
}

Outcome singleton_exclusion() {
    Tally t;
    std::size_t singletons = 0;
    for (const auto& r : synthetic_runs()) {
        std::array<std::map<std::string, int>, novelty::kKinds> occ;
        for (const auto& p : r.papers) {
            const auto keys = oracle::keys_of(p.sets);
            for (std::size_t k = 0; k < novelty::kKinds; ++k)
                for (const auto& term : keys[k]) ++occ[k][term];
        }
        for (const auto& s : r.result.term_stats) {
            t.expect(s.occ >= 2, "credited term with occ " + std::to_string(s.occ));
            t.expect(occ[novelty::idx(s.kind)][s.term] >= 2, "credited singleton " + s.term);
        }
        for (std::size_t k = 0; k < novelty::kKinds; ++k)
            for (const auto& [term, n] : occ[k]) singletons += n == 1;
        t.expect(r.result.summary.credited_terms[0] + r.result.summary.below_min_occurrence[0] +
                         r.result.summary.baseline_blocked[0] ==
                     r.result.summary.distinct_terms[0],
                 "word tallies add up");
    }
    std::ifstream ts(kFixture / "golden" / "term_stats.tsv");
    std::string line;
    std::getline(ts, line);
    while (std::getline(ts, line)) t.expect(std::stoul(std::string(split(line, '\t')[2])) >= 2, "fixture: " + line);
    return t.outcome(std::to_string(singletons) + " singleton terms across the synthetic corpora, none credited");
}

Outcome noun_phrases() {
    const auto tagger = text::LexiconTagger::load(kData / "tag_lexicon.tsv");
    const auto lemmatizer = text::Lemmatizer::load(kData / "lemma_lexicon.tsv");
    auto tokens = text::tokenize("Specific Enzymatic Amplification of DNA In Vitro: The Polymerase Chain Reaction");
    tagger.tag(tokens);
    lemmatizer.lemmatize(tokens);
    std::vector<std::string> got;
    for (auto span : text::extract_noun_phrases(tokens)) {
        std::string p;
        for (auto i = span.begin; i < span.end; ++i) p += (i > span.begin ? " " : "") + tokens[i].lemma;
        got.push_back(p);
    }
    const std::vector<std::string> want{"specific enzymatic amplification", "dna", "vitro", "polymerase chain reaction"};
    std::string shown;
    for (const auto& p : got) shown += (shown.empty() ? "" : ", ") + p;
    return {got == want, "[" + shown + "]", {}};
}

Outcome semantic_distance() {
    Tally t;
    std::mt19937_64 gen(2024);
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::uniform_int_distribution<int> day(0, 4000);
    const Date base = Date::parse("2000-01-01");
    std::size_t compared = 0;
    auto run = [&](const std::vector<oracle::EmbeddedPaper>& ps, std::size_t dim, unsigned threads) {
        std::vector<semdist::DatedPaper> dated;
        semdist::EmbeddingStore store(dim);
        for (const auto& p : ps) {
            dated.push_back({p.id, Date(base.days() + p.day)});
            if (p.vec) store.add(p.id, *p.vec);
        }
        semdist::DistanceOptions opts;
        opts.threads = threads;
        return semdist::semantic_distance(dated, store, opts);
    };
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t dim = 2 + gen() % 16;
        const std::size_t n = 2 + gen() % 40;
        std::vector<oracle::EmbeddedPaper> ps(n);
        for (std::size_t i = 0; i < n; ++i) {
            ps[i].id = "p" + std::to_string(gen() % 1000) + "_" + std::to_string(i);
            ps[i].day = day(gen) / 7 * 7;
            if (gen() % 10) {
                std::vector<float> v(dim);
                for (auto& x : v) x = g(gen);
                ps[i].vec = v;
            }
        }
        std::sort(ps.begin(), ps.end(), [](auto& a, auto& b) { return std::tie(a.day, a.id) < std::tie(b.day, b.id); });
        const auto got = run(ps, dim, 1 + instance % 3);
        for (std::size_t i = 0; i < n; ++i) {
            const auto want = oracle::brute_distance(ps, i);
            t.expect(got[i].has_value() == want.has_value(), "presence, instance " + std::to_string(instance));
            if (want && got[i]) {
                t.expect(*got[i] == *want, "value, instance " + std::to_string(instance));
                ++compared;
            }
        }
    }
    // window edges: a candidate 1826 days back counts, 1827 does not
    std::vector<oracle::EmbeddedPaper> edge{{"A", 0, std::vector<float>{1, 0}},
                                            {"B", 1826, std::vector<float>{0, 1}},
                                            {"C", 1827, std::vector<float>{1, 0}}};
    const auto d = run(edge, 2, 1);
    t.expect(d[1] && *d[1] == 1.0, "1826-day candidate is in the window");
    t.expect(d[2] && *d[2] == 1.0, "1827-day candidate is outside the window");
    std::vector<oracle::EmbeddedPaper> inside{{"A", 0, std::vector<float>{1, 0}}, {"C", 1826, std::vector<float>{1, 0}}};
    const auto e = run(inside, 2, 1);
    t.expect(e[1] && *e[1] == 0.0, "identical vector 1826 days back gives distance 0");
    return t.outcome(std::to_string(compared) + " focal papers over 1000 instances; window edges");
}

corpus::PaperRecord record(std::string id, std::string date, std::string venue, std::vector<std::string> refs = {}) {
    corpus::PaperRecord r;
    r.paper_id = std::move(id);
    r.pub_date = Date::parse(date);
    r.title = "t";
    r.venue_id = std::move(venue);
    r.references = std::move(refs);
    return r;
}

cite::CitationGraph graph_of(std::vector<corpus::PaperRecord> rs) {
    corpus::sort_records(rs);
    return cite::build_graph(rs);
}

Outcome cd_index() {
    Tally t;
    auto cd_of = [](std::vector<corpus::PaperRecord> rs) {
        auto g = graph_of(std::move(rs));
        return cite::cd_index(cite::disruption_counts(g, *g.ordinal("F")));
    };
    const auto zero = cd_of({record("R", "1990-01-01", "J"), record("F", "1991-01-01", "J", {"R"}),
                             record("X", "1992-01-01", "J", {"F"}), record("Y", "1992-01-02", "J", {"F", "R"}),
                             record("Z", "1992-01-03", "J", {"R"})});
    const auto plus = cd_of({record("R", "1990-01-01", "J"), record("F", "1991-01-01", "J", {"R"}),
                             record("X", "1992-01-01", "J", {"F"}), record("Y", "1992-01-02", "J", {"F"})});
    const auto minus = cd_of({record("R", "1990-01-01", "J"), record("F", "1991-01-01", "J", {"R"}),
                              record("X", "1992-01-01", "J", {"F", "R"}), record("Y", "1992-01-02", "J", {"F", "R"})});
    t.expect(zero && *zero == 0.0, "balanced case gives 0");
    t.expect(plus && *plus == 1.0, "disruptive case gives +1");
    t.expect(minus && *minus == -1.0, "consolidating case gives -1");

    std::mt19937_64 gen(77);
    std::size_t scored = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 49);
        const double density = 0.02 + 0.3 * static_cast<double>(gen() % 100) / 100.0;
        std::vector<corpus::PaperRecord> rs;
        std::vector<std::set<int>> refs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> r;
            for (int j = 0; j < i; ++j)
                if (static_cast<double>(gen() % 1000) / 1000.0 < density) {
                    refs[static_cast<std::size_t>(i)].insert(j);
                    r.push_back("n" + std::to_string(1000 + j));
                }
            rs.push_back(record("n" + std::to_string(1000 + i), Date(10000 + i * 40).to_string(), "J", r));
        }
        const auto g = cite::build_graph(rs);
        const auto got = cite::cd_scores(g, 0, 1 + trial % 2);
        for (int f = 0; f < n; ++f) {
            int nf = 0, nb = 0, nr = 0;
            for (int x = f + 1; x < n; ++x) {
                const auto& rx = refs[static_cast<std::size_t>(x)];
                const bool cites_f = rx.count(f) > 0;
                bool cites_r = false;
                for (int r : refs[static_cast<std::size_t>(f)]) cites_r = cites_r || rx.count(r) > 0;
                nf += cites_f && !cites_r;
                nb += cites_f && cites_r;
                nr += !cites_f && cites_r;
            }
            const auto& v = got[static_cast<std::size_t>(f)];
            const std::string where = "dag " + std::to_string(trial) + " node " + std::to_string(f);
            if (nf + nb + nr == 0) {
                t.expect(!v.has_value(), where + " should be absent");
                continue;
            }
            t.expect(v.has_value(), where + " should be present");
            if (!v) continue;
            ++scored;
            t.expect(*v == static_cast<double>(nf - nb) / static_cast<double>(nf + nb + nr), where);
            t.expect(*v >= -1.0 && *v <= 1.0, where + " out of [-1, 1]");
        }
    }
    return t.outcome("hand cases 0/+1/-1; " + std::to_string(scored) + " scored nodes over 100 DAGs");
}

Outcome uzzi() {
    Tally t;
    std::vector<corpus::PaperRecord> rs;
    for (const char* j : {"J1", "J2", "J3", "J4"}) rs.push_back(record(std::string("R") + j, "1980-01-01", j));
    rs.push_back(record("P1", "1990-02-01", "J1", {"RJ1", "RJ2"}));
    rs.push_back(record("P2", "1990-03-01", "J1", {"RJ1", "RJ2", "RJ3"}));
    rs.push_back(record("P3", "1990-04-01", "J1", {"RJ3", "RJ4"}));
    rs.push_back(record("P4", "1990-05-01", "J1", {"RJ1", "RJ4"}));
    rs.push_back(record("P5", "1990-06-01", "J1", {"RJ2", "RJ3", "RJ4"}));
    rs.push_back(record("S", "1991-01-01", "J1", {"RJ1", "RJ2"}));
    const auto g = graph_of(rs);
    cite::UzziOptions opts;
    opts.n_rewirings = 50;
    opts.seed = 42;
    const auto a = cite::uzzi_scores(g, opts);
    const auto b = cite::uzzi_scores(g, opts);
    opts.threads = 4;
    const auto c = cite::uzzi_scores(g, opts);
    for (std::size_t i = 0; i < a.size(); ++i) {
        t.expect(a[i].has_value() == b[i].has_value() && a[i].has_value() == c[i].has_value(), "presence");
        if (a[i] && b[i] && c[i]) {
            t.expect(std::memcmp(&*a[i], &*b[i], sizeof(double)) == 0, "bitwise rerun " + g.ids[i]);
            t.expect(std::memcmp(&*a[i], &*c[i], sizeof(double)) == 0, "bitwise 4 threads " + g.ids[i]);
        }
    }
    t.expect(!a[*g.ordinal("S")].has_value(), "single-paper year is absent");

    std::mt19937_64 gen(5);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (int i = 0; i < 120; ++i)
        edges.emplace_back(static_cast<std::uint32_t>(gen() % 30), static_cast<std::uint32_t>(gen() % 12));
    auto degrees = [](const auto& es) {
        std::map<std::uint32_t, int> paper, journal;
        for (const auto& [p, j] : es) {
            ++paper[p];
            ++journal[j];
        }
        return std::make_pair(paper, journal);
    };
    const auto want = degrees(edges);
    cite::Rewirer rw(edges, 42, 1999, 0);
    for (int step = 0; step < 10000; ++step) {
        rw.step();
        t.expect(degrees(rw.edges()) == want, "degrees after step " + std::to_string(step));
    }
    t.expect(rw.edges() != edges, "rewiring moved edges");
    return t.outcome("rerun and 4 threads bitwise equal; degrees held over 10^4 swap steps");
}

Outcome wang() {
    Tally t;
    std::vector<corpus::PaperRecord> rs;
    for (const char* j : {"A", "B", "C", "D"}) rs.push_back(record(std::string("R") + j, "1990-01-01", j));
    rs.push_back(record("P1", "2000-01-01", "A", {"RA", "RC"}));
    rs.push_back(record("P2", "2000-02-01", "A", {"RB", "RC"}));
    rs.push_back(record("P3", "2000-03-01", "A", {"RA", "RD"}));
    rs.push_back(record("P4", "2001-01-01", "A", {"RA", "RB"}));
    rs.push_back(record("P5", "2001-02-01", "A", {"RA", "RB"}));
    rs.push_back(record("P6", "2002-01-01", "A", {"RA", "RC"}));
    const auto g = graph_of(rs);
    const auto w = cite::wang_scores(g);
    auto at = [&](const char* id) { return w[*g.ordinal(id)]; };
    // profiles from 2000: A = {C:1, D:1}, B = {C:1}
    const double want = 1.0 - 1.0 / std::sqrt(2.0);
    t.expect(at("P4") && std::fabs(*at("P4") - want) <= 1e-12, "hand cosine");
    t.expect(at("P5") && *at("P5") == 0.0, "pair already seen earlier in the year");
    t.expect(at("P6") && *at("P6") == 0.0, "pair cited before");

    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<corpus::PaperRecord> base;
        for (int j = 0; j < 8; ++j) base.push_back(record("R" + std::to_string(j), "1980-01-01", "J" + std::to_string(j)));
        auto random_refs = [&] {
            std::vector<std::string> refs;
            for (int j = 0; j < 8; ++j)
                if (gen() % 3 == 0) refs.push_back("R" + std::to_string(j));
            return refs;
        };
        for (int i = 0; i < 20; ++i)
            base.push_back(record("P" + std::to_string(100 + i), Date::from_ymd(1990 + i / 5, 1 + i % 5, 2).to_string(),
                                  "J0", random_refs()));
        const auto g1 = graph_of(base);
        const auto before = cite::wang_scores(g1);
        auto grown = base;
        const int year = 1990 + static_cast<int>(gen() % 4);
        grown.push_back(record("P0_extra", Date::from_ymd(year, 1, 1).to_string(), "J0", random_refs()));
        const auto g2 = graph_of(grown);
        const auto after = cite::wang_scores(g2);
        for (std::uint32_t p = 0; p < g1.size(); ++p) {
            if (g1.dates[p].year() != year) continue;
            const auto q = *g2.ordinal(g1.ids[p]);
            t.expect(before[p].has_value() == after[q].has_value(), "presence " + g1.ids[p]);
            if (before[p] && after[q]) t.expect(*after[q] <= *before[p] + 1e-12, "increase at " + g1.ids[p]);
        }
    }
    return t.outcome("hand cosine to 1e-12; zero without new pairs; 50 growth trials");
}

Outcome mann_whitney() {
    Tally t;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> grid(0, 4);
    double worst = 0;
    std::string worst_case;
    std::size_t samples = 0, within = 0;
    for (std::size_t n = 1; n <= 7; ++n)
        for (std::size_t m = 1; m <= 7; ++m)
            for (int draw = 0; draw < 5; ++draw) {
                std::vector<double> x(n), y(m);
                for (auto& v : x) v = grid(rng);
                for (auto& v : y) v = grid(rng);
                const auto r = stats::mann_whitney(x, y);
                t.expect(r.u_x == oracle::u_by_pairs(x, y), "U for n=" + std::to_string(n) + " m=" + std::to_string(m));
                const double exact = oracle::exact_mw_p(x, y);
                // all values tied: the normal p is undefined, so compare against 1
                const double approx = r.p_two_sided.value_or(1.0);
                const double dev = std::fabs(approx - exact);
                ++samples;
                within += dev <= 0.05;
                if (dev > worst) {
                    worst = dev;
                    std::ostringstream s;
                    s << "n=" << n << " m=" << m << " normal " << approx << " exact " << exact;
                    worst_case = s.str();
                }
            }
    const bool u_ok = t.ok();
    std::ostringstream detail;
    detail << "U exact in " << samples << " samples: " << (u_ok ? "yes" : "no") << "; normal p within 0.05 of exact in "
           << within << "/" << samples << ", worst " << worst << " (" << worst_case << ")";
    Outcome o{u_ok && worst <= 0.05, detail.str(), {}};
    if (!u_ok) o.detail += "\n      " + t.summary();
    return o;
}

Outcome glm() {
    Tally t;
    {
        std::vector<double> x{1, 1, 1, 1, 0, 0, 0, 0}, y{1, 1, 1, 0, 1, 0, 0, 0};
        const auto fit = stats::fit_glm(stats::build_design({{"x", x}}, {}, y), stats::Family::Logit);
        t.expect(std::fabs(fit.coef(0) - std::log(1.0 / 3)) <= 1e-8, "logit intercept");
        t.expect(std::fabs(fit.coef(1) - std::log(9.0)) <= 1e-8, "logit slope");
    }
    {
        std::vector<double> y{0, 3, 1, 7, 2, 4};
        const auto fit = stats::fit_glm(stats::build_design({}, {}, y), stats::Family::Poisson);
        t.expect(std::fabs(fit.coef(0) - std::log(17.0 / 6)) <= 1e-12, "poisson intercept");
    }
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> unit01;
    const int n = 40, k = 3;
    Eigen::MatrixXd x(n, k);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = 1;
        x(i, 1) = nd(rng);
        x(i, 2) = unit01(rng);
    }
    double worst_rel = 0;
    for (auto family : {stats::Family::Logit, stats::Family::FractionalLogit, stats::Family::Poisson,
                        stats::Family::Identity}) {
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            switch (family) {
                case stats::Family::Logit: y(i) = unit01(rng) < 0.4 ? 1 : 0; break;
                case stats::Family::FractionalLogit: y(i) = unit01(rng); break;
                case stats::Family::Poisson: y(i) = std::floor(4 * unit01(rng)); break;
                case stats::Family::Identity: y(i) = nd(rng); break;
            }
        }
        for (int point = 0; point < 10; ++point) {
            Eigen::VectorXd beta(k);
            for (int j = 0; j < k; ++j) beta(j) = 0.5 * nd(rng);
            const Eigen::VectorXd g = stats::score(family, x, y, beta);
            for (int j = 0; j < k; ++j) {
                const double h = 1e-5 * std::max(1.0, std::fabs(beta(j)));
                Eigen::VectorXd up = beta, down = beta;
                up(j) += h;
                down(j) -= h;
                const double fd =
                    (stats::log_likelihood(family, x, y, up) - stats::log_likelihood(family, x, y, down)) / (2 * h);
                const double rel = std::fabs(fd - g(j)) / std::max(1.0, std::fabs(g(j)));
                worst_rel = std::max(worst_rel, rel);
                t.expect(rel <= 1e-6, std::string(stats::family_name(family)) + " score component");
            }
        }
    }
    double worst_ols = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const int rows = 60;
        std::vector<double> a(rows), b(rows), y(rows);
        std::vector<std::vector<double>> design;
        for (int i = 0; i < rows; ++i) {
            a[i] = nd(rng);
            b[i] = 2 + nd(rng);
            y[i] = 1.5 - 0.7 * a[i] + 0.2 * b[i] + nd(rng);
            design.push_back({1, a[i], b[i]});
        }
        const auto fit = stats::fit_glm(stats::build_design({{"a", a}, {"b", b}}, {}, y), stats::Family::Identity);
        const auto beta = oracle::ols(design, y);
        for (int j = 0; j < 3; ++j) {
            const double d = std::fabs(fit.coef(j) - beta[static_cast<std::size_t>(j)]);
            worst_ols = std::max(worst_ols, d);
            t.expect(d <= 1e-10, "identity vs least squares");
        }
    }
    std::ostringstream note;
    note << "score rel. err max " << worst_rel << " (limit 1e-6); least squares diff max " << worst_ols
         << " (limit 1e-10)";
    return t.outcome(note.str());
}

Outcome auc() {
    Tally t;
    const auto c = stats::classification_metrics(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1});
    t.expect(c.auc && *c.auc == 0.75, "fixture AUC");
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coarse(0, 9), label(0, 1), size(2, 40);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> scores(static_cast<std::size_t>(size(rng)));
        std::vector<int> labels(scores.size());
        for (auto& v : scores) v = coarse(rng) / 10.0;
        for (auto& v : labels) v = label(rng);
        labels[0] = 0;
        labels[1] = 1;
        const auto m = stats::classification_metrics(scores, labels);
        t.expect(m.auc && *m.auc == oracle::auc_by_pairs(scores, labels), "trial " + std::to_string(trial));
    }
    return t.outcome("fixture 0.75 and 1000 random sets");
}

Outcome matching() {
    Tally t;
    auto unit = [](std::string id, std::string venue, int year, std::optional<int> sub, std::optional<int> field) {
        return stats::MatchUnit{std::move(id), {std::move(venue), year, sub, field}};
    };
    // one same-subfield control for two cases; the second falls back to the field
    const std::vector<stats::MatchUnit> cases{unit("a", "J", 2000, 1, 10), unit("b", "J", 2000, 1, 10),
                                              unit("c", "J", 2000, 3, 20)};
    const std::vector<stats::MatchUnit> pool{unit("p1", "J", 2000, 1, 10), unit("p2", "J", 2000, 2, 10),
                                             unit("p3", "J", 2001, 1, 10), unit("p4", "K", 2000, 1, 10),
                                             unit("p5", "J", 2000, 4, 30)};
    const auto r = stats::match_case_control(cases, pool, 3);
    t.expect(r.pairs.size() == 2, "two pairs");
    if (r.pairs.size() == 2) {
        t.expect(r.pairs[0].case_id == "a" && r.pairs[0].control_id == "p1" &&
                     r.pairs[0].level == stats::MatchLevel::Subfield,
                 "a matched within the subfield");
        t.expect(r.pairs[1].case_id == "b" && r.pairs[1].control_id == "p2" &&
                     r.pairs[1].level == stats::MatchLevel::Field,
                 "b falls back to the field");
    }
    t.expect(r.unmatched == std::vector<std::string>{"c"}, "c has no venue-year-field peer");

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> sub(1, 4), yr(2000, 2001);
    std::vector<stats::MatchUnit> many, big_pool;
    for (int i = 0; i < 40; ++i) many.push_back(unit("c" + std::to_string(i), "J", yr(rng), sub(rng), 10 + sub(rng) / 3));
    for (int i = 0; i < 60; ++i)
        big_pool.push_back(unit("p" + std::to_string(i), "J", yr(rng), sub(rng), 10 + sub(rng) / 3));
    const auto x = stats::match_case_control(many, big_pool, 42);
    const auto y = stats::match_case_control(many, big_pool, 42);
    t.expect(x.pairs.size() == y.pairs.size(), "rerun pair count");
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < std::min(x.pairs.size(), y.pairs.size()); ++i) {
        t.expect(x.pairs[i].control_id == y.pairs[i].control_id && x.pairs[i].level == y.pairs[i].level,
                 "rerun pair " + std::to_string(i));
        fallbacks += x.pairs[i].level == stats::MatchLevel::Field;
    }
    return t.outcome("fixture fallback exact; seeded rerun identical (" + std::to_string(fallbacks) +
                     " field-level pairs)");
}

Outcome novelty_language() {
    const auto d = text::NoveltyDetector::load(kData / "novelty_words.json");
    Tally t;
    t.expect(d.detect("novel", std::nullopt), "\"novel\" should be flagged");
    t.expect(!d.detect("New York", std::nullopt), "\"New York\" should not be flagged");
    t.expect(!d.detect("not new", std::nullopt), "\"not new\" should not be flagged");
    return t.outcome("novel -> true, New York -> false, not new -> false");
}

Outcome golden() {
    const auto out = scratch("golden");
    run_all(fixture_config(out, 1));
    Tally t;
    const auto golden_dir = kFixture / "golden";
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(golden_dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), golden_dir);
        ++files;
        t.expect(fs::exists(out / rel) && slurp(e.path()) == slurp(out / rel), rel.string());
    }
    return t.outcome(std::to_string(files) + " checked-in artifacts");
}

Outcome parallel_determinism() {
    Tally t;
    const auto one = scratch("threads1"), eight = scratch("threads8"), again = scratch("threads1_again");
    run_all(fixture_config(one, 1));
    run_all(fixture_config(eight, 8));
    compare_trees(one, eight, t, "8 threads");

    run_all(fixture_config(again, 1));
    compare_trees(one, again, t, "rerun");
    t.expect(slurp(one / "run_manifest.json") == slurp(again / "run_manifest.json"), "run manifest differs on rerun");

    // reshard: the same records shuffled into five files
    const auto shards_dir = scratch("reshard_input"), resharded = scratch("reshard");
    std::vector<std::string> lines;
    for (const auto& f : fixture_config(one, 1).corpus) {
        std::ifstream in(f);
        for (std::string line; std::getline(in, line);) lines.push_back(line);
    }
    std::shuffle(lines.begin(), lines.end(), std::mt19937_64(17));
    auto c = fixture_config(resharded, 8);
    c.corpus.clear();
    for (std::size_t s = 0; s < 5; ++s) {
        const auto path = shards_dir / ("part" + std::to_string(s) + ".jsonl");
        std::ofstream out(path);
        for (std::size_t i = s; i < lines.size(); i += 5) out << lines[i] << '\n';
        c.corpus.push_back(path);
    }
    run_all(c);
    compare_trees(one, resharded, t, "5 shuffled shards");
    return t.outcome(std::to_string(artifacts(one).size()) + " artifacts; 1 vs 8 threads, rerun, resharded input");
}

// --- performance -------------------------------------------------------------------------

/// Streams a deterministic synthetic corpus without materializing it.
class GeneratedSource final : public novelty::PaperSource {
public:
    GeneratedSource(std::size_t papers, std::size_t vocab) : papers_(papers), vocab_(vocab) {}

    bool next(novelty::PaperTerms& out) override {
        if (pos_ >= papers_) return false;
        std::mt19937_64 gen(novelty::mix64(0x5eed ^ pos_));
        std::uniform_int_distribution<int> count(20, 40);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        out.paper_id = "G" + std::to_string(10000000 + pos_);
        out.date = Date(static_cast<std::int32_t>(pos_ / 40));  // about 100 years of papers
        auto& s = out.sets;
        s.words.clear();
        s.partner_words.clear();
        s.phrases.clear();
        const int n = count(gen);
        while (static_cast<int>(s.words.size()) < n) {
            const double x = u(gen);
            s.words.push_back("t" + std::to_string(static_cast<std::size_t>(static_cast<double>(vocab_) * x * x * x)));
            if (s.words.size() == static_cast<std::size_t>(n)) {
                std::sort(s.words.begin(), s.words.end());
                s.words.erase(std::unique(s.words.begin(), s.words.end()), s.words.end());
            }
        }
        for (int k = 0; k < 3; ++k) {
            const double x = u(gen);
            s.phrases.push_back("ph" + std::to_string(static_cast<std::size_t>(static_cast<double>(vocab_) * x * x)) +
                                "_x");
        }
        std::sort(s.phrases.begin(), s.phrases.end());
        s.phrases.erase(std::unique(s.phrases.begin(), s.phrases.end()), s.phrases.end());
        text::build_pairs(s);
        ++pos_;
        return true;
    }
    void rewind() override { pos_ = 0; }

private:
    std::size_t papers_, vocab_;
    std::size_t pos_ = 0;
};

std::size_t g_perf_papers = 1000000;

Outcome performance() {
    const std::uint64_t budget = 4ULL << 30;
    novelty::EngineOptions opts;
    opts.memory_budget = budget;
    opts.collect_term_stats = false;
    opts.spill_dir = scratch("perf_spill");
    GeneratedSource src(g_perf_papers, 200000);
    novelty::NoveltyEngine engine(opts);
    const auto t0 = std::chrono::steady_clock::now();
    engine.pass1(src);
    const double pass1 = seconds_since(t0);
    src.rewind();
    const auto t1 = std::chrono::steady_clock::now();
    const auto r = engine.pass2(src);
    const double pass2 = seconds_since(t1);

    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    const auto peak_rss = static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
    const double rate = static_cast<double>(g_perf_papers) / pass1;
    std::ostringstream d;
    d << g_perf_papers << " papers; counting pass " << pass1 << " s (" << static_cast<long>(rate)
      << " papers/s), second pass " << pass2 << " s; spills " << r.summary.spills << "; peak table bytes "
      << r.summary.peak_table_bytes << ", peak RSS " << peak_rss << " (budget " << budget << ")";
    Outcome o{true, d.str(), {}};
    if (r.summary.peak_table_bytes > budget || peak_rss > budget) o.pass = false;
    if (r.summary.spills == 0) o.warnings.push_back("spill was not engaged at this corpus size");
    if (rate < 20000) o.warnings.push_back("throughput below the 20000 papers/s soft target");
    return o;
}

struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"novelty_oracle", "novelty core equals the chronological oracle on 200 corpora", novelty_oracle},
        {"parallel_determinism", "fixture artifacts identical for 1 vs 8 threads and resharded input",
         parallel_determinism},
        {"reuse_identity", "sum of paper reuse equals sum of occ over credited terms", reuse_identity},
        {"reuse_formula", "new words with reuse {4,1} give new_word_reuse 7", reuse_formula},
        {"singleton_exclusion", "terms with occ 1 are never credited", singleton_exclusion},
        {"noun_phrases", "worked title example yields exactly four noun phrases", noun_phrases},
        {"semantic_distance", "semantic distance equals the exhaustive scan; window edges", semantic_distance},
        {"cd_index", "CD hand cases, random DAG oracle and bounds", cd_index},
        {"uzzi", "Uzzi reproducibility, degree preservation, degenerate year", uzzi},
        {"wang", "Wang zero case, monotone growth, hand cosine", wang},
        {"mann_whitney", "Mann-Whitney U exact; normal p within 0.05 of exact (n, m <= 7)", mann_whitney},
        {"glm", "GLM closed forms, score vs finite differences, least squares", glm},
        {"auc", "AUC equals pairwise concordance", auc},
        {"matching", "case-control field fallback and seeded determinism", matching},
        {"novelty_language", "novelty-language guard vector", novelty_language},
        {"performance", "1M-paper counting under a 4 GiB budget", performance},
        {"golden", "bundled fixture reproduces checked-in artifacts", golden},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<std::string> selected;
    bool list = false;
    app.add_option("--criterion", selected, "criterion id (repeatable)");
    app.add_flag("--list", list, "print criterion ids");
    app.add_option("--perf-papers", g_perf_papers, "papers in the performance corpus");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& c : criteria()) std::cout << c.id << '\t' << c.title << '\n';
        return 0;
    }
    for (const auto& id : selected)
        if (std::none_of(criteria().begin(), criteria().end(), [&](const auto& c) { return c.id == id; })) {
            std::cerr << "unknown criterion " << id << '\n';
            return 1;
        }

    int failed = 0;
    for (const auto& c : criteria()) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what(), {}};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << ": " << c.title << " [" << o.detail << "] ("
                  << static_cast<long>(seconds_since(t0) * 1000) << " ms)\n";
        for (const auto& w : o.warnings) std::cout << "  WARN " << c.id << ": " << w << '\n';
        std::cout.flush();
    }
    fs::remove_all(fs::temp_directory_path() / ("scinov_acceptance_" + std::to_string(::getpid())));
    return failed == 0 ? 0 : 1;
}
