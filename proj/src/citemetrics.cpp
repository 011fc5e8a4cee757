#include "scinov/citemetrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "scinov/error.hpp"
#include "scinov/parallel.hpp"

namespace scinov::cite {

std::optional<std::uint32_t> CitationGraph::ordinal(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint32_t> CitationGraph::reference_journals(std::uint32_t paper) const {
    std::vector<std::uint32_t> out;
    for (auto r : cites[paper])
        if (journal[r] != kNoJournal) out.push_back(journal[r]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CitationGraph build_graph(const std::vector<corpus::PaperRecord>& records) {
    CitationGraph g;
    const auto n = records.size();
    g.ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[i];
        if (i > 0 && !(corpus::order_key(records[i - 1]) < corpus::order_key(r)))
            throw DataError("citation graph input not sorted by (date, id) at " + r.paper_id);
        g.ids.push_back(r.paper_id);
        g.dates.push_back(r.pub_date);
        g.index.emplace(r.paper_id, static_cast<std::uint32_t>(i));
    }

    std::set<std::string> venues;
    for (const auto& r : records)
        if (!r.venue_id.empty()) venues.insert(r.venue_id);
    g.journal_names.assign(venues.begin(), venues.end());
    std::unordered_map<std::string, std::uint32_t> journal_of;
    for (std::size_t j = 0; j < g.journal_names.size(); ++j)
        journal_of.emplace(g.journal_names[j], static_cast<std::uint32_t>(j));
    g.journal.resize(n, kNoJournal);
    for (std::size_t i = 0; i < n; ++i)
        if (!records[i].venue_id.empty()) g.journal[i] = journal_of.at(records[i].venue_id);

    g.cites.resize(n);
    g.cited_by.resize(n);
    g.n_refs.resize(n);
    g.n_ref_journals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> refs = records[i].references;
        std::sort(refs.begin(), refs.end());
        const auto before = refs.size();
        refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
        g.duplicate_references += before - refs.size();
        std::uint32_t counted = 0;
        for (const auto& ref : refs) {
            if (ref == records[i].paper_id) {
                ++g.self_citations;
                continue;
            }
            ++counted;
            auto it = g.index.find(ref);
            if (it == g.index.end()) {
                ++g.unresolved;
                continue;
            }
            g.cites[i].push_back(it->second);
        }
        g.n_refs[i] = counted;
        std::sort(g.cites[i].begin(), g.cites[i].end());
    }
    for (std::uint32_t i = 0; i < n; ++i)
        for (auto r : g.cites[i]) g.cited_by[r].push_back(i);  // i ascending, so already sorted
    for (std::uint32_t i = 0; i < n; ++i)
        g.n_ref_journals[i] = static_cast<std::uint32_t>(g.reference_journals(i).size());
    return g;
}

// --- Uzzi -------------------------------------------------------------------

namespace {

std::mt19937_64 seeded(std::uint64_t seed, int year, int rewiring) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(year), static_cast<std::uint32_t>(rewiring)};
    return std::mt19937_64(seq);
}

using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (paper, journal)

/// Number of papers co-citing each pair of distinct journals.
std::map<JournalPair, std::uint32_t> pair_counts(std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end());
    std::map<JournalPair, std::uint32_t> counts;
    std::vector<std::uint32_t> js;
    for (std::size_t i = 0; i < edges.size();) {
        std::size_t j = i;
        js.clear();
        while (j < edges.size() && edges[j].first == edges[i].first) js.push_back(edges[j++].second);
        js.erase(std::unique(js.begin(), js.end()), js.end());
        for (std::size_t a = 0; a < js.size(); ++a)
            for (std::size_t b = a + 1; b < js.size(); ++b) ++counts[{js[a], js[b]}];
        i = j;
    }
    return counts;
}

std::vector<JournalPair> pairs_of(const std::vector<std::uint32_t>& journals) {
    std::vector<JournalPair> out;
    for (std::size_t a = 0; a < journals.size(); ++a)
        for (std::size_t b = a + 1; b < journals.size(); ++b) out.emplace_back(journals[a], journals[b]);
    return out;
}

}  // namespace

Rewirer::Rewirer(std::vector<Edge> edges, std::uint64_t seed, int year, int rewiring)
    : edges_(std::move(edges)), gen_(seeded(seed, year, rewiring)) {}

void Rewirer::step() {
    if (edges_.size() < 2) return;
    std::uniform_int_distribution<std::size_t> pick(0, edges_.size() - 1);
    const auto a = pick(gen_);
    const auto b = pick(gen_);
    if (a != b) std::swap(edges_[a].second, edges_[b].second);
}

std::optional<double> lower_quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const auto pos = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    return values[pos];
}

std::vector<std::optional<double>> uzzi_scores(const CitationGraph& graph, const UzziOptions& options,
                                               UzziTables* tables) {
    if (options.n_rewirings < 2)
        throw UsageError("uzzi n_rewirings must be at least 2, got " + std::to_string(options.n_rewirings));
    const auto n = graph.size();

    std::map<int, std::vector<Edge>> edges_by_year;
    for (std::uint32_t p = 0; p < n; ++p)
        for (auto r : graph.cites[p])
            if (graph.journal[r] != kNoJournal) edges_by_year[graph.dates[p].year()].emplace_back(p, graph.journal[r]);

    std::vector<int> years;
    for (const auto& [y, e] : edges_by_year) years.push_back(y);
    std::vector<std::map<JournalPair, JournalPairStats>> stats(years.size());

    parallel_for(years.size(), options.threads, [&](std::size_t yi) {
        const int year = years[yi];
        const auto& edges = edges_by_year.at(year);
        auto& table = stats[yi];
        for (const auto& [pair, count] : pair_counts(edges)) table[pair].observed = count;

        // Null counts for the observed pairs only; other pairs never feed a score.
        std::map<JournalPair, std::vector<double>> samples;
        for (const auto& [pair, s] : table) samples[pair].reserve(static_cast<std::size_t>(options.n_rewirings));
        const auto swaps = static_cast<std::size_t>(std::llround(options.swaps_per_edge * static_cast<double>(edges.size())));
        for (int k = 0; k < options.n_rewirings; ++k) {
            Rewirer rw(edges, options.seed, year, k);
            for (std::size_t s = 0; s < swaps; ++s) rw.step();
            const auto null_counts = pair_counts(rw.edges());
            for (auto& [pair, v] : samples) {
                auto it = null_counts.find(pair);
                v.push_back(it == null_counts.end() ? 0.0 : static_cast<double>(it->second));
            }
        }
        for (auto& [pair, s] : table) {
            const auto& v = samples.at(pair);
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            s.null_mean = mean;
            s.null_std = std::sqrt(ss / static_cast<double>(v.size() - 1));
            if (s.null_std > 0.0) s.z = (static_cast<double>(s.observed) - mean) / s.null_std;
        }
    });

    std::map<int, std::size_t> year_slot;
    for (std::size_t i = 0; i < years.size(); ++i) year_slot[years[i]] = i;

    std::vector<std::optional<double>> out(n);
    for (std::uint32_t p = 0; p < n; ++p) {
        const auto journals = graph.reference_journals(p);
        if (journals.size() < 2) continue;
        const auto& table = stats[year_slot.at(graph.dates[p].year())];
        std::vector<double> zs;
        for (const auto& pair : pairs_of(journals)) {
            const auto& s = table.at(pair);
            if (s.z) zs.push_back(*s.z);
        }
        out[p] = lower_quantile(std::move(zs), 0.10);
    }
    if (tables) {
        tables->clear();
        for (std::size_t i = 0; i < years.size(); ++i) (*tables)[years[i]] = std::move(stats[i]);
    }
    return out;
}

// --- Wang -------------------------------------------------------------------

double sparse_cosine(const std::map<std::uint32_t, double>& a, const std::map<std::uint32_t, double>& b) {
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, v] : a) {
        na += v * v;
        auto it = b.find(k);
        if (it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<std::optional<double>> wang_scores(const CitationGraph& graph) {
    const auto n = graph.size();
    std::vector<std::optional<double>> out(n);
    std::set<JournalPair> seen;
    std::vector<std::map<std::uint32_t, double>> profile(graph.journal_names.size());
    std::vector<std::vector<JournalPair>> paper_pairs(n);
    std::uint32_t profiled = 0;  // papers [0, profiled) are folded into the profiles

    for (std::uint32_t p = 0; p < n; ++p) {
        const int year = graph.dates[p].year();
        for (; profiled < p && graph.dates[profiled].year() < year; ++profiled)
            for (const auto& [i, j] : paper_pairs[profiled]) {
                profile[i][j] += 1.0;
                profile[j][i] += 1.0;
            }

        const auto journals = graph.reference_journals(p);
        paper_pairs[p] = pairs_of(journals);
        if (journals.size() < 2) continue;
        double score = 0.0;
        for (const auto& pair : paper_pairs[p]) {
            if (seen.count(pair)) continue;
            score += 1.0 - sparse_cosine(profile[pair.first], profile[pair.second]);
        }
        out[p] = score;
        for (const auto& pair : paper_pairs[p]) seen.insert(pair);
    }
    return out;
}

// --- CD ---------------------------------------------------------------------

DisruptionCounts disruption_counts(const CitationGraph& graph, std::uint32_t focal, int window_years) {
    const int focal_year = graph.dates[focal].year();
    auto in_window = [&](std::uint32_t x) {
        return x > focal && (window_years <= 0 || graph.dates[x].year() - focal_year <= window_years);
    };
    std::vector<std::uint32_t> ref_citers;
    for (auto r : graph.cites[focal])
        for (auto x : graph.cited_by[r])
            if (in_window(x)) ref_citers.push_back(x);
    std::sort(ref_citers.begin(), ref_citers.end());
    ref_citers.erase(std::unique(ref_citers.begin(), ref_citers.end()), ref_citers.end());

    DisruptionCounts c;
    for (auto x : graph.cited_by[focal]) {
        if (!in_window(x)) continue;
        if (std::binary_search(ref_citers.begin(), ref_citers.end(), x))
            ++c.n_b;
        else
            ++c.n_f;
    }
    c.n_r = static_cast<std::uint32_t>(ref_citers.size()) - c.n_b;
    return c;
}

std::optional<double> cd_index(const DisruptionCounts& c) {
    const auto denom = c.n_f + c.n_b + c.n_r;
    if (denom == 0) return std::nullopt;
    return (static_cast<double>(c.n_f) - static_cast<double>(c.n_b)) / static_cast<double>(denom);
}

std::vector<std::optional<double>> cd_scores(const CitationGraph& graph, int window_years, unsigned threads) {
    std::vector<std::optional<double>> out(graph.size());
    parallel_for(graph.size(), threads, [&](std::size_t p) {
        out[p] = cd_index(disruption_counts(graph, static_cast<std::uint32_t>(p), window_years));
    });
    return out;
}

}  // namespace scinov::cite
