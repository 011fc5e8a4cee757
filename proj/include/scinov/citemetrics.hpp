#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scinov/corpus.hpp"

namespace scinov::cite {

inline constexpr std::uint32_t kNoJournal = 0xffffffffU;

/// Resolved citation edges over a sorted corpus. Papers and journals are
/// referred to by dense ordinals; journal ordinals follow venue_id order.
struct CitationGraph {
    std::vector<std::string> ids;
    std::vector<Date> dates;
    std::vector<std::uint32_t> journal;  // kNoJournal when the venue is empty
    std::vector<std::string> journal_names;
    std::vector<std::vector<std::uint32_t>> cites;      // sorted, distinct
    std::vector<std::vector<std::uint32_t>> cited_by;   // sorted, distinct
    std::vector<std::uint32_t> n_refs;                  // distinct references, resolved or not
    std::vector<std::uint32_t> n_ref_journals;          // distinct venues of resolved references

    std::size_t unresolved = 0;
    std::size_t self_citations = 0;
    std::size_t duplicate_references = 0;

    [[nodiscard]] std::size_t size() const { return ids.size(); }
    [[nodiscard]] std::optional<std::uint32_t> ordinal(const std::string& id) const;
    /// Distinct journals of the resolved references, ascending.
    [[nodiscard]] std::vector<std::uint32_t> reference_journals(std::uint32_t paper) const;

    std::unordered_map<std::string, std::uint32_t> index;
};

/// `records` must be sorted by order_key.
CitationGraph build_graph(const std::vector<corpus::PaperRecord>& records);

// --- Uzzi -------------------------------------------------------------------

struct UzziOptions {
    std::uint64_t seed = 42;
    int n_rewirings = 10;
    /// Swap attempts per rewiring, as a multiple of the year's edge count.
    double swaps_per_edge = 10.0;
    unsigned threads = 1;
};

using JournalPair = std::pair<std::uint32_t, std::uint32_t>;  // first < second

struct JournalPairStats {
    std::uint32_t observed = 0;
    double null_mean = 0.0;
    double null_std = 0.0;
    std::optional<double> z;
};

/// Degree-preserving endpoint swaps on one year's paper -> journal edges.
/// Every step picks two edges uniformly and exchanges their journals.
class Rewirer {
public:
    Rewirer(std::vector<std::pair<std::uint32_t, std::uint32_t>> edges, std::uint64_t seed, int year,
            int rewiring);
    void step();
    [[nodiscard]] const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
    std::mt19937_64 gen_;
};

/// Per-year pair statistics, keyed by publication year.
using UzziTables = std::map<int, std::map<JournalPair, JournalPairStats>>;

/// 10th percentile (lower interpolation) of each paper's journal-pair
/// z-scores. Absent when the paper cites fewer than two journals or no pair
/// has a defined z. Throws UsageError when n_rewirings < 2.
std::vector<std::optional<double>> uzzi_scores(const CitationGraph& graph, const UzziOptions& options,
                                               UzziTables* tables = nullptr);

/// Lower-interpolated quantile of unsorted values; nullopt when empty.
std::optional<double> lower_quantile(std::vector<double> values, double q);

// --- Wang -------------------------------------------------------------------

/// Sum over the paper's journal pairs that no earlier paper co-cited of
/// 1 - cos(profile_i, profile_j), where a journal's profile counts its
/// co-citations by papers of earlier years. Zero profiles give distance 1.
/// Absent when the paper cites fewer than two journals.
std::vector<std::optional<double>> wang_scores(const CitationGraph& graph);

/// Cosine of two sparse count vectors; 0 when either is empty.
double sparse_cosine(const std::map<std::uint32_t, double>& a, const std::map<std::uint32_t, double>& b);

// --- CD ---------------------------------------------------------------------

struct DisruptionCounts {
    std::uint32_t n_f = 0;  // cite the focal paper only
    std::uint32_t n_b = 0;  // cite the focal paper and one of its references
    std::uint32_t n_r = 0;  // cite a reference but not the focal paper
};

/// Counts later papers (by order_key) published within `window_years`
/// calendar years of the focal paper; 0 means no limit.
DisruptionCounts disruption_counts(const CitationGraph& graph, std::uint32_t focal, int window_years = 0);
std::optional<double> cd_index(const DisruptionCounts& counts);
std::vector<std::optional<double>> cd_scores(const CitationGraph& graph, int window_years = 0,
                                             unsigned threads = 1);

}  // namespace scinov::cite
