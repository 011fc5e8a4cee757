#include "scinov/stats.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "scinov/count_store.hpp"
#include "scinov/error.hpp"

namespace scinov::stats {

namespace {

const std::vector<std::string> kControlNames{"has_abstract", "word_count", "phrase_count", "n_refs",
                                             "n_ref_journals"};

std::string control_name(std::size_t i) {
    return i < kControlNames.size() ? kControlNames[i] : "control" + std::to_string(i);
}

std::string label_of(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("none"); }

MatchUnit unit_of(const PaperFacts& p) { return {p.id, {p.venue, p.year, p.subfield, p.field}}; }

}  // namespace

ReuseAnalysis reuse_citation_analysis(const std::vector<ReusedTerm>& terms, const std::vector<PaperFacts>& papers,
                                      const std::function<bool(std::uint32_t, std::uint32_t)>& cites,
                                      std::uint64_t seed, double confidence) {
    std::unordered_map<std::string, std::uint32_t> ordinal_of;
    std::map<std::pair<std::string, int>, std::vector<std::uint32_t>> by_venue_year;
    for (std::uint32_t i = 0; i < papers.size(); ++i) {
        ordinal_of.emplace(papers[i].id, i);
        by_venue_year[{papers[i].venue, papers[i].year}].push_back(i);
    }
    auto check = [&](std::uint32_t p) {
        if (p >= papers.size()) throw DataError("reuse analysis: paper ordinal out of range");
    };

    ReuseAnalysis out;
    std::size_t reuser_hits = 0, control_hits = 0;
    // rows of the gap model: (pioneer, reuser)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> gap_rows;

    for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& term = terms[t];
        check(term.pioneer);
        std::unordered_set<std::uint32_t> containing(term.containing.begin(), term.containing.end());
        containing.insert(term.pioneer);
        std::vector<MatchUnit> cases;
        std::set<std::pair<std::string, int>> cells;
        for (auto r : term.reusers) {
            check(r);
            containing.insert(r);
            cases.push_back(unit_of(papers[r]));
            cells.insert({papers[r].venue, papers[r].year});
        }
        std::vector<MatchUnit> pool;
        for (const auto& cell : cells) {
            auto it = by_venue_year.find(cell);
            if (it == by_venue_year.end()) continue;
            for (auto i : it->second)
                if (!containing.contains(i)) pool.push_back(unit_of(papers[i]));
        }
        const auto matched = match_case_control(std::move(cases), pool, novelty::mix64(seed ^ novelty::mix64(t)));
        if (matched.pairs.empty()) {
            ++out.terms_excluded;
            continue;
        }
        ++out.terms;
        for (const auto& pair : matched.pairs) {
            const auto r = ordinal_of.at(pair.case_id);
            const auto c = ordinal_of.at(pair.control_id);
            ++out.reusers;
            ++out.controls;
            reuser_hits += cites(r, term.pioneer) ? 1 : 0;
            control_hits += cites(c, term.pioneer) ? 1 : 0;
            gap_rows.emplace_back(term.pioneer, r);
        }
    }
    if (out.reusers == 0) return out;
    out.rate_reusing = static_cast<double>(reuser_hits) / static_cast<double>(out.reusers);
    out.rate_control = static_cast<double>(control_hits) / static_cast<double>(out.controls);
    if (out.rate_control > 0) out.ratio = out.rate_reusing / out.rate_control;

    // linear probability model of citing the pioneer on year-gap indicators
    std::vector<int> gaps;
    std::vector<double> outcome;
    for (auto [p, r] : gap_rows) {
        gaps.push_back(std::max(0, papers[r].year - papers[p].year));
        outcome.push_back(cites(r, p) ? 1.0 : 0.0);
    }
    const std::set<int> levels(gaps.begin(), gaps.end());
    std::vector<std::pair<std::string, std::vector<double>>> covariates;
    for (int g : levels) {
        if (g == 0) continue;
        std::vector<double> col;
        for (int v : gaps) col.push_back(v == g ? 1.0 : 0.0);
        covariates.emplace_back("gap=" + std::to_string(g), std::move(col));
    }
    const std::size_t n_controls = papers[gap_rows.front().first].controls.size();
    for (const char* role : {"pioneer", "reuser"}) {
        for (std::size_t c = 0; c < n_controls; ++c) {
            std::vector<double> col;
            for (auto [p, r] : gap_rows) {
                const auto& facts = papers[role[0] == 'p' ? p : r];
                if (facts.controls.size() != n_controls) throw DataError("inconsistent control columns");
                col.push_back(facts.controls[c]);
            }
            covariates.emplace_back(std::string(role) + ":" + control_name(c), std::move(col));
        }
    }
    std::vector<std::pair<std::string, std::vector<std::string>>> fixed_effects(3);
    fixed_effects[0].first = "pioneer_subfield";
    fixed_effects[1].first = "reuser_subfield";
    fixed_effects[2].first = "pioneer_year";
    for (auto [p, r] : gap_rows) {
        fixed_effects[0].second.push_back(label_of(papers[p].subfield));
        fixed_effects[1].second.push_back(label_of(papers[r].subfield));
        fixed_effects[2].second.push_back(std::to_string(papers[p].year));
    }
    const auto design = build_design(covariates, fixed_effects, outcome);
    out.gap_fit = fit_glm(design, Family::Identity);

    for (int g : levels) {
        std::vector<std::pair<std::string, double>> settings;
        for (int other : levels)
            if (other != 0) settings.emplace_back("gap=" + std::to_string(other), other == g ? 1.0 : 0.0);
        out.gap_predictions.push_back({g, average_prediction(*out.gap_fit, design, settings, confidence)});
    }
    return out;
}

}  // namespace scinov::stats
