#include "scinov/stats.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <tuple>
#include <unordered_set>

namespace scinov::stats {

std::string_view level_name(MatchLevel level) {
    return level == MatchLevel::Subfield ? "subfield" : "field";
}

namespace {

using Cell = std::tuple<std::string, int, int>;  // venue, year, subfield or field

}  // namespace

MatchResult match_case_control(std::vector<MatchUnit> cases, const std::vector<MatchUnit>& pool,
                               std::uint64_t seed) {
    std::sort(cases.begin(), cases.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::unordered_set<std::string> case_ids;
    for (const auto& c : cases) case_ids.insert(c.id);

    // pool indices per cell, in id order so that draws do not depend on pool order
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!case_ids.contains(pool[i].id)) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pool[a].id < pool[b].id; });
    std::map<Cell, std::vector<std::size_t>> by_subfield, by_field;
    for (auto i : order) {
        const auto& k = pool[i].key;
        if (k.subfield) by_subfield[{k.venue, k.year, *k.subfield}].push_back(i);
        if (k.field) by_field[{k.venue, k.year, *k.field}].push_back(i);
    }

    std::mt19937_64 rng(seed);
    std::vector<char> used(pool.size(), 0);
    auto draw = [&](const std::map<Cell, std::vector<std::size_t>>& cells, const Cell& cell)
        -> std::optional<std::size_t> {
        auto it = cells.find(cell);
        if (it == cells.end()) return std::nullopt;
        std::vector<std::size_t> free;
        for (auto i : it->second)
            if (!used[i]) free.push_back(i);
        if (free.empty()) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
        return free[pick(rng)];
    };

    MatchResult out;
    for (const auto& c : cases) {
        std::optional<std::size_t> hit;
        MatchLevel level = MatchLevel::Subfield;
        if (c.key.subfield) hit = draw(by_subfield, {c.key.venue, c.key.year, *c.key.subfield});
        if (!hit && c.key.field) {
            hit = draw(by_field, {c.key.venue, c.key.year, *c.key.field});
            level = MatchLevel::Field;
        }
        if (!hit) {
            out.unmatched.push_back(c.id);
            continue;
        }
        used[*hit] = 1;
        out.pairs.push_back({c.id, pool[*hit].id, level});
    }
    return out;
}

}  // namespace scinov::stats
