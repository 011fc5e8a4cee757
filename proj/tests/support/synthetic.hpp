#pragma once

// Seeded synthetic term streams for engine tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "scinov/novelty.hpp"

namespace synth {

struct CorpusShape {
    std::size_t papers = 200;
    std::size_t vocab = 200;
    std::size_t phrase_vocab = 120;
    std::size_t max_words = 12;
    std::size_t max_partners = 3;
    std::size_t max_phrases = 5;
    int years = 30;
};

inline std::string word_name(std::size_t i) { return "w" + std::to_string(i); }

/// Papers sorted by (date, id) with Zipf-ish term draws.
inline std::vector<scinov::novelty::PaperTerms> corpus(std::uint64_t seed, const CorpusShape& shape) {
    std::mt19937_64 gen(seed);
    auto zipf = [&](std::size_t n) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double x = u(gen);
        return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * x * x * x));
    };
    std::uniform_int_distribution<int> day(0, shape.years * 365);
    const auto start = scinov::Date::parse("1950-01-01");

    std::vector<scinov::novelty::PaperTerms> out(shape.papers);
    for (std::size_t i = 0; i < shape.papers; ++i) {
        auto& p = out[i];
        p.paper_id = "P" + std::to_string(1000 + gen() % 9000) + "_" + std::to_string(i);
        // coarse dates so that same-day ties occur
        p.date = scinov::Date{start.days() + day(gen) / 30 * 30};
        auto& s = p.sets;
        std::size_t nw = gen() % (shape.max_words + 1);
        for (std::size_t k = 0; k < nw; ++k) s.words.push_back(word_name(zipf(shape.vocab)));
        std::size_t np = gen() % (shape.max_partners + 1);
        for (std::size_t k = 0; k < np; ++k) s.partner_words.push_back("r" + std::to_string(gen() % 10));
        std::size_t nph = gen() % (shape.max_phrases + 1);
        for (std::size_t k = 0; k < nph; ++k) {
            std::size_t a = zipf(shape.phrase_vocab);
            s.phrases.push_back("ph" + std::to_string(a) + "_x" + std::to_string(a % 7));
        }
        for (auto* v : {&s.words, &s.partner_words, &s.phrases}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }
        scinov::text::build_pairs(s);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.date, a.paper_id) < std::tie(b.date, b.paper_id);
    });
    return out;
}

}  // namespace synth
