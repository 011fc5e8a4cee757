#include <array>
#include <fstream>

#include "scinov/error.hpp"
#include "scinov/format.hpp"
#include "scinov/text.hpp"

namespace scinov::text {

namespace {

std::string key(std::string_view surface, std::optional<Pos> pos) {
    std::string k(surface);
    k += '\t';
    k += pos ? pos_name(*pos) : std::string_view("*");
    return k;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string undouble(std::string stem) {
    const auto n = stem.size();
    if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) && stem[n - 1] != 'l' &&
        stem[n - 1] != 's' && stem[n - 1] != 'z' && stem[n - 1] != 'f')
        stem.pop_back();
    return stem;
}

// Stems that lost a silent final e when inflected ("produc" -> "produce").
std::string restore_e(std::string stem) {
    static constexpr std::array<std::string_view, 12> endings{"at", "iz", "is", "uc", "ag", "ov",
                                                              "iv", "ur", "rv", "lv", "ut", "ud"};
    for (auto e : endings)
        if (stem.size() >= 4 && stem.ends_with(e)) return stem + "e";
    return stem;
}

std::string strip_plural(std::string_view w) {
    std::string s(w);
    if (s.size() <= 3) return s;
    if (s.ends_with("ies") && s.size() > 4) return s.substr(0, s.size() - 3) + "y";
    for (std::string_view e : {"sses", "shes", "ches", "xes", "zzes"})
        if (s.ends_with(e)) return s.substr(0, s.size() - 2);
    for (std::string_view e : {"ss", "us", "is", "ics", "ous"})
        if (s.ends_with(e)) return s;
    if (s.ends_with('s')) return s.substr(0, s.size() - 1);
    return s;
}

std::string strip_verb(std::string_view w) {
    std::string s(w);
    if (s.ends_with("ied") && s.size() > 4) return s.substr(0, s.size() - 3) + "y";
    if (s.ends_with("ing") && s.size() > 5) return restore_e(undouble(s.substr(0, s.size() - 3)));
    if (s.ends_with("ed") && s.size() > 4) return restore_e(undouble(s.substr(0, s.size() - 2)));
    return strip_plural(s);
}

}  // namespace

Lemmatizer Lemmatizer::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read lemma lexicon " + path.string());
    Lemmatizer lem;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto cols = split(body, '\t');
        if (cols.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected surface<TAB>POS<TAB>lemma");
        const auto pos_col = trim(cols[1]);
        std::optional<Pos> pos;
        if (pos_col != "*") pos = parse_pos(pos_col);
        lem.add(std::string(trim(cols[0])), pos, std::string(trim(cols[2])));
    }
    return lem;
}

void Lemmatizer::add(std::string surface, std::optional<Pos> pos, std::string lemma) {
    exact_[key(surface, pos)] = std::move(lemma);
}

std::string Lemmatizer::lemma_simple(std::string_view word, Pos pos) const {
    if (word.empty()) return {};
    if (auto it = exact_.find(key(word, pos)); it != exact_.end()) return it->second;
    if (auto it = exact_.find(key(word, std::nullopt)); it != exact_.end()) return it->second;
    switch (pos) {
        case Pos::Noun:
        case Pos::Propn:
            return strip_plural(word);
        case Pos::Verb:
            return strip_verb(word);
        default:
            return std::string(word);
    }
}

std::string Lemmatizer::lemma_of(std::string_view surface, Pos pos) const {
    if (surface.find('-') == std::string_view::npos) return lemma_simple(surface, pos);
    if (auto it = exact_.find(key(surface, pos)); it != exact_.end()) return it->second;
    std::string out;
    bool first = true;
    for (auto part : split(surface, '-')) {
        if (!first) out += '-';
        first = false;
        out += lemma_simple(part, pos);
    }
    return out;
}

void Lemmatizer::lemmatize(std::span<Token> tokens) const {
    for (auto& t : tokens) {
        t.lemma = lemma_of(t.surface, t.pos);
        if (t.lemma.empty()) t.lemma = t.surface;
    }
}

}  // namespace scinov::text
