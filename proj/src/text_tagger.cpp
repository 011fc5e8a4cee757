#include <array>
#include <cctype>
#include <fstream>

#include "scinov/error.hpp"
#include "scinov/format.hpp"
#include "scinov/text.hpp"

namespace scinov::text {

LexiconTagger::LexiconTagger(std::unordered_map<std::string, Pos> lexicon)
    : lexicon_(std::move(lexicon)) {}

LexiconTagger LexiconTagger::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read tag lexicon " + path.string());
    std::unordered_map<std::string, Pos> lexicon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto cols = split(body, '\t');
        if (cols.size() != 2)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected surface<TAB>POS");
        lexicon[std::string(trim(cols[0]))] = parse_pos(trim(cols[1]));
    }
    return LexiconTagger(std::move(lexicon));
}

Pos LexiconTagger::suffix_rule(std::string_view w) {
    bool digit = false, letter = false;
    for (unsigned char c : w) {
        if (std::isdigit(c)) digit = true;
        else if (c != '.' && c != ',' && c != '-') letter = true;
    }
    if (digit && !letter) return Pos::Num;

    struct Rule {
        std::string_view suffix;
        Pos pos;
    };
    static constexpr std::array<Rule, 11> rules{{
        {"tion", Pos::Noun}, {"ment", Pos::Noun}, {"ity", Pos::Noun}, {"ness", Pos::Noun},
        {"ize", Pos::Verb},  {"ify", Pos::Verb},  {"ous", Pos::Adj},  {"ive", Pos::Adj},
        {"al", Pos::Adj},    {"ic", Pos::Adj},    {"ly", Pos::Adv},
    }};
    for (const auto& r : rules)
        if (w.size() >= r.suffix.size() + 2 && w.ends_with(r.suffix)) return r.pos;
    return Pos::Noun;
}

Pos LexiconTagger::tag_word(std::string_view surface) const {
    if (auto it = lexicon_.find(std::string(surface)); it != lexicon_.end()) return it->second;
    return suffix_rule(surface);
}

void LexiconTagger::tag(std::span<Token> tokens) const {
    for (auto& t : tokens) t.pos = tag_word(t.surface);
}

void PretaggedTagger::tag(std::span<Token> tokens) const {
    if (tokens.size() != tags_.size())
        throw DataError("pretagged input has " + std::to_string(tags_.size()) + " tags for " +
                        std::to_string(tokens.size()) + " tokens");
    for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i].pos = tags_[i];
}

namespace {

bool is_nominal(Pos p) { return p == Pos::Noun || p == Pos::Propn; }
bool is_modifier(Pos p) { return p == Pos::Adj || is_nominal(p); }

}  // namespace

std::vector<Span> PatternChunker::chunk(std::span<const Token> tokens) const {
    std::vector<Span> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (!is_modifier(tokens[i].pos)) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < tokens.size() && is_modifier(tokens[j].pos) && tokens[j].sentence == tokens[i].sentence)
            ++j;
        // trailing adjectives cannot end a phrase
        std::size_t end = j;
        while (end > i && !is_nominal(tokens[end - 1].pos)) --end;
        if (end > i) spans.push_back({i, end});
        i = j;
    }
    return spans;
}

std::vector<Span> extract_noun_phrases(std::span<const Token> tokens) {
    return PatternChunker{}.chunk(tokens);
}

}  // namespace scinov::text
