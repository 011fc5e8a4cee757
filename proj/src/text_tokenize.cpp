#include <cctype>

#include "scinov/error.hpp"
#include "scinov/text.hpp"

namespace scinov::text {

namespace {

constexpr std::string_view kPosNames[] = {"NOUN", "PROPN", "ADJ", "VERB", "ADV",
                                          "DET",  "ADP",   "NUM", "PUNCT", "OTHER"};

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '-' || c >= 0x80; }

bool is_sentence_punct(char c) { return c == '.' || c == ';' || c == ':' || c == '?' || c == '!'; }

}  // namespace

std::string_view pos_name(Pos pos) { return kPosNames[static_cast<int>(pos)]; }

Pos parse_pos(std::string_view name) {
    for (int i = 0; i < static_cast<int>(std::size(kPosNames)); ++i)
        if (kPosNames[i] == name) return static_cast<Pos>(i);
    throw DataError("unknown POS tag '" + std::string(name) + "'");
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t sentence = 0;
    bool sentence_has_tokens = false;
    std::string run;

    auto flush = [&] {
        std::size_t b = 0, e = run.size();
        while (b < e && run[b] == '-') ++b;
        while (e > b && run[e - 1] == '-') --e;
        if (b < e) {
            Token t;
            t.surface = run.substr(b, e - b);
            t.index = out.size();
            t.sentence = sentence;
            out.push_back(std::move(t));
            sentence_has_tokens = true;
        }
        run.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            run += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
            continue;
        }
        flush();
        if (is_sentence_punct(text[i])) {
            const bool inside_word = text[i] == '.' && i + 1 < text.size() &&
                                     std::isalnum(static_cast<unsigned char>(text[i + 1]));
            if (!inside_word && sentence_has_tokens) {
                ++sentence;
                sentence_has_tokens = false;
            }
        }
    }
    flush();
    return out;
}

}  // namespace scinov::text
