#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "scinov/error.hpp"
#include "scinov/text.hpp"

namespace scinov::text {

namespace {

struct Word {
    std::string raw;
    std::string lower;
};

std::vector<Word> raw_words(std::string_view text) {
    std::vector<Word> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        Word w{cur, cur};
        for (auto& c : w.lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(w));
        cur.clear();
    };
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80 || c == '\'')
            cur += c;
        else
            flush();
    }
    flush();
    return out;
}

bool contains(const std::vector<std::string>& words, const std::string& w) {
    return std::find(words.begin(), words.end(), w) != words.end();
}

bool capitalized(const std::string& w) {
    return !w.empty() && std::isupper(static_cast<unsigned char>(w.front()));
}

NoveltyGuard::Kind parse_guard_kind(const std::string& s) {
    if (s == "capitalized_bigram") return NoveltyGuard::Kind::CapitalizedBigram;
    if (s == "next_word") return NoveltyGuard::Kind::NextWord;
    if (s == "previous_word") return NoveltyGuard::Kind::PreviousWord;
    if (s == "require_next") return NoveltyGuard::Kind::RequireNext;
    throw DataError("unknown novelty guard type '" + s + "'");
}

}  // namespace

NoveltyDetector::NoveltyDetector(std::vector<NoveltyCue> cues) : cues_(std::move(cues)) {}

NoveltyDetector NoveltyDetector::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read novelty word list " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw DataError(path.string() + ": expected a JSON array of cues");
    std::vector<NoveltyCue> cues;
    try {
        for (const auto& entry : doc) {
            NoveltyCue cue;
            cue.stem = entry.at("stem").get<std::string>();
            cue.exact = entry.value("exact", false);
            for (const auto& g : entry.value("guards", nlohmann::json::array())) {
                NoveltyGuard guard;
                guard.kind = parse_guard_kind(g.at("type").get<std::string>());
                guard.words = g.value("words", std::vector<std::string>{});
                guard.window = g.value("window", std::size_t{1});
                cue.guards.push_back(std::move(guard));
            }
            cues.push_back(std::move(cue));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return NoveltyDetector(std::move(cues));
}

bool NoveltyDetector::detect_text(std::string_view text) const {
    const auto words = raw_words(text);
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (const auto& cue : cues_) {
            const bool hit = cue.exact ? words[i].lower == cue.stem : words[i].lower.starts_with(cue.stem);
            if (!hit) continue;
            const Word* next = i + 1 < words.size() ? &words[i + 1] : nullptr;
            bool suppressed = false;
            for (const auto& g : cue.guards) {
                switch (g.kind) {
                    case NoveltyGuard::Kind::CapitalizedBigram:
                        suppressed |= capitalized(words[i].raw) && next && capitalized(next->raw);
                        break;
                    case NoveltyGuard::Kind::NextWord:
                        suppressed |= next && contains(g.words, next->lower);
                        break;
                    case NoveltyGuard::Kind::PreviousWord:
                        for (std::size_t k = 1; k <= g.window && k <= i; ++k)
                            suppressed |= contains(g.words, words[i - k].lower);
                        break;
                    case NoveltyGuard::Kind::RequireNext:
                        suppressed |= !(next && contains(g.words, next->lower));
                        break;
                }
            }
            if (!suppressed) return true;
        }
    }
    return false;
}

bool NoveltyDetector::detect(std::string_view title, const std::optional<std::string>& abstract) const {
    return detect_text(title) || (abstract && detect_text(*abstract));
}

}  // namespace scinov::text
