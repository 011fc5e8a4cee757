#include <algorithm>
#include <cctype>
#include <fstream>

#include "scinov/error.hpp"
#include "scinov/format.hpp"
#include "scinov/text.hpp"

namespace scinov::text {

std::vector<std::string> load_term_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read term list " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto body = line.substr(0, line.find('#'));
        auto term = trim(body);
        if (!term.empty()) out.emplace_back(term);
    }
    return out;
}

bool is_number_only(std::string_view term) {
    bool digit = false;
    for (unsigned char c : term) {
        if (std::isdigit(c)) digit = true;
        else if (c != '.' && c != ',' && c != '-') return false;
    }
    return digit;
}

bool is_malformed(std::string_view term, bool non_ascii_is_malformed) {
    if (term.empty()) return true;
    if (term.front() == '-' || term.back() == '-' || term.find("--") != std::string_view::npos)
        return true;
    if (non_ascii_is_malformed)
        for (unsigned char c : term)
            if (c >= 0x80) return true;
    return false;
}

FilterLists::FilterLists(std::unordered_set<std::string> stop, std::unordered_set<std::string> removal,
                         bool drop_non_ascii)
    : stop_(std::move(stop)), removal_(std::move(removal)), drop_non_ascii_(drop_non_ascii) {
    std::vector<std::string> overlap;
    for (const auto& t : removal_)
        if (stop_.count(t)) overlap.push_back(t);
    if (!overlap.empty()) {
        std::sort(overlap.begin(), overlap.end());
        throw DataError("stop and removal lists overlap (" + std::to_string(overlap.size()) +
                        " terms, first '" + overlap.front() + "')");
    }
}

bool FilterLists::is_stop(std::string_view term) const {
    if (stop_.count(std::string(term))) return true;
    if (is_number_only(term) || is_malformed(term, drop_non_ascii_)) return true;
    if (term.find('-') != std::string_view::npos) {
        for (auto part : split(term, '-'))
            if (stop_.count(std::string(part)) || is_number_only(part)) return true;
    }
    return false;
}

bool FilterLists::is_removal(std::string_view term) const {
    if (is_stop(term)) return false;
    if (removal_.count(std::string(term))) return true;
    if (term.find('-') == std::string_view::npos) return false;
    for (auto part : split(term, '-'))
        if (!removal_.count(std::string(part))) return false;
    return true;
}

FilterLists expand_filter_lists(const FilterLists& seed,
                                const std::unordered_map<std::string, std::size_t>& vocab,
                                const std::vector<std::string>& natural_stop_words,
                                const ExpansionOptions& options) {
    auto stop = seed.stop_words();
    auto removal = seed.removal_words();
    for (const auto& w : natural_stop_words) stop.insert(w);

    for (const auto& [word, papers] : vocab) {
        if (papers < options.min_papers) continue;
        if (is_number_only(word) || is_malformed(word, seed.drop_non_ascii())) {
            stop.insert(word);
            continue;
        }
        if (word.find('-') == std::string::npos) continue;
        bool any_stop = false, all_removal = true;
        for (auto part : split(word, '-')) {
            const std::string p(part);
            if (seed.stop_words().count(p) || is_number_only(p)) any_stop = true;
            if (!seed.removal_words().count(p)) all_removal = false;
        }
        if (any_stop)
            stop.insert(word);
        else if (all_removal)
            removal.insert(word);
    }
    for (auto it = removal.begin(); it != removal.end();) {
        if (stop.count(*it))
            it = removal.erase(it);
        else
            ++it;
    }
    return FilterLists(std::move(stop), std::move(removal), seed.drop_non_ascii());
}

namespace {

std::vector<std::string> acronym_tokens(std::string_view phrase) {
    std::vector<std::string> out;
    for (auto tok : split(phrase, '_'))
        for (auto part : split(tok, '-'))
            if (!part.empty()) out.emplace_back(part);
    return out;
}

bool acronym_one_way(std::string_view acro, std::string_view full) {
    if (acro.find('_') != std::string_view::npos || acro.find('-') != std::string_view::npos ||
        acro.empty())
        return false;
    const auto tokens = acronym_tokens(full);
    if (tokens.size() < 2 || tokens.size() != acro.size()) return false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(acro[i])) !=
            std::tolower(static_cast<unsigned char>(tokens[i].front())))
            return false;
    }
    return true;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

bool acronym_of(std::string_view a, std::string_view b) {
    if (a == b) return false;
    return acronym_one_way(a, b) || acronym_one_way(b, a);
}

void build_pairs(TermSets& sets) {
    sets.word_pairs.clear();
    sets.phrase_pairs.clear();

    std::vector<std::string> all;
    all.reserve(sets.words.size() + sets.partner_words.size());
    std::merge(sets.words.begin(), sets.words.end(), sets.partner_words.begin(),
               sets.partner_words.end(), std::back_inserter(all));
    std::vector<char> partner(all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        partner[i] = std::binary_search(sets.partner_words.begin(), sets.partner_words.end(), all[i]);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (!(partner[i] && partner[j])) sets.word_pairs.emplace_back(all[i], all[j]);

    const auto& ph = sets.phrases;
    for (std::size_t i = 0; i < ph.size(); ++i)
        for (std::size_t j = i + 1; j < ph.size(); ++j)
            if (!acronym_of(ph[i], ph[j])) sets.phrase_pairs.emplace_back(ph[i], ph[j]);
}

TermSets filter_terms(const RawTerms& raw, const FilterLists& lists) {
    TermSets sets;
    for (const auto& w : raw.words) {
        if (w.empty() || lists.is_stop(w)) continue;
        if (lists.is_removal(w))
            sets.partner_words.push_back(w);
        else
            sets.words.push_back(w);
    }
    for (const auto& phrase : raw.phrases) {
        std::size_t b = 0;
        while (b < phrase.size() && lists.is_stop(phrase[b])) ++b;
        if (b == phrase.size()) continue;
        bool has_stop = false, all_removal = true;
        for (std::size_t i = b; i < phrase.size(); ++i) {
            if (lists.is_stop(phrase[i])) has_stop = true;
            if (!lists.is_removal(phrase[i])) all_removal = false;
        }
        if (has_stop || all_removal) continue;
        std::string joined;
        for (std::size_t i = b; i < phrase.size(); ++i) {
            if (i > b) joined += '_';
            joined += phrase[i];
        }
        sets.phrases.push_back(std::move(joined));
    }
    sort_unique(sets.words);
    sort_unique(sets.partner_words);
    sort_unique(sets.phrases);
    build_pairs(sets);
    return sets;
}

std::string_view mode_name(TextMode mode) { return mode == TextMode::Full ? "full" : "title_only"; }

TextMode parse_mode(std::string_view name) {
    if (name == "full") return TextMode::Full;
    if (name == "title_only") return TextMode::TitleOnly;
    throw UsageError("unknown text mode '" + std::string(name) + "' (full|title_only)");
}

TextPipeline::TextPipeline(std::shared_ptr<const Tagger> tagger, Lemmatizer lemmatizer,
                           FilterLists lists, std::shared_ptr<const Chunker> chunker)
    : tagger_(std::move(tagger)),
      lemmatizer_(std::move(lemmatizer)),
      lists_(std::move(lists)),
      chunker_(std::move(chunker)) {}

RawTerms TextPipeline::raw_terms(std::string_view text) const {
    auto tokens = tokenize(text);
    tagger_->tag(tokens);
    const auto spans = chunker_->chunk(tokens);
    lemmatizer_.lemmatize(tokens);

    RawTerms raw;
    raw.words.reserve(tokens.size());
    for (const auto& t : tokens) raw.words.push_back(t.lemma);
    for (const auto& s : spans) {
        std::vector<std::string> phrase;
        for (std::size_t i = s.begin; i < s.end; ++i) phrase.push_back(tokens[i].lemma);
        raw.phrases.push_back(std::move(phrase));
    }
    return raw;
}

TermSets TextPipeline::process_text(std::string_view text) const {
    return filter_terms(raw_terms(text), lists_);
}

std::string TextPipeline::paper_text(const corpus::PaperRecord& record, TextMode mode) {
    std::string text = record.title;
    if (mode == TextMode::Full && record.abstract) {
        text += " . ";
        text += *record.abstract;
    }
    return text;
}

TermSets TextPipeline::process_paper(const corpus::PaperRecord& record, TextMode mode) const {
    if (trim(record.title).empty()) throw DataError("paper " + record.paper_id + " has an empty title");
    return process_text(paper_text(record, mode));
}

}  // namespace scinov::text
