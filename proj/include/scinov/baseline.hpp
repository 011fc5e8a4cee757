#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "scinov/corpus.hpp"
#include "scinov/text.hpp"

namespace scinov::corpus {

/// Terms seen before the analysis period. Pair entries are `a|b` with a < b.
struct BaselineDictionary {
    std::unordered_set<std::string> words;
    std::unordered_set<std::string> phrases;
    std::unordered_set<std::string> word_pairs;
    std::unordered_set<std::string> phrase_pairs;

    [[nodiscard]] bool empty() const {
        return words.empty() && phrases.empty() && word_pairs.empty() && phrase_pairs.empty();
    }

    /// TSV `kind<TAB>term`, sorted, kinds word|phrase|word_pair|phrase_pair.
    void save(const std::filesystem::path& path) const;
    static BaselineDictionary load(const std::filesystem::path& path);
};

struct BaselineOptions {
    int last_year = 1900;
    bool include_pairs = true;
    text::TextMode mode = text::TextMode::Full;
};

/// Collects every processed word and phrase (and optionally pair) of the
/// baseline records. Throws DataError for a record dated after last_year.
BaselineDictionary build_baseline(const std::vector<PaperRecord>& records,
                                  const text::TextPipeline& pipeline,
                                  const BaselineOptions& options = {});

/// Adds one paper's terms to the dictionary.
void add_to_baseline(BaselineDictionary& dict, const text::TermSets& sets, bool include_pairs);

}  // namespace scinov::corpus
