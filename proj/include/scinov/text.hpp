#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "scinov/corpus.hpp"

namespace scinov::text {

enum class Pos { Noun, Propn, Adj, Verb, Adv, Det, Adp, Num, Punct, Other };

std::string_view pos_name(Pos pos);
/// Accepts the upper-case tag names; throws DataError otherwise.
Pos parse_pos(std::string_view name);

struct Token {
    std::string surface;
    std::string lemma;
    Pos pos = Pos::Other;
    std::size_t index = 0;
    std::size_t sentence = 0;  // incremented at every . ; : ? ! boundary

    bool operator==(const Token&) const = default;
};

/// Lowercases and splits on whitespace and punctuation. Internal hyphens are
/// kept, so "x-ray" is one token; leading and trailing hyphens are stripped
/// and hyphen-only remnants dropped. Punctuation never becomes a token, but
/// sentence punctuation advances Token::sentence.
std::vector<Token> tokenize(std::string_view text);

// --- tagging ----------------------------------------------------------------

class Tagger {
public:
    virtual ~Tagger() = default;
    /// Assigns exactly one tag to every token.
    virtual void tag(std::span<Token> tokens) const = 0;
};

/// Lexicon lookup with a suffix-rule fallback.
class LexiconTagger final : public Tagger {
public:
    LexiconTagger() = default;
    explicit LexiconTagger(std::unordered_map<std::string, Pos> lexicon);
    /// TSV `surface<TAB>POS`, `#` comments.
    static LexiconTagger load(const std::filesystem::path& path);

    void tag(std::span<Token> tokens) const override;
    [[nodiscard]] Pos tag_word(std::string_view surface) const;

    /// The fallback used when the lexicon has no entry.
    static Pos suffix_rule(std::string_view surface);

private:
    std::unordered_map<std::string, Pos> lexicon_;
};

/// Tags supplied by an upstream annotator, one per token in order.
class PretaggedTagger final : public Tagger {
public:
    explicit PretaggedTagger(std::vector<Pos> tags) : tags_(std::move(tags)) {}
    void tag(std::span<Token> tokens) const override;

private:
    std::vector<Pos> tags_;
};

// --- chunking ---------------------------------------------------------------

/// Half-open token index range.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const Span&) const = default;
};

class Chunker {
public:
    virtual ~Chunker() = default;
    virtual std::vector<Span> chunk(std::span<const Token> tokens) const = 0;
};

/// Maximal runs matching (ADJ|NOUN|PROPN)* (NOUN|PROPN) within a sentence.
class PatternChunker final : public Chunker {
public:
    std::vector<Span> chunk(std::span<const Token> tokens) const override;
};

std::vector<Span> extract_noun_phrases(std::span<const Token> tokens);

// --- lemmatization ----------------------------------------------------------

class Lemmatizer {
public:
    Lemmatizer() = default;
    /// TSV `surface<TAB>POS<TAB>lemma`; POS `*` matches any tag.
    static Lemmatizer load(const std::filesystem::path& path);
    void add(std::string surface, std::optional<Pos> pos, std::string lemma);

    void lemmatize(std::span<Token> tokens) const;
    /// Hyphenated words are lemmatized per constituent and re-joined.
    [[nodiscard]] std::string lemma_of(std::string_view surface, Pos pos) const;

private:
    [[nodiscard]] std::string lemma_simple(std::string_view word, Pos pos) const;
    std::unordered_map<std::string, std::string> exact_;  // "surface\tPOS" or "surface\t*"
};

// --- filter lists -----------------------------------------------------------

/// One term per line, `#` starts a comment, blank lines ignored.
std::vector<std::string> load_term_list(const std::filesystem::path& path);

class FilterLists {
public:
    FilterLists() = default;
    /// Throws DataError if the two lists share a term.
    FilterLists(std::unordered_set<std::string> stop, std::unordered_set<std::string> removal,
                bool drop_non_ascii = true);

    /// Set membership, plus the rule classes that close the list: number-only
    /// tokens, malformed hyphenation, non-ASCII (when enabled) and hyphenated
    /// words with a stop constituent.
    [[nodiscard]] bool is_stop(std::string_view term) const;
    /// Removal membership, or hyphenated with every constituent a removal
    /// word. Never true for a stop term.
    [[nodiscard]] bool is_removal(std::string_view term) const;

    [[nodiscard]] const std::unordered_set<std::string>& stop_words() const { return stop_; }
    [[nodiscard]] const std::unordered_set<std::string>& removal_words() const { return removal_; }
    [[nodiscard]] bool drop_non_ascii() const { return drop_non_ascii_; }

private:
    std::unordered_set<std::string> stop_;
    std::unordered_set<std::string> removal_;
    bool drop_non_ascii_ = true;
};

bool is_number_only(std::string_view term);
bool is_malformed(std::string_view term, bool non_ascii_is_malformed);

struct ExpansionOptions {
    /// Vocabulary words seen in fewer papers are not considered.
    std::size_t min_papers = 1000;
};

/// Materializes the expanded lists over a corpus vocabulary (word -> number
/// of papers). Stop wins when a term qualifies for both lists.
FilterLists expand_filter_lists(const FilterLists& seed,
                                const std::unordered_map<std::string, std::size_t>& vocab,
                                const std::vector<std::string>& natural_stop_words,
                                const ExpansionOptions& options = {});

// --- per-paper terms --------------------------------------------------------

using TermPair = std::pair<std::string, std::string>;  // first < second

struct RawTerms {
    std::vector<std::string> words;                 // lemmas, any order, may repeat
    std::vector<std::vector<std::string>> phrases;  // lemma sequences
};

struct TermSets {
    std::vector<std::string> words;          // kept, not stop, not removal
    std::vector<std::string> partner_words;  // removal words kept as pair partners
    std::vector<std::string> phrases;        // lemmas joined by '_'
    std::vector<TermPair> word_pairs;
    std::vector<TermPair> phrase_pairs;

    [[nodiscard]] std::size_t word_count() const { return words.size(); }
    [[nodiscard]] std::size_t phrase_count() const { return phrases.size(); }

    bool operator==(const TermSets&) const = default;
};

/// True iff one phrase is a single token whose letters are the initials of
/// the other phrase's tokens (hyphen constituents count as tokens).
bool acronym_of(std::string_view a, std::string_view b);

/// Fills word_pairs and phrase_pairs from the (sorted) words, partner_words
/// and phrases. Partner/partner pairs and acronym phrase pairs are skipped.
void build_pairs(TermSets& sets);

/// Applies the stop/removal rules and builds the pairs. Output vectors are
/// sorted and duplicate-free.
TermSets filter_terms(const RawTerms& raw, const FilterLists& lists);

enum class TextMode { Full, TitleOnly };

std::string_view mode_name(TextMode mode);
TextMode parse_mode(std::string_view name);

/// tokenize -> tag -> chunk -> lemmatize -> filter. Immutable once built and
/// safe to share between threads.
class TextPipeline {
public:
    TextPipeline(std::shared_ptr<const Tagger> tagger, Lemmatizer lemmatizer, FilterLists lists,
                 std::shared_ptr<const Chunker> chunker = std::make_shared<PatternChunker>());

    [[nodiscard]] RawTerms raw_terms(std::string_view text) const;
    [[nodiscard]] TermSets process_text(std::string_view text) const;
    [[nodiscard]] TermSets process_paper(const corpus::PaperRecord& record, TextMode mode) const;

    [[nodiscard]] const FilterLists& lists() const { return lists_; }

    /// Title and abstract joined with a sentence boundary between them.
    static std::string paper_text(const corpus::PaperRecord& record, TextMode mode);

private:
    std::shared_ptr<const Tagger> tagger_;
    Lemmatizer lemmatizer_;
    FilterLists lists_;
    std::shared_ptr<const Chunker> chunker_;
};

// --- novelty language -------------------------------------------------------

struct NoveltyGuard {
    enum class Kind {
        CapitalizedBigram,  // "New York": the cue and the next word are capitalized
        NextWord,           // suppressed when followed by one of `words`
        PreviousWord,       // suppressed when one of `words` occurs within `window` before
        RequireNext,        // counts only when followed by one of `words`
    };
    Kind kind = Kind::NextWord;
    std::vector<std::string> words;
    std::size_t window = 1;
};

struct NoveltyCue {
    std::string stem;
    bool exact = false;  // whole-word match instead of prefix
    std::vector<NoveltyGuard> guards;
};

class NoveltyDetector {
public:
    explicit NoveltyDetector(std::vector<NoveltyCue> cues);
    /// JSON array of {stem, exact?, guards: [{type, words?, window?}]}.
    static NoveltyDetector load(const std::filesystem::path& path);

    /// Operates on raw, unprocessed text.
    [[nodiscard]] bool detect(std::string_view title,
                              const std::optional<std::string>& abstract) const;
    [[nodiscard]] bool detect_text(std::string_view text) const;

private:
    std::vector<NoveltyCue> cues_;
};

}  // namespace scinov::text
