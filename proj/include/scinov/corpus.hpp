#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scinov/date.hpp"

namespace scinov::corpus {

struct PaperRecord {
    std::string paper_id;
    Date pub_date;
    std::string title;
    std::optional<std::string> abstract;
    std::string venue_id;
    std::optional<int> subfield_id;
    std::optional<int> field_id;
    std::vector<std::string> references;
    bool has_abstract = false;
    // Upstream removal flags, passed through to the cleaning rules.
    bool no_authors = false;
    bool no_publisher = false;

    bool operator==(const PaperRecord&) const = default;
};

/// Total order used by every corpus pass: date first, then paper id.
struct OrderKey {
    Date date;
    std::string_view paper_id;

    auto operator<=>(const OrderKey&) const = default;
};

inline OrderKey order_key(const PaperRecord& r) { return {r.pub_date, r.paper_id}; }

/// Sorts records into non-decreasing order_key.
void sort_records(std::vector<PaperRecord>& records);

// --- inverted-index abstracts ----------------------------------------------

using InvertedIndex = std::vector<std::pair<std::string, std::vector<std::int64_t>>>;

struct Reconstruction {
    std::string text;
    std::size_t gaps = 0;  // positions missing from 0..max
};

/// Rebuilds the running text from word -> positions. Throws DataError when a
/// position is claimed by two words or is negative. Missing positions are
/// skipped and counted.
Reconstruction reconstruct_abstract(const InvertedIndex& index);

/// Inverse of reconstruct_abstract for whitespace-tokenized text.
InvertedIndex invert_text(std::string_view text);

// --- ingestion --------------------------------------------------------------

/// Parses one JSONL record. Throws DataError on schema violations.
/// `gaps` receives the number of inverted-index gaps encountered.
PaperRecord parse_record(std::string_view line, std::size_t* gaps = nullptr);

nlohmann::json record_to_json(const PaperRecord& r);

struct IngestOptions {
    bool strict = false;
};

/// Lazily yields the records of one JSONL file in file order.
class RecordReader {
public:
    RecordReader(const std::filesystem::path& path, IngestOptions options = {});

    /// Next well-formed record, or nullopt at end of file. In strict mode a
    /// malformed line throws DataError naming the line number; in lenient
    /// mode it is skipped and counted.
    std::optional<PaperRecord> next();

    [[nodiscard]] std::size_t malformed_lines() const { return malformed_; }
    [[nodiscard]] std::size_t abstract_gaps() const { return gaps_; }
    [[nodiscard]] const std::vector<std::string>& malformed_reports() const { return reports_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    IngestOptions options_;
    std::size_t line_no_ = 0;
    std::size_t malformed_ = 0;
    std::size_t gaps_ = 0;
    std::vector<std::string> reports_;
};

// --- cleaning ---------------------------------------------------------------

struct CleaningRules {
    bool duplicate_title = true;
    bool empty_title = true;
    bool no_author = true;
    bool duplicate_abstract = true;
    bool bibliographic_abstract = true;
    bool venue_without_publisher = true;
    double bibliographic_threshold = 0.5;

    [[nodiscard]] std::vector<std::string> enabled_rule_names() const;
};

struct CorpusManifest {
    std::size_t record_count = 0;
    std::optional<Date> min_date;
    std::optional<Date> max_date;
    std::map<std::string, std::size_t> exclusion_tallies;
    std::size_t malformed_lines = 0;
    std::size_t abstract_gap_warnings = 0;
    std::size_t duplicate_ids = 0;

    [[nodiscard]] nlohmann::json to_json() const;
};

struct CleanResult {
    std::vector<PaperRecord> records;
    CorpusManifest manifest;
};

/// Fraction of whitespace tokens that look like citation-line material
/// (parenthesized years, page ranges, volume(issue), initials, pp./vol.).
double bibliographic_fraction(std::string_view text);

/// Applies the enabled rules. The output is sorted by order_key; among
/// records sharing a title only the earliest survives, and every record in a
/// group of identical abstracts loses its abstract.
CleanResult clean_corpus(std::vector<PaperRecord> records, const CleaningRules& rules);

/// Throws DataError if one subfield code is paired with two field codes.
void check_subfield_mapping(const std::vector<PaperRecord>& records);

}  // namespace scinov::corpus
