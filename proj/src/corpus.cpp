#include "scinov/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "scinov/error.hpp"
#include "scinov/format.hpp"

namespace scinov::corpus {

using nlohmann::json;

void sort_records(std::vector<PaperRecord>& records) {
    std::sort(records.begin(), records.end(), [](const PaperRecord& a, const PaperRecord& b) {
        return order_key(a) < order_key(b);
    });
}

Reconstruction reconstruct_abstract(const InvertedIndex& index) {
    std::int64_t max_pos = -1;
    std::size_t total = 0;
    for (const auto& [word, positions] : index) {
        for (auto p : positions) {
            if (p < 0) throw DataError("corrupt inverted index: negative position for '" + word + "'");
            max_pos = std::max(max_pos, p);
        }
        total += positions.size();
    }
    if (max_pos < 0) return {};
    if (static_cast<std::size_t>(max_pos) > 4 * total + 1'000'000)
        throw DataError("corrupt inverted index: position out of range");

    std::vector<const std::string*> slots(static_cast<std::size_t>(max_pos) + 1, nullptr);
    for (const auto& [word, positions] : index) {
        for (auto p : positions) {
            auto& slot = slots[static_cast<std::size_t>(p)];
            if (slot != nullptr)
                throw DataError("corrupt inverted index: duplicate position " + std::to_string(p));
            slot = &word;
        }
    }
    Reconstruction out;
    for (const auto* w : slots) {
        if (w == nullptr) {
            ++out.gaps;
            continue;
        }
        if (!out.text.empty()) out.text += ' ';
        out.text += *w;
    }
    return out;
}

InvertedIndex invert_text(std::string_view text) {
    InvertedIndex out;
    std::unordered_map<std::string, std::size_t> slot;
    std::int64_t pos = 0;
    for (auto tok : split(text, ' ')) {
        if (tok.empty()) continue;
        auto [it, inserted] = slot.emplace(std::string(tok), out.size());
        if (inserted) out.emplace_back(std::string(tok), std::vector<std::int64_t>{});
        out[it->second].second.push_back(pos++);
    }
    return out;
}

namespace {

const json* find_field(const json& obj, const char* name) {
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

std::string require_string(const json& obj, const char* name) {
    const json* v = find_field(obj, name);
    if (v == nullptr || !v->is_string()) throw DataError(std::string("missing string field '") + name + "'");
    return v->get<std::string>();
}

std::optional<int> optional_int(const json& obj, const char* name) {
    const json* v = find_field(obj, name);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) throw DataError(std::string("field '") + name + "' must be an integer");
    return v->get<int>();
}

bool optional_bool(const json& obj, const char* name) {
    const json* v = find_field(obj, name);
    if (v == nullptr) return false;
    if (!v->is_boolean()) throw DataError(std::string("field '") + name + "' must be a boolean");
    return v->get<bool>();
}

}  // namespace

PaperRecord parse_record(std::string_view line, std::size_t* gaps) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw DataError("record is not a JSON object");

    PaperRecord r;
    r.paper_id = require_string(obj, "id");
    if (r.paper_id.empty()) throw DataError("empty id");
    r.pub_date = Date::parse(require_string(obj, "date"));
    r.title = require_string(obj, "title");
    if (const json* v = find_field(obj, "venue")) {
        if (!v->is_string()) throw DataError("field 'venue' must be a string");
        r.venue_id = v->get<std::string>();
    }
    r.subfield_id = optional_int(obj, "subfield");
    r.field_id = optional_int(obj, "field");
    if (const json* refs = find_field(obj, "references")) {
        if (!refs->is_array()) throw DataError("field 'references' must be an array");
        for (const auto& ref : *refs) {
            if (!ref.is_string()) throw DataError("reference ids must be strings");
            r.references.push_back(ref.get<std::string>());
        }
    }
    r.no_authors = optional_bool(obj, "no_authors");
    r.no_publisher = optional_bool(obj, "no_publisher");

    if (const json* a = find_field(obj, "abstract")) {
        if (!a->is_string()) throw DataError("field 'abstract' must be a string");
        r.abstract = a->get<std::string>();
    } else if (const json* inv = find_field(obj, "abstract_inverted_index")) {
        if (!inv->is_object()) throw DataError("field 'abstract_inverted_index' must be an object");
        InvertedIndex index;
        for (const auto& [word, positions] : inv->items()) {
            if (!positions.is_array()) throw DataError("inverted index positions must be arrays");
            std::vector<std::int64_t> ps;
            for (const auto& p : positions) {
                if (!p.is_number_integer()) throw DataError("inverted index positions must be integers");
                ps.push_back(p.get<std::int64_t>());
            }
            index.emplace_back(word, std::move(ps));
        }
        auto rec = reconstruct_abstract(index);
        if (gaps) *gaps += rec.gaps;
        r.abstract = std::move(rec.text);
    }
    if (r.abstract && trim(*r.abstract).empty()) r.abstract.reset();
    r.has_abstract = r.abstract.has_value();
    return r;
}

json record_to_json(const PaperRecord& r) {
    json obj;
    obj["id"] = r.paper_id;
    obj["date"] = r.pub_date.to_string();
    obj["title"] = r.title;
    if (r.abstract) obj["abstract"] = *r.abstract;
    obj["venue"] = r.venue_id;
    if (r.subfield_id) obj["subfield"] = *r.subfield_id;
    if (r.field_id) obj["field"] = *r.field_id;
    obj["references"] = r.references;
    if (r.no_authors) obj["no_authors"] = true;
    if (r.no_publisher) obj["no_publisher"] = true;
    return obj;
}

RecordReader::RecordReader(const std::filesystem::path& path, IngestOptions options)
    : path_(path), in_(path, std::ios::binary), options_(options) {
    if (!in_) throw DataError("cannot read corpus file " + path.string());
}

std::optional<PaperRecord> RecordReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty()) continue;
        try {
            return parse_record(line, &gaps_);
        } catch (const DataError& e) {
            const std::string msg = path_.string() + ":" + std::to_string(line_no_) + ": " + e.what();
            if (options_.strict) throw DataError(msg);
            ++malformed_;
            reports_.push_back(msg);
        }
    }
    return std::nullopt;
}

std::vector<std::string> CleaningRules::enabled_rule_names() const {
    std::vector<std::string> names;
    if (duplicate_title) names.emplace_back("duplicate_title");
    if (empty_title) names.emplace_back("empty_title");
    if (no_author) names.emplace_back("no_author");
    if (duplicate_abstract) names.emplace_back("duplicate_abstract");
    if (bibliographic_abstract) names.emplace_back("bibliographic_abstract");
    if (venue_without_publisher) names.emplace_back("venue_without_publisher");
    return names;
}

json CorpusManifest::to_json() const {
    json obj;
    obj["record_count"] = record_count;
    obj["date_range"] = {min_date ? min_date->to_string() : std::string(),
                         max_date ? max_date->to_string() : std::string()};
    obj["exclusion_tallies"] = exclusion_tallies;
    obj["malformed_lines"] = malformed_lines;
    obj["abstract_gap_warnings"] = abstract_gap_warnings;
    obj["duplicate_ids"] = duplicate_ids;
    return obj;
}

namespace {

std::string normalize_text(std::string_view s) {
    std::string out;
    bool space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

bool is_bibliographic_token(const std::string& tok) {
    static const std::regex patterns(
        R"(^[\(\[]?(1[5-9]|20)\d\d[a-z]?[\)\]]?[.,;:]?$)"   // year, optionally bracketed
        R"(|^(pp?\.)?\d+\s*[-–]+\s*\d+[.,;]?$)"              // page range
        R"(|^\d+\(\d+\)[.,:;]?$)"                            // volume(issue)
        R"(|^\d+[.,:;]?$)"                                   // bare number
        R"(|^[A-Z]\.([A-Z]\.)*[,;]?$)"                       // initials
        R"(|^(pp?|vol|no|ed|eds|ibid|op|cit|et|al|doi)\.?[,:;]?$)",
        std::regex::icase | std::regex::optimize);
    return std::regex_match(tok, patterns);
}

}  // namespace

double bibliographic_fraction(std::string_view text) {
    std::size_t total = 0, hits = 0;
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        ++total;
        if (is_bibliographic_token(tok)) ++hits;
        tok.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            tok += c;
    }
    flush();
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

CleanResult clean_corpus(std::vector<PaperRecord> records, const CleaningRules& rules) {
    CleanResult out;
    auto& tallies = out.manifest.exclusion_tallies;
    for (const auto& name : rules.enabled_rule_names()) tallies[name] = 0;

    sort_records(records);

    std::vector<PaperRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::string> titles;
    for (auto& r : records) {
        if (rules.empty_title && trim(r.title).empty()) {
            ++tallies["empty_title"];
            continue;
        }
        if (rules.no_author && r.no_authors) {
            ++tallies["no_author"];
            continue;
        }
        if (rules.venue_without_publisher && r.no_publisher) {
            ++tallies["venue_without_publisher"];
            continue;
        }
        if (rules.duplicate_title && !titles.insert(normalize_text(r.title)).second) {
            ++tallies["duplicate_title"];
            continue;
        }
        kept.push_back(std::move(r));
    }

    if (rules.duplicate_abstract) {
        std::unordered_map<std::string, std::size_t> counts;
        for (const auto& r : kept)
            if (r.abstract) ++counts[normalize_text(*r.abstract)];
        for (auto& r : kept) {
            if (r.abstract && counts[normalize_text(*r.abstract)] > 1) {
                r.abstract.reset();
                r.has_abstract = false;
                ++tallies["duplicate_abstract"];
            }
        }
    }
    if (rules.bibliographic_abstract) {
        for (auto& r : kept) {
            if (r.abstract && bibliographic_fraction(*r.abstract) > rules.bibliographic_threshold) {
                r.abstract.reset();
                r.has_abstract = false;
                ++tallies["bibliographic_abstract"];
            }
        }
    }

    out.manifest.record_count = kept.size();
    if (!kept.empty()) {
        out.manifest.min_date = kept.front().pub_date;
        out.manifest.max_date = kept.back().pub_date;
    }
    out.records = std::move(kept);
    return out;
}

void check_subfield_mapping(const std::vector<PaperRecord>& records) {
    std::unordered_map<int, int> field_of;
    for (const auto& r : records) {
        if (!r.subfield_id || !r.field_id) continue;
        auto [it, inserted] = field_of.emplace(*r.subfield_id, *r.field_id);
        if (!inserted && it->second != *r.field_id)
            throw DataError("subfield " + std::to_string(*r.subfield_id) + " maps to fields " +
                            std::to_string(it->second) + " and " + std::to_string(*r.field_id) +
                            " (paper " + r.paper_id + ")");
    }
}

}  // namespace scinov::corpus
