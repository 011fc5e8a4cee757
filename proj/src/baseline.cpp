#include "scinov/baseline.hpp"

#include <algorithm>
#include <fstream>

#include "scinov/error.hpp"
#include "scinov/format.hpp"

namespace scinov::corpus {

namespace {

std::string pair_key(const text::TermPair& p) { return p.first + "|" + p.second; }

void write_sorted(std::ofstream& out, std::string_view kind, const std::unordered_set<std::string>& set) {
    std::vector<std::string> terms(set.begin(), set.end());
    std::sort(terms.begin(), terms.end());
    for (const auto& t : terms) out << kind << '\t' << t << '\n';
}

}  // namespace

void add_to_baseline(BaselineDictionary& dict, const text::TermSets& sets, bool include_pairs) {
    dict.words.insert(sets.words.begin(), sets.words.end());
    dict.words.insert(sets.partner_words.begin(), sets.partner_words.end());
    dict.phrases.insert(sets.phrases.begin(), sets.phrases.end());
    if (!include_pairs) return;
    for (const auto& p : sets.word_pairs) dict.word_pairs.insert(pair_key(p));
    for (const auto& p : sets.phrase_pairs) dict.phrase_pairs.insert(pair_key(p));
}

BaselineDictionary build_baseline(const std::vector<PaperRecord>& records,
                                  const text::TextPipeline& pipeline, const BaselineOptions& options) {
    BaselineDictionary dict;
    for (const auto& r : records) {
        if (r.pub_date.year() > options.last_year)
            throw DataError("baseline record " + r.paper_id + " is dated " + r.pub_date.to_string() +
                            ", after " + std::to_string(options.last_year));
        if (trim(r.title).empty()) continue;
        add_to_baseline(dict, pipeline.process_paper(r, options.mode), options.include_pairs);
    }
    return dict;
}

void BaselineDictionary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_sorted(out, "word", words);
    write_sorted(out, "phrase", phrases);
    write_sorted(out, "word_pair", word_pairs);
    write_sorted(out, "phrase_pair", phrase_pairs);
}

BaselineDictionary BaselineDictionary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read baseline " + path.string());
    BaselineDictionary dict;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError(path.string() + ":" + std::to_string(line_no) + ": missing tab");
        const auto kind = std::string_view(line).substr(0, tab);
        std::string term = line.substr(tab + 1);
        if (kind == "word") dict.words.insert(std::move(term));
        else if (kind == "phrase") dict.phrases.insert(std::move(term));
        else if (kind == "word_pair") dict.word_pairs.insert(std::move(term));
        else if (kind == "phrase_pair") dict.phrase_pairs.insert(std::move(term));
        else throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown kind");
    }
    return dict;
}

}  // namespace scinov::corpus
