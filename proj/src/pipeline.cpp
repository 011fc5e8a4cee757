#include "scinov/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "pipeline_internal.hpp"
#include "scinov/baseline.hpp"
#include "scinov/citemetrics.hpp"
#include "scinov/digest.hpp"
#include "scinov/error.hpp"
#include "scinov/format.hpp"
#include "scinov/parallel.hpp"
#include "scinov/semdist.hpp"
#include "scinov/tsv.hpp"

namespace scinov::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 9> kStageNames{"ingest", "baseline", "preprocess", "novelty", "semdist",
                                                      "cite",   "metrics",  "stats",      "plotdata"};

}  // namespace

std::string_view stage_name(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> parse_stage(std::string_view name) {
    for (std::size_t i = 0; i < kStageNames.size(); ++i)
        if (kStageNames[i] == name) return static_cast<Stage>(i);
    return std::nullopt;
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::Ingest,  Stage::Baseline, Stage::Preprocess,
                                           Stage::Novelty, Stage::Semdist,  Stage::Cite,
                                           Stage::Metrics, Stage::Stats,    Stage::Plotdata};
    return stages;
}

namespace detail {

std::vector<corpus::PaperRecord> read_jsonl(const fs::path& path) {
    corpus::RecordReader reader(path, {.strict = true});
    std::vector<corpus::PaperRecord> out;
    while (auto r = reader.next()) out.push_back(std::move(*r));
    return out;
}

namespace {

std::vector<std::string> words_of(std::string_view field) {
    std::vector<std::string> out;
    if (field.empty()) return out;
    for (auto w : split(field, ' ')) out.emplace_back(w);
    return out;
}

std::vector<text::TermPair> pairs_of(std::string_view field, const std::string& where) {
    std::vector<text::TermPair> out;
    for (const auto& p : words_of(field)) {
        const auto bar = p.find('|');
        if (bar == std::string::npos) throw DataError(where + ": malformed pair '" + p + "'");
        out.emplace_back(p.substr(0, bar), p.substr(bar + 1));
    }
    return out;
}

}  // namespace

TermsetRow parse_termset_line(const std::string& line, const std::string& where) {
    const auto f = split(line, '\t');
    if (f.size() != 8) throw DataError(where + ": expected 8 fields");
    TermsetRow row;
    row.id = std::string(f[0]);
    row.novelty_language = f[2] == "1";
    row.sets.words = words_of(f[3]);
    row.sets.partner_words = words_of(f[4]);
    row.sets.phrases = words_of(f[5]);
    row.sets.word_pairs = pairs_of(f[6], where);
    row.sets.phrase_pairs = pairs_of(f[7], where);
    return row;
}

TermsetSource::TermsetSource(fs::path path) : path_(std::move(path)) { rewind(); }

void TermsetSource::rewind() {
    in_ = std::ifstream(path_, std::ios::binary);
    if (!in_) throw DataError("cannot read " + path_.string());
    std::string header;
    std::getline(in_, header);
    line_no_ = 1;
}

bool TermsetSource::next(novelty::PaperTerms& out) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    const std::string where = path_.filename().string() + ":" + std::to_string(line_no_);
    auto row = parse_termset_line(line, where);
    out.paper_id = std::move(row.id);
    out.date = Date::parse(split(line, '\t')[1]);
    out.sets = std::move(row.sets);
    return true;
}

}  // namespace detail

namespace {

using detail::read_jsonl;

void write_jsonl(const std::vector<corpus::PaperRecord>& records, const fs::path& path) {
    std::string text;
    for (const auto& r : records) text += corpus::record_to_json(r).dump() + "\n";
    write_text_file(path, text);
}

std::string join_words(const std::vector<std::string>& v) { return join(v, " "); }

std::string join_pairs(const std::vector<text::TermPair>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += v[i].first + "|" + v[i].second;
    }
    return out;
}

std::unordered_set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

text::TextMode mode_of(const PipelineConfig& c) { return text::parse_mode(c.mode); }

struct TextResources {
    std::shared_ptr<const text::Tagger> tagger;
    text::Lemmatizer lemmatizer;
    text::FilterLists seed_lists;
    std::vector<std::string> natural_stop_words;
};

TextResources load_text_resources(const PipelineConfig& c) {
    const auto& d = c.lexicon_dir;
    TextResources r;
    r.tagger = std::make_shared<text::LexiconTagger>(text::LexiconTagger::load(d / "tag_lexicon.tsv"));
    r.lemmatizer = text::Lemmatizer::load(d / "lemma_lexicon.tsv");
    r.seed_lists = text::FilterLists(as_set(text::load_term_list(d / "stop_words.txt")),
                                     as_set(text::load_term_list(d / "removal_words.txt")), c.drop_non_ascii);
    r.natural_stop_words = text::load_term_list(d / "natural_stopwords.txt");
    return r;
}

std::string fmt_count(std::uint64_t v) { return std::to_string(v); }

// --- stages -----------------------------------------------------------------

void run_ingest(const PipelineConfig& c) {
    std::vector<corpus::PaperRecord> all;
    std::size_t malformed = 0, gaps = 0;
    std::vector<std::string> reports;
    auto read_files = [&](const std::vector<fs::path>& files, std::vector<corpus::PaperRecord>& dst) {
        for (const auto& f : files) {
            corpus::RecordReader reader(f, {.strict = c.strict});
            while (auto r = reader.next()) dst.push_back(std::move(*r));
            malformed += reader.malformed_lines();
            gaps += reader.abstract_gaps();
            for (const auto& m : reader.malformed_reports())
                reports.push_back(f.filename().string() + m.substr(f.string().size()));
        }
    };
    std::vector<corpus::PaperRecord> baseline_in;
    read_files(c.corpus, all);
    read_files(c.baseline_corpus, baseline_in);
    for (const auto& r : baseline_in)
        if (r.pub_date.year() >= c.analysis_start_year)
            throw DataError("baseline corpus record " + r.paper_id + " is dated " + r.pub_date.to_string() +
                            ", inside the analysis period");

    // one record per id whatever the file layout: the earliest, ties by content
    std::size_t duplicate_ids = 0;
    auto dedupe = [&](std::vector<corpus::PaperRecord>& records) {
        std::vector<std::pair<std::string, std::size_t>> keyed;
        for (std::size_t i = 0; i < records.size(); ++i) keyed.emplace_back(corpus::record_to_json(records[i]).dump(), i);
        std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
            const auto ka = corpus::order_key(records[a.second]), kb = corpus::order_key(records[b.second]);
            if (ka != kb) return ka < kb;
            return a.first < b.first;
        });
        std::unordered_set<std::string> seen;
        std::vector<corpus::PaperRecord> out;
        for (const auto& [dump, i] : keyed) {
            if (!seen.insert(records[i].paper_id).second) {
                ++duplicate_ids;
                continue;
            }
            out.push_back(std::move(records[i]));
        }
        records = std::move(out);
    };
    std::vector<corpus::PaperRecord> analysis_in;
    for (auto& r : all) (r.pub_date.year() < c.analysis_start_year ? baseline_in : analysis_in).push_back(std::move(r));
    all.clear();
    dedupe(analysis_in);
    dedupe(baseline_in);

    corpus::CleaningRules rules;
    rules.duplicate_title = c.clean_duplicate_title;
    rules.empty_title = c.clean_empty_title;
    rules.no_author = c.clean_no_author;
    rules.duplicate_abstract = c.clean_duplicate_abstract;
    rules.bibliographic_abstract = c.clean_bibliographic_abstract;
    rules.venue_without_publisher = c.clean_venue_without_publisher;
    rules.bibliographic_threshold = c.bibliographic_threshold;

    auto analysis = corpus::clean_corpus(std::move(analysis_in), rules);
    auto baseline = corpus::clean_corpus(std::move(baseline_in), rules);
    corpus::check_subfield_mapping(analysis.records);
    analysis.manifest.malformed_lines = malformed;
    analysis.manifest.abstract_gap_warnings = gaps;
    analysis.manifest.duplicate_ids = duplicate_ids;

    write_jsonl(analysis.records, c.output / "corpus.jsonl");
    write_jsonl(baseline.records, c.output / "baseline_corpus.jsonl");
    json manifest;
    manifest["analysis"] = analysis.manifest.to_json();
    manifest["baseline"] = baseline.manifest.to_json();
    manifest["analysis_start_year"] = c.analysis_start_year;
    manifest["malformed_reports"] = reports;
    write_text_file(c.output / "manifest.json", manifest.dump(2) + "\n");
}

void run_baseline(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "baseline_corpus.jsonl");
    auto res = load_text_resources(c);
    const text::TextPipeline pipe(res.tagger, res.lemmatizer, res.seed_lists);
    corpus::BaselineOptions opts;
    opts.last_year = c.analysis_start_year - 1;
    opts.include_pairs = c.pair_baseline;
    opts.mode = mode_of(c);
    corpus::build_baseline(records, pipe, opts).save(c.output / "baseline.tsv");
}

void run_preprocess(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "corpus.jsonl");
    auto res = load_text_resources(c);
    const auto mode = mode_of(c);
    const text::TextPipeline seed_pipe(res.tagger, res.lemmatizer, res.seed_lists);

    // vocabulary: papers per raw lemma
    std::vector<std::vector<std::string>> distinct(records.size());
    parallel_for(records.size(), c.threads, [&](std::size_t i) {
        auto raw = seed_pipe.raw_terms(text::TextPipeline::paper_text(records[i], mode));
        std::sort(raw.words.begin(), raw.words.end());
        raw.words.erase(std::unique(raw.words.begin(), raw.words.end()), raw.words.end());
        distinct[i] = std::move(raw.words);
    });
    std::unordered_map<std::string, std::size_t> vocab;
    for (const auto& ws : distinct)
        for (const auto& w : ws) ++vocab[w];
    distinct.clear();

    text::ExpansionOptions expansion;
    expansion.min_papers = c.common_word_min_papers;
    if (c.common_word_per_million)
        expansion.min_papers = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(*c.common_word_per_million * static_cast<double>(records.size()) / 1e6)));
    auto lists = text::expand_filter_lists(res.seed_lists, vocab, res.natural_stop_words, expansion);
    {
        TsvWriter out(c.output / "filter_lists.tsv", {"list", "term"});
        for (const auto& [name, set] : {std::pair{"stop", &lists.stop_words()}, std::pair{"removal", &lists.removal_words()}}) {
            std::vector<std::string> terms(set->begin(), set->end());
            std::sort(terms.begin(), terms.end());
            for (const auto& t : terms) out.row({name, t});
        }
        out.close();
    }

    const text::TextPipeline pipe(res.tagger, res.lemmatizer, std::move(lists));
    const auto detector = text::NoveltyDetector::load(c.lexicon_dir / "novelty_words.json");
    std::vector<std::vector<std::string>> rows(records.size());
    parallel_for(records.size(), c.threads, [&](std::size_t i) {
        const auto& r = records[i];
        const auto sets = pipe.process_paper(r, mode);
        const bool cue = mode == text::TextMode::TitleOnly ? detector.detect(r.title, std::nullopt)
                                                           : detector.detect(r.title, r.abstract);
        rows[i] = {r.paper_id,           r.pub_date.to_string(),       cue ? "1" : "0",
                   join_words(sets.words), join_words(sets.partner_words), join_words(sets.phrases),
                   join_pairs(sets.word_pairs), join_pairs(sets.phrase_pairs)};
    });
    TsvWriter out(c.output / "termsets.tsv", {"paper_id", "date", "novelty_language", "words", "partner_words",
                                              "phrases", "word_pairs", "phrase_pairs"});
    for (const auto& row : rows) out.row(row);
    out.close();
}

void run_novelty(const PipelineConfig& c) {
    const auto baseline = corpus::BaselineDictionary::load(c.output / "baseline.tsv");
    novelty::EngineOptions opts;
    opts.min_occurrence = c.min_occurrence;
    opts.memory_budget = c.memory_budget;
    opts.shards = c.shards;
    opts.threads = c.threads;
    opts.pair_baseline = c.pair_baseline;
    if (c.spill_dir) opts.spill_dir = *c.spill_dir;
    novelty::NoveltyEngine engine(opts, &baseline);
    detail::TermsetSource source(c.output / "termsets.tsv");
    engine.pass1(source);
    source.rewind();
    const auto result = engine.pass2(source);

    {
        TsvWriter out(c.output / "term_stats.tsv", {"kind", "term", "occ", "pioneer_id", "first_date", "reuse"});
        for (const auto& t : result.term_stats)
            out.row({std::string(novelty::kind_name(t.kind)), t.term, fmt_count(t.occ), result.paper_ids[t.pioneer],
                     result.dates[t.pioneer].to_string(), fmt_count(t.reuse)});
        out.close();
    }
    {
        TsvWriter out(c.output / "pioneer_ties.tsv", {"kind", "term", "pioneer_id", "runner_up_id", "date"});
        for (const auto& t : result.ties)
            out.row({std::string(novelty::kind_name(t.kind)), t.term, result.paper_ids[t.pioneer],
                     result.paper_ids[t.runner_up], result.dates[t.pioneer].to_string()});
        out.close();
    }
    TsvWriter out(c.output / "novelty.tsv",
                  {"paper_id", "new_word", "new_phrase", "new_word_comb", "new_phrase_comb", "new_word_reuse",
                   "new_phrase_reuse", "new_word_comb_reuse", "new_phrase_comb_reuse", "word_count", "phrase_count"});
    for (std::size_t i = 0; i < result.papers.size(); ++i) {
        const auto& p = result.papers[i];
        std::vector<std::string> row{result.paper_ids[i]};
        for (auto v : p.new_terms) row.push_back(fmt_count(v));
        for (auto v : p.reuse) row.push_back(fmt_count(v));
        row.push_back(fmt_count(p.word_count));
        row.push_back(fmt_count(p.phrase_count));
        out.row(row);
    }
    out.close();
}

void run_semdist(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "corpus.jsonl");
    std::vector<semdist::DatedPaper> papers;
    std::unordered_set<std::string> ids;
    for (const auto& r : records) {
        papers.push_back({r.paper_id, r.pub_date});
        ids.insert(r.paper_id);
    }
    semdist::LoadTally tally;
    std::vector<std::optional<double>> distance(records.size());
    std::size_t dimension = 0;
    if (c.embeddings) {
        const auto store = semdist::load_embeddings(*c.embeddings, &ids, &tally);
        dimension = store.dimension();
        semdist::DistanceOptions opts;
        opts.window_days = c.window_days;
        opts.calendar_years = c.calendar_window;
        opts.threads = c.threads;
        distance = semdist::semantic_distance(papers, store, opts);
    }
    TsvWriter out(c.output / "semdist.tsv", {"paper_id", "semantic_distance"});
    for (std::size_t i = 0; i < papers.size(); ++i) out.row({papers[i].id, format_optional(distance[i])});
    out.close();
    json tallies{{"embeddings", c.embeddings.has_value()},
                 {"dimension", dimension},
                 {"loaded", tally.loaded},
                 {"non_finite", tally.non_finite},
                 {"zero", tally.zero},
                 {"unknown_id", tally.unknown_id}};
    write_text_file(c.output / "semdist_tally.json", tallies.dump(2) + "\n");
}

void run_cite(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "corpus.jsonl");
    const auto graph = cite::build_graph(records);
    cite::UzziOptions uzzi_opts;
    uzzi_opts.seed = c.uzzi_seed;
    uzzi_opts.n_rewirings = c.uzzi_rewirings;
    uzzi_opts.swaps_per_edge = c.uzzi_swaps_per_edge;
    uzzi_opts.threads = c.threads;
    const auto uzzi = cite::uzzi_scores(graph, uzzi_opts);
    const auto wang = cite::wang_scores(graph);
    const auto cd = cite::cd_scores(graph, c.cd_window, c.threads);
    TsvWriter out(c.output / "citemetrics.tsv",
                  {"paper_id", "n_refs", "n_ref_journals", "citations", "uzzi", "wang", "cd"});
    for (std::size_t i = 0; i < graph.size(); ++i)
        out.row({graph.ids[i], fmt_count(graph.n_refs[i]), fmt_count(graph.n_ref_journals[i]),
                 fmt_count(graph.cited_by[i].size()), format_optional(uzzi[i]), format_optional(wang[i]),
                 format_optional(cd[i])});
    out.close();
    json tallies{{"unresolved", graph.unresolved},
                 {"self_citations", graph.self_citations},
                 {"duplicate_references", graph.duplicate_references},
                 {"journals", graph.journal_names.size()}};
    write_text_file(c.output / "cite_tally.json", tallies.dump(2) + "\n");
}

void run_metrics(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "corpus.jsonl");
    const auto nov = read_tsv(c.output / "novelty.tsv");
    const auto sem = read_tsv(c.output / "semdist.tsv");
    const auto cit = read_tsv(c.output / "citemetrics.tsv");
    for (const auto* t : {&nov, &sem, &cit}) {
        if (t->rows.size() != records.size())
            throw DataError(t->source + " has " + std::to_string(t->rows.size()) + " rows for " +
                            std::to_string(records.size()) + " papers; rerun the stage that writes it");
        for (std::size_t i = 0; i < records.size(); ++i)
            if (t->rows[i][0] != records[i].paper_id)
                throw DataError(t->source + " row " + std::to_string(i + 2) + " is out of step with corpus.jsonl");
    }
    static const std::vector<std::string> counts{"new_word", "new_phrase", "new_word_comb", "new_phrase_comb"};
    std::vector<std::string> header{"paper_id"};
    header.insert(header.end(), counts.begin(), counts.end());
    for (const auto& k : counts) header.push_back(k + "_bin");
    for (const auto& k : counts) header.push_back(k + "_reuse");
    for (const char* h : {"word_count", "phrase_count", "has_abstract", "n_refs", "n_ref_journals",
                          "semantic_distance", "uzzi", "wang", "cd", "uzzi_missing", "wang_missing", "cd_missing"})
        header.emplace_back(h);

    TsvWriter out(c.output / "metrics.tsv", header);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& n = nov.rows[i];
        const auto& s = sem.rows[i];
        const auto& t = cit.rows[i];
        std::vector<std::string> row{records[i].paper_id};
        for (const auto& k : counts) row.push_back(n[nov.column(k)]);
        for (const auto& k : counts) row.push_back(n[nov.column(k)] == "0" ? "0" : "1");
        for (const auto& k : counts) row.push_back(n[nov.column(k + "_reuse")]);
        row.push_back(n[nov.column("word_count")]);
        row.push_back(n[nov.column("phrase_count")]);
        row.push_back(records[i].has_abstract ? "1" : "0");
        row.push_back(t[cit.column("n_refs")]);
        row.push_back(t[cit.column("n_ref_journals")]);
        row.push_back(s[sem.column("semantic_distance")]);
        for (const char* k : {"uzzi", "wang", "cd"}) row.push_back(t[cit.column(k)]);
        for (const char* k : {"uzzi", "wang", "cd"}) row.push_back(t[cit.column(k)].empty() ? "1" : "0");
        out.row(row);
    }
    out.close();
}

// --- orchestration ----------------------------------------------------------

struct StageSpec {
    std::vector<std::pair<std::string, Stage>> inputs;  // artifact, producing stage
    std::vector<std::string> outputs;
    std::function<void(const PipelineConfig&)> run;
};

const StageSpec& spec_of(Stage s) {
    static const std::map<Stage, StageSpec> specs{
        {Stage::Ingest, {{}, {"corpus.jsonl", "baseline_corpus.jsonl", "manifest.json"}, run_ingest}},
        {Stage::Baseline, {{{"baseline_corpus.jsonl", Stage::Ingest}}, {"baseline.tsv"}, run_baseline}},
        {Stage::Preprocess, {{{"corpus.jsonl", Stage::Ingest}}, {"filter_lists.tsv", "termsets.tsv"}, run_preprocess}},
        {Stage::Novelty,
         {{{"termsets.tsv", Stage::Preprocess}, {"baseline.tsv", Stage::Baseline}},
          {"term_stats.tsv", "pioneer_ties.tsv", "novelty.tsv"},
          run_novelty}},
        {Stage::Semdist, {{{"corpus.jsonl", Stage::Ingest}}, {"semdist.tsv", "semdist_tally.json"}, run_semdist}},
        {Stage::Cite, {{{"corpus.jsonl", Stage::Ingest}}, {"citemetrics.tsv", "cite_tally.json"}, run_cite}},
        {Stage::Metrics,
         {{{"corpus.jsonl", Stage::Ingest},
           {"novelty.tsv", Stage::Novelty},
           {"semdist.tsv", Stage::Semdist},
           {"citemetrics.tsv", Stage::Cite}},
          {"metrics.tsv"},
          run_metrics}},
        {Stage::Stats,
         {{{"metrics.tsv", Stage::Metrics},
           {"corpus.jsonl", Stage::Ingest},
           {"termsets.tsv", Stage::Preprocess},
           {"term_stats.tsv", Stage::Novelty},
           {"citemetrics.tsv", Stage::Cite}},
          {"stats"},
          detail::run_stats}},
        {Stage::Plotdata,
         {{{"metrics.tsv", Stage::Metrics},
           {"corpus.jsonl", Stage::Ingest},
           {"termsets.tsv", Stage::Preprocess},
           {"citemetrics.tsv", Stage::Cite}},
          {"plots"},
          detail::run_plotdata}},
    };
    return specs.at(s);
}

/// File digest, or for a directory the digest of its sorted listing with file digests.
std::string digest_path(const fs::path& p) {
    if (!fs::is_directory(p)) return sha256_file(p);
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& f : files) listing += fs::relative(f, p).generic_string() + "\t" + sha256_file(f) + "\n";
    return sha256_hex(listing);
}

fs::path stamp_path(const PipelineConfig& c, Stage s) {
    return c.output / ".stamps" / (std::string(stage_name(s)) + ".json");
}

std::optional<json> read_stamp(const PipelineConfig& c, Stage s) {
    std::ifstream in(stamp_path(c, s));
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception&) {
        throw DataError("corrupt stage stamp " + stamp_path(c, s).string());
    }
}

json input_digests(const PipelineConfig& c, const StageSpec& spec) {
    json out = json::object();
    for (const auto& [artifact, producer] : spec.inputs) out[artifact] = sha256_file(c.output / artifact);
    return out;
}

bool outputs_match(const PipelineConfig& c, const StageSpec& spec, const json& stamp) {
    const auto& recorded = stamp.at("outputs");
    for (const auto& o : spec.outputs) {
        if (!fs::exists(c.output / o) || !recorded.contains(o)) return false;
        if (recorded.at(o).get<std::string>() != digest_path(c.output / o)) return false;
    }
    return true;
}

void write_run_manifest(const PipelineConfig& c) {
    json stages = json::object();
    for (auto s : all_stages())
        if (auto stamp = read_stamp(c, s)) stages[std::string(stage_name(s))] = *stamp;
    json manifest{{"tool", "scinov"}, {"version", SCINOV_VERSION}, {"stages", stages}};
    write_text_file(c.output / "run_manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

std::vector<StageReport> run(const PipelineConfig& config, const std::vector<Stage>& stages, const RunOptions& options) {
    std::vector<Stage> ordered;
    for (auto s : all_stages())
        if (std::find(stages.begin(), stages.end(), s) != stages.end()) ordered.push_back(s);
    fs::create_directories(config.output / ".stamps");

    std::vector<StageReport> reports;
    for (auto s : ordered) {
        const auto& spec = spec_of(s);
        for (const auto& [artifact, producer] : spec.inputs)
            if (!fs::exists(config.output / artifact))
                throw DataError("stage '" + std::string(stage_name(s)) + "' needs " + artifact +
                                ", which is written by stage '" + std::string(stage_name(producer)) +
                                "'; run that stage first");
        const auto hash = stage_config_hash(config, s);
        const auto inputs = input_digests(config, spec);
        const auto stamp = read_stamp(config, s);
        if (stamp && stamp->at("config_hash").get<std::string>() != hash && !options.force)
            throw UsageError("stage '" + std::string(stage_name(s)) + "': the artifacts in " + config.output.string() +
                             " were produced with different settings; rerun with --force to replace them");
        if (stamp && stamp->at("config_hash").get<std::string>() == hash && stamp->at("inputs") == inputs &&
            outputs_match(config, spec, *stamp)) {
            reports.push_back({s, true});
            continue;
        }
        fs::remove(stamp_path(config, s));
        spec.run(config);
        json outputs = json::object();
        for (const auto& o : spec.outputs) outputs[o] = digest_path(config.output / o);
        const json fresh{{"config_hash", hash}, {"inputs", inputs}, {"outputs", outputs}};
        write_text_file(stamp_path(config, s), fresh.dump(2) + "\n");
        reports.push_back({s, false});
    }
    write_run_manifest(config);
    return reports;
}

}  // namespace scinov::pipeline
