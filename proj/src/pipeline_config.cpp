#include "scinov/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "scinov/digest.hpp"
#include "scinov/error.hpp"
#include "scinov/format.hpp"

namespace scinov::pipeline {

namespace fs = std::filesystem;

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw UsageError("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config: '" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

fs::path resolve(const fs::path& base, std::string_view v) {
    fs::path p{std::string(v)};
    return (p.is_absolute() ? p : base / p).lexically_normal();
}

void require_exists(const fs::path& p, std::string_view key) {
    if (!fs::exists(p)) throw UsageError("config: " + std::string(key) + " path does not exist: " + p.string());
}

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), fs::absolute(path).parent_path());
}

PipelineConfig PipelineConfig::parse(std::string_view text, const fs::path& base) {
    PipelineConfig c;
    c.lexicon_dir = SCINOV_DATA_DIR;
    bool have_output = false;

    using Setter = std::function<void(std::string_view)>;
    auto path_list = [&](std::vector<fs::path>& dst, std::string_view key) {
        return [&dst, &base, key](std::string_view v) {
            dst.clear();
            for (auto part : split(v, ',')) {
                const auto t = trim(part);
                if (t.empty()) continue;
                dst.push_back(resolve(base, t));
                require_exists(dst.back(), key);
            }
        };
    };
    auto opt_path = [&](std::optional<fs::path>& dst, std::string_view key) {
        return [&dst, &base, key](std::string_view v) {
            dst = resolve(base, v);
            require_exists(*dst, key);
        };
    };
    auto flag = [](bool& dst, std::string_view key) { return [&dst, key](std::string_view v) { dst = parse_bool(key, v); }; };
    auto real = [](double& dst, std::string_view key) {
        return [&dst, key](std::string_view v) { dst = parse_number<double>(key, v); };
    };
    auto integer = [](auto& dst, std::string_view key) {
        return [&dst, key](std::string_view v) { dst = parse_number<std::remove_reference_t<decltype(dst)>>(key, v); };
    };

    const std::map<std::string, Setter, std::less<>> setters{
        {"corpus", path_list(c.corpus, "corpus")},
        {"baseline_corpus", path_list(c.baseline_corpus, "baseline_corpus")},
        {"output", [&](std::string_view v) { c.output = resolve(base, v); have_output = true; }},
        {"lexicon_dir", [&](std::string_view v) { c.lexicon_dir = resolve(base, v); require_exists(c.lexicon_dir, "lexicon_dir"); }},
        {"embeddings", opt_path(c.embeddings, "embeddings")},
        {"cases", opt_path(c.cases, "cases")},
        {"neighbors", opt_path(c.neighbors, "neighbors")},
        {"analysis", opt_path(c.analysis, "analysis")},
        {"spill_dir", [&](std::string_view v) { c.spill_dir = resolve(base, v); }},
        {"mode", [&](std::string_view v) {
             if (v != "full" && v != "title_only") throw UsageError("config: mode must be full or title_only");
             c.mode = std::string(v);
         }},
        {"analysis_start_year", integer(c.analysis_start_year, "analysis_start_year")},
        {"strict", flag(c.strict, "strict")},
        {"clean_duplicate_title", flag(c.clean_duplicate_title, "clean_duplicate_title")},
        {"clean_empty_title", flag(c.clean_empty_title, "clean_empty_title")},
        {"clean_no_author", flag(c.clean_no_author, "clean_no_author")},
        {"clean_duplicate_abstract", flag(c.clean_duplicate_abstract, "clean_duplicate_abstract")},
        {"clean_bibliographic_abstract", flag(c.clean_bibliographic_abstract, "clean_bibliographic_abstract")},
        {"clean_venue_without_publisher", flag(c.clean_venue_without_publisher, "clean_venue_without_publisher")},
        {"bibliographic_threshold", real(c.bibliographic_threshold, "bibliographic_threshold")},
        {"common_word_min_papers", integer(c.common_word_min_papers, "common_word_min_papers")},
        {"common_word_per_million", [&](std::string_view v) { c.common_word_per_million = parse_number<double>("common_word_per_million", v); }},
        {"drop_non_ascii", flag(c.drop_non_ascii, "drop_non_ascii")},
        {"min_occurrence", integer(c.min_occurrence, "min_occurrence")},
        {"pair_baseline", flag(c.pair_baseline, "pair_baseline")},
        {"memory_budget", integer(c.memory_budget, "memory_budget")},
        {"shards", integer(c.shards, "shards")},
        {"window_days", integer(c.window_days, "window_days")},
        {"calendar_window", flag(c.calendar_window, "calendar_window")},
        {"uzzi_seed", integer(c.uzzi_seed, "uzzi_seed")},
        {"uzzi_rewirings", integer(c.uzzi_rewirings, "uzzi_rewirings")},
        {"uzzi_swaps_per_edge", real(c.uzzi_swaps_per_edge, "uzzi_swaps_per_edge")},
        {"cd_window", integer(c.cd_window, "cd_window")},
        {"matching_seed", integer(c.matching_seed, "matching_seed")},
        {"threads", integer(c.threads, "threads")},
    };

    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = std::string(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw UsageError("config: key '" + key + "' given twice");
        it->second(value);
    }
    if (!have_output) throw UsageError("config: 'output' is required");
    if (c.shards == 0) throw UsageError("config: shards must be positive");
    if (c.min_occurrence < 1) throw UsageError("config: min_occurrence must be at least 1");
    if (c.window_days < 0) throw UsageError("config: window_days must not be negative");
    if (c.uzzi_rewirings < 2) throw UsageError("config: uzzi_rewirings must be at least 2");
    return c;
}

namespace {

std::string digest_or_absent(const std::optional<fs::path>& p) { return p ? sha256_file(*p) : "-"; }

std::string digest_list(const std::vector<fs::path>& ps) {
    std::string out;
    for (const auto& p : ps) out += sha256_file(p) + ",";
    return out;
}

std::string digest_dir(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string out;
    for (const auto& f : files) out += f.filename().string() + ":" + sha256_file(f) + ",";
    return out;
}

}  // namespace

std::string stage_config_hash(const PipelineConfig& c, Stage stage) {
    std::map<std::string, std::string> kv;
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    switch (stage) {
        case Stage::Ingest:
            kv["corpus"] = digest_list(c.corpus);
            kv["baseline_corpus"] = digest_list(c.baseline_corpus);
            kv["analysis_start_year"] = std::to_string(c.analysis_start_year);
            kv["strict"] = b(c.strict);
            kv["clean"] = b(c.clean_duplicate_title) + b(c.clean_empty_title) + b(c.clean_no_author) +
                          b(c.clean_duplicate_abstract) + b(c.clean_bibliographic_abstract) +
                          b(c.clean_venue_without_publisher);
            kv["bibliographic_threshold"] = format_double(c.bibliographic_threshold);
            break;
        case Stage::Baseline:
            kv["lexicon_dir"] = digest_dir(c.lexicon_dir);
            kv["mode"] = c.mode;
            kv["pair_baseline"] = b(c.pair_baseline);
            kv["drop_non_ascii"] = b(c.drop_non_ascii);
            kv["analysis_start_year"] = std::to_string(c.analysis_start_year);
            break;
        case Stage::Preprocess:
            kv["lexicon_dir"] = digest_dir(c.lexicon_dir);
            kv["mode"] = c.mode;
            kv["drop_non_ascii"] = b(c.drop_non_ascii);
            kv["common_word_min_papers"] = std::to_string(c.common_word_min_papers);
            kv["common_word_per_million"] =
                c.common_word_per_million ? format_double(*c.common_word_per_million) : "-";
            break;
        case Stage::Novelty:
            kv["min_occurrence"] = std::to_string(c.min_occurrence);
            kv["pair_baseline"] = b(c.pair_baseline);
            break;
        case Stage::Semdist:
            kv["embeddings"] = digest_or_absent(c.embeddings);
            kv["window_days"] = std::to_string(c.window_days);
            kv["calendar_window"] = b(c.calendar_window);
            break;
        case Stage::Cite:
            kv["uzzi_seed"] = std::to_string(c.uzzi_seed);
            kv["uzzi_rewirings"] = std::to_string(c.uzzi_rewirings);
            kv["uzzi_swaps_per_edge"] = format_double(c.uzzi_swaps_per_edge);
            kv["cd_window"] = std::to_string(c.cd_window);
            break;
        case Stage::Metrics: break;
        case Stage::Stats:
            kv["analysis"] = digest_or_absent(c.analysis);
            kv["cases"] = digest_or_absent(c.cases);
            kv["neighbors"] = digest_or_absent(c.neighbors);
            kv["matching_seed"] = std::to_string(c.matching_seed);
            break;
        case Stage::Plotdata:
            kv["analysis"] = digest_or_absent(c.analysis);
            kv["neighbors"] = digest_or_absent(c.neighbors);
            kv["cases"] = digest_or_absent(c.cases);
            break;
    }
    std::string text = std::string(stage_name(stage)) + "\n";
    for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
    return sha256_hex(text);
}

}  // namespace scinov::pipeline
