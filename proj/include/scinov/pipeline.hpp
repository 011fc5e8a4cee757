#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scinov::pipeline {

/// Settings read from a `key = value` file. Relative paths resolve against
/// the file's directory.
struct PipelineConfig {
    std::vector<std::filesystem::path> corpus;
    std::vector<std::filesystem::path> baseline_corpus;
    std::filesystem::path output;
    std::filesystem::path lexicon_dir;
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> cases;
    std::optional<std::filesystem::path> neighbors;
    std::optional<std::filesystem::path> analysis;
    std::optional<std::filesystem::path> spill_dir;

    std::string mode = "full";
    int analysis_start_year = 1901;
    bool strict = false;

    bool clean_duplicate_title = true;
    bool clean_empty_title = true;
    bool clean_no_author = true;
    bool clean_duplicate_abstract = true;
    bool clean_bibliographic_abstract = true;
    bool clean_venue_without_publisher = true;
    double bibliographic_threshold = 0.5;

    std::size_t common_word_min_papers = 1000;
    std::optional<double> common_word_per_million;
    bool drop_non_ascii = true;

    std::uint32_t min_occurrence = 2;
    bool pair_baseline = true;
    std::uint64_t memory_budget = 4ULL << 30;
    std::size_t shards = 16;

    int window_days = 1826;
    bool calendar_window = false;

    std::uint64_t uzzi_seed = 42;
    int uzzi_rewirings = 10;
    double uzzi_swaps_per_edge = 10;
    int cd_window = 0;

    std::uint64_t matching_seed = 42;

    unsigned threads = 1;

    /// Throws UsageError on unknown keys, malformed values or missing paths.
    static PipelineConfig load(const std::filesystem::path& path);
    /// Same, from text; `base` anchors relative paths.
    static PipelineConfig parse(std::string_view text, const std::filesystem::path& base);
};

enum class Stage { Ingest, Baseline, Preprocess, Novelty, Semdist, Cite, Metrics, Stats, Plotdata };

std::string_view stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);
/// Every stage in dependency order.
const std::vector<Stage>& all_stages();

struct RunOptions {
    bool force = false;
};

struct StageReport {
    Stage stage;
    bool skipped = false;  // inputs, settings and outputs unchanged
};

/// Runs the stages in dependency order. Each stage checks that the artifacts
/// it reads exist (DataError naming the producing stage otherwise) and that
/// existing artifacts were produced under the same settings (UsageError
/// unless forced). Rewrites run_manifest.json at the end.
std::vector<StageReport> run(const PipelineConfig& config, const std::vector<Stage>& stages,
                             const RunOptions& options = {});

/// Digest over the settings a stage depends on. Thread counts, memory
/// budget and spill location are excluded because they never change results.
std::string stage_config_hash(const PipelineConfig& config, Stage stage);

}  // namespace scinov::pipeline
