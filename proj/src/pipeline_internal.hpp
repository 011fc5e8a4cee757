#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scinov/corpus.hpp"
#include "scinov/novelty.hpp"
#include "scinov/pipeline.hpp"
#include "scinov/text.hpp"

namespace scinov::pipeline::detail {

namespace fs = std::filesystem;

std::vector<corpus::PaperRecord> read_jsonl(const fs::path& path);

/// Streams termsets.tsv as the novelty engine's paper source.
class TermsetSource final : public novelty::PaperSource {
public:
    explicit TermsetSource(fs::path path);
    bool next(novelty::PaperTerms& out) override;
    void rewind() override;

private:
    fs::path path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

/// One termsets.tsv row.
struct TermsetRow {
    std::string id;
    bool novelty_language = false;
    text::TermSets sets;
};
TermsetRow parse_termset_line(const std::string& line, const std::string& where);

void run_stats(const PipelineConfig& config);
void run_plotdata(const PipelineConfig& config);

}  // namespace scinov::pipeline::detail
