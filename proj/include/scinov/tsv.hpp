#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scinov {

/// A header line plus string cells; no quoting, fields may not hold tabs or newlines.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws DataError naming the table when the column is absent.
    [[nodiscard]] std::size_t column(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> find_column(std::string_view name) const;
    std::string source;
};

Table read_tsv(const std::filesystem::path& path);

class TsvWriter {
public:
    TsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

/// Writes `text` atomically enough for our purposes: to a sibling temp file, then renamed.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace scinov
