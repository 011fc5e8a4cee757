#include "scinov/tsv.hpp"

#include "scinov/error.hpp"
#include "scinov/format.hpp"

namespace scinov {

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::size_t Table::column(std::string_view name) const {
    if (auto i = find_column(name)) return *i;
    throw DataError(source + ": missing column '" + std::string(name) + "'");
}

Table read_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    Table t;
    t.source = path.filename().string();
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
    for (auto f : split(line, '\t')) t.header.emplace_back(f);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<std::string> cells;
        for (auto f : split(line, '\t')) cells.emplace_back(f);
        if (cells.size() != t.header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

TsvWriter::TsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), width_(header.size()) {
    if (!out_) throw DataError("cannot write " + path.string());
    row(header);
}

void TsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("TSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of("\t\n\r") != std::string::npos)
            throw DataError(path_.string() + ": field holds a tab or newline");
        if (i) out_ << '\t';
        out_ << cells[i];
    }
    out_ << '\n';
}

void TsvWriter::close() {
    out_.close();
    if (!out_) throw DataError("failed writing " + path_.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path.string());
        out << text;
        if (!out) throw DataError("failed writing " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace scinov
