#include "scinov/semdist.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "scinov/error.hpp"
#include "scinov/format.hpp"
#include "scinov/parallel.hpp"

namespace scinov::semdist {

namespace {

double norm_of(std::span<const float> v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

enum class Verdict { Ok, NonFinite, Zero };

Verdict check(std::span<const float> v) {
    bool nonzero = false;
    for (float x : v) {
        if (!std::isfinite(x)) return Verdict::NonFinite;
        nonzero = nonzero || x != 0.0f;
    }
    return nonzero ? Verdict::Ok : Verdict::Zero;
}

std::size_t parse_header(const std::string& line, const std::filesystem::path& path) {
    auto cols = split(trim(line), '\t');
    std::size_t dim = 0;
    if (cols.size() != 2 || cols[0] != "dim" ||
        std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), dim).ec != std::errc() || dim == 0)
        throw DataError(path.string() + ": expected header 'dim<TAB>n', got '" + line + "'");
    return dim;
}

void parse_values(std::string_view text, std::vector<float>& out, const std::string& where) {
    out.clear();
    const char* p = text.data();
    const char* end = p + text.size();
    while (p < end) {
        const char* comma = std::find(p, end, ',');
        std::string_view field(p, static_cast<std::size_t>(comma - p));
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        if (field == "nan" || field == "NaN" || field == "-nan") {
            out.push_back(std::numeric_limits<float>::quiet_NaN());
        } else if (field == "inf" || field == "Inf" || field == "-inf" || field == "-Inf") {
            out.push_back(field.front() == '-' ? -std::numeric_limits<float>::infinity()
                                               : std::numeric_limits<float>::infinity());
        } else {
            float v = 0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw DataError(where + ": bad vector component '" + std::string(field) + "'");
            out.push_back(v);
        }
        p = comma == end ? end : comma + 1;
    }
}

void admit(EmbeddingStore& store, std::string id, std::span<const float> values,
           const std::unordered_set<std::string>* corpus_ids, LoadTally& tally, const std::string& where) {
    if (values.size() != store.dimension())
        throw DataError(where + ": vector has " + std::to_string(values.size()) + " components, header says " +
                        std::to_string(store.dimension()));
    if (corpus_ids && !corpus_ids->count(id)) {
        ++tally.unknown_id;
        return;
    }
    switch (check(values)) {
        case Verdict::NonFinite: ++tally.non_finite; return;
        case Verdict::Zero: ++tally.zero; return;
        case Verdict::Ok: break;
    }
    store.add(std::move(id), values);
    ++tally.loaded;
}

EmbeddingStore load_tsv(const std::filesystem::path& path, const std::unordered_set<std::string>* corpus_ids,
                        LoadTally& tally) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read embeddings " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing dimension header");
    EmbeddingStore store(parse_header(line, path));
    std::vector<float> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError(where + ": expected id<TAB>values");
        parse_values(std::string_view(line).substr(tab + 1), values, where);
        admit(store, line.substr(0, tab), values, corpus_ids, tally, where);
    }
    return store;
}

EmbeddingStore load_f32(const std::filesystem::path& path, const std::unordered_set<std::string>* corpus_ids,
                        LoadTally& tally) {
    auto ids_path = path;
    ids_path.replace_extension(".ids");
    std::ifstream ids(ids_path);
    if (!ids) throw DataError("cannot read embedding id sidecar " + ids_path.string());
    std::string line;
    if (!std::getline(ids, line)) throw DataError(ids_path.string() + ": missing dimension header");
    EmbeddingStore store(parse_header(line, ids_path));
    const auto dim = store.dimension();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read embeddings " + path.string());
    const auto bytes = std::filesystem::file_size(path);
    if (bytes % (dim * sizeof(float)) != 0)
        throw DataError(path.string() + ": size " + std::to_string(bytes) + " is not a multiple of " +
                        std::to_string(dim) + " float32 values");
    const auto rows = bytes / (dim * sizeof(float));

    std::vector<float> values(dim);
    std::vector<unsigned char> raw(dim * sizeof(float));
    for (std::uint64_t row = 0; row < rows; ++row) {
        if (!std::getline(ids, line))
            throw DataError(ids_path.string() + ": fewer ids than the " + std::to_string(rows) + " vectors");
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        for (std::size_t i = 0; i < dim; ++i) {
            std::uint32_t u = 0;
            for (int b = 3; b >= 0; --b) u = (u << 8) | raw[i * 4 + static_cast<std::size_t>(b)];
            values[i] = std::bit_cast<float>(u);
        }
        admit(store, std::string(trim(line)), values, corpus_ids, tally, path.string() + ": row " + std::to_string(row));
    }
    while (std::getline(ids, line))
        if (!trim(line).empty()) throw DataError(ids_path.string() + ": more ids than vectors");
    return store;
}

}  // namespace

void EmbeddingStore::add(std::string id, std::span<const float> values) {
    if (values.size() != dim_)
        throw DataError("embedding for " + id + " has dimension " + std::to_string(values.size()) +
                        ", expected " + std::to_string(dim_));
    if (index_.count(id)) throw DataError("duplicate embedding id " + id);
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), values.begin(), values.end());
    norms_.push_back(norm_of(values));
}

bool EmbeddingStore::contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

std::optional<std::size_t> EmbeddingStore::slot(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::span<const float>> EmbeddingStore::find(std::string_view id) const {
    auto s = slot(id);
    if (!s) return std::nullopt;
    return vector(*s);
}

EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               const std::unordered_set<std::string>* corpus_ids, LoadTally* tally) {
    LoadTally local;
    LoadTally& t = tally ? *tally : local;
    const auto ext = path.extension().string();
    if (ext == ".f32" || ext == ".bin") return load_f32(path, corpus_ids, t);
    return load_tsv(path, corpus_ids, t);
}

void save_embeddings_tsv(const EmbeddingStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << "dim\t" << store.dimension() << '\n';
    for (std::size_t s = 0; s < store.size(); ++s) {
        out << store.id(s) << '\t';
        const auto v = store.vector(s);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ',';
            out << format_float(v[i]);
        }
        out << '\n';
    }
}

double cosine(std::span<const float> a, double norm_a, std::span<const float> b, double norm_b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

double cosine(std::span<const float> a, std::span<const float> b) {
    return cosine(a, norm_of(a), b, norm_of(b));
}

std::vector<std::optional<double>> semantic_distance(const std::vector<DatedPaper>& papers,
                                                     const EmbeddingStore& store, const DistanceOptions& options) {
    for (std::size_t i = 1; i < papers.size(); ++i)
        if (std::tie(papers[i].date, papers[i].id) <= std::tie(papers[i - 1].date, papers[i - 1].id))
            throw DataError("semantic distance input not sorted by (date, id) at " + papers[i].id);

    const std::size_t n = papers.size();
    std::vector<std::optional<std::size_t>> slots(n);
    for (std::size_t i = 0; i < n; ++i) slots[i] = store.slot(papers[i].id);

    // first index of the window for each focal paper
    std::vector<std::size_t> window_begin(n);
    if (options.calendar_years) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto start = Date::from_ymd(papers[i].date.year() - 5, 1, 1);
            window_begin[i] = static_cast<std::size_t>(
                std::partition_point(papers.begin(), papers.begin() + static_cast<std::ptrdiff_t>(i),
                                     [&](const DatedPaper& p) { return p.date < start; }) -
                papers.begin());
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const Date start(papers[i].date.days() - options.window_days);
            window_begin[i] = static_cast<std::size_t>(
                std::partition_point(papers.begin(), papers.begin() + static_cast<std::ptrdiff_t>(i),
                                     [&](const DatedPaper& p) { return p.date < start; }) -
                papers.begin());
        }
    }

    std::vector<std::optional<double>> out(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        if (!slots[i]) return;
        const auto focal = store.vector(*slots[i]);
        const double focal_norm = store.norm(*slots[i]);
        bool any = false;
        double best = -1.0;
        for (std::size_t j = window_begin[i]; j < i; ++j) {
            if (!slots[j]) continue;
            const double c = cosine(focal, focal_norm, store.vector(*slots[j]), store.norm(*slots[j]));
            if (!any || c > best) best = c;
            any = true;
        }
        if (any) out[i] = 1.0 - best;
    });
    return out;
}

}  // namespace scinov::semdist
