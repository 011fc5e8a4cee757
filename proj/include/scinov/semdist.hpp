#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scinov/date.hpp"

namespace scinov::semdist {

struct LoadTally {
    std::size_t loaded = 0;
    std::size_t non_finite = 0;  // NaN or Inf component
    std::size_t zero = 0;
    std::size_t unknown_id = 0;  // not in the corpus
};

/// Immutable id -> vector map with one shared dimension.
class EmbeddingStore {
public:
    explicit EmbeddingStore(std::size_t dimension = 0) : dim_(dimension) {}

    /// Throws DataError on a wrong dimension or a repeated id.
    void add(std::string id, std::span<const float> values);

    [[nodiscard]] std::size_t dimension() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return ids_.size(); }
    [[nodiscard]] bool contains(std::string_view id) const;
    [[nodiscard]] std::optional<std::span<const float>> find(std::string_view id) const;
    /// Euclidean norm of the stored vector, in double precision.
    [[nodiscard]] double norm(std::size_t slot) const { return norms_[slot]; }
    [[nodiscard]] std::optional<std::size_t> slot(std::string_view id) const;
    [[nodiscard]] const std::string& id(std::size_t slot) const { return ids_[slot]; }
    [[nodiscard]] std::span<const float> vector(std::size_t slot) const {
        return {data_.data() + slot * dim_, dim_};
    }

private:
    std::size_t dim_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> data_;
    std::vector<double> norms_;
};

/// Loads `*.tsv` (header `dim<TAB>d`, rows `id<TAB>v1,...,vd`) or `*.f32`
/// (little-endian float32 rows, ids in the `.ids` sidecar whose first line
/// is the `dim<TAB>d` header). Non-finite and zero vectors are skipped, as
/// are ids outside `corpus_ids` when given; all are tallied.
EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               const std::unordered_set<std::string>* corpus_ids = nullptr,
                               LoadTally* tally = nullptr);

/// Writes the TSV form with shortest round-trip floats.
void save_embeddings_tsv(const EmbeddingStore& store, const std::filesystem::path& path);

/// dot / (|a| |b|) accumulated in double in index order, clamped to [-1, 1].
double cosine(std::span<const float> a, double norm_a, std::span<const float> b, double norm_b);
double cosine(std::span<const float> a, std::span<const float> b);

struct DatedPaper {
    std::string id;
    Date date;
};

struct DistanceOptions {
    /// Candidates dated at least this many days before the focal paper are
    /// still in the window.
    int window_days = 1826;
    /// Window = the five previous calendar years plus earlier papers of the
    /// focal year.
    bool calendar_years = false;
    unsigned threads = 1;
};

/// 1 - max cosine against every earlier paper in the window, per paper of
/// `papers` (which must be sorted by date, then id). Absent when the focal
/// paper has no vector or no candidate has one.
std::vector<std::optional<double>> semantic_distance(const std::vector<DatedPaper>& papers,
                                                     const EmbeddingStore& store,
                                                     const DistanceOptions& options = {});

}  // namespace scinov::semdist
