#include "scinov/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <boost/math/distributions/normal.hpp>

#include "scinov/error.hpp"

namespace scinov::stats {

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DataError("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Description describe(std::span<const double> values) {
    if (values.empty()) throw DataError("describe needs at least one value");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    Description d;
    d.n = v.size();
    const double n = static_cast<double>(d.n);
    d.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0, m3 = 0;
    for (double x : v) {
        const double e = x - d.mean;
        m2 += e * e;
        m3 += e * e * e;
    }
    d.std = d.n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0;
    m2 /= n;
    m3 /= n;
    if (d.n >= 3 && m2 > 0) d.skew = m3 / std::pow(m2, 1.5) * std::sqrt(n * (n - 1)) / (n - 2);
    d.min = v.front();
    d.max = v.back();
    d.p25 = quantile_sorted(v, 0.25);
    d.p50 = quantile_sorted(v, 0.50);
    d.p75 = quantile_sorted(v, 0.75);
    d.p95 = quantile_sorted(v, 0.95);
    d.p99 = quantile_sorted(v, 0.99);
    return d;
}

namespace {

double ss_between(std::span<const double> values, const std::vector<std::string>& labels, double grand) {
    std::unordered_map<std::string, std::pair<double, std::size_t>> acc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& [sum, n] = acc[labels[i]];
        sum += values[i];
        ++n;
    }
    // sorted for a platform-independent summation order
    std::map<std::string, std::pair<double, std::size_t>> ordered(acc.begin(), acc.end());
    double ss = 0;
    for (const auto& [label, sn] : ordered) {
        const double mean = sn.first / static_cast<double>(sn.second);
        ss += static_cast<double>(sn.second) * (mean - grand) * (mean - grand);
    }
    return ss;
}

}  // namespace

VarianceShares variance_decomposition(std::span<const double> values, const std::vector<std::string>& g1,
                                      const std::vector<std::string>& g2) {
    if (g1.size() != values.size() || g2.size() != values.size())
        throw DataError("variance decomposition: label and value counts differ");
    VarianceShares out;
    if (values.empty()) return out;
    const double grand = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double total = 0;
    for (double x : values) total += (x - grand) * (x - grand);
    if (total == 0) return out;
    std::vector<std::string> cells(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) cells[i] = g1[i] + '\x1f' + g2[i];
    const double b1 = ss_between(values, g1, grand);
    const double b12 = ss_between(values, cells, grand);
    out.between_g1 = b1 / total;
    out.g1_by_g2 = (b12 - b1) / total;
    out.residual = 1.0 - *out.between_g1 - *out.g1_by_g2;
    return out;
}

std::vector<double> transform_log1p(std::span<const double> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!(v >= 0)) throw DataError("log1p transform of a negative count");
        out.push_back(std::log1p(v));
    }
    return out;
}

// --- rank test --------------------------------------------------------------

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double r = static_cast<double>(i + 1 + j) / 2.0;  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile_two_sided(double confidence) {
    if (!(confidence > 0 && confidence < 1)) throw UsageError("confidence must lie in (0, 1)");
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(boost::math::complement(standard, (1.0 - confidence) / 2.0));
}

MannWhitney mann_whitney(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw DataError("Mann-Whitney needs two non-empty samples");
    std::vector<double> all(x.begin(), x.end());
    all.insert(all.end(), y.begin(), y.end());
    const auto ranks = midranks(all);
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    double rx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) rx += ranks[i];

    MannWhitney r;
    r.u_x = rx - n * (n + 1) / 2;
    r.u_y = n * m - r.u_x;

    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    double ties = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double big_n = n + m;
    const double var = n * m / 12.0 * ((big_n + 1) - ties / (big_n * (big_n - 1)));
    if (!(var > 0)) return r;
    const double sigma = std::sqrt(var);
    const double diff = r.u_x - n * m / 2;
    r.z = diff / sigma;
    const double corrected = std::max(0.0, std::fabs(diff) - 0.5) / sigma;
    r.p_two_sided = std::min(1.0, 2.0 * normal_sf(corrected));
    return r;
}

// --- classification ---------------------------------------------------------

Classification classification_metrics(std::span<const double> scores, std::span<const int> labels,
                                       double threshold) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    Classification c;
    std::size_t tp = 0, fp = 0, fn = 0, pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        const bool actual = labels[i] != 0;
        pos += actual;
        tp += predicted && actual;
        fp += predicted && !actual;
        fn += !predicted && actual;
    }
    if (tp + fp > 0) c.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) c.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const std::size_t neg = scores.size() - pos;
    if (pos == 0 || neg == 0) return c;
    const auto ranks = midranks(scores);
    double rank_sum = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (labels[i] != 0) rank_sum += ranks[i];
    const double p = static_cast<double>(pos);
    c.auc = (rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(neg));
    return c;
}

// --- percentile indicators --------------------------------------------------

namespace {

std::map<std::string, std::vector<std::size_t>> group_rows(const std::vector<std::string>& groups) {
    std::map<std::string, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < groups.size(); ++i) out[groups[i]].push_back(i);
    return out;
}

}  // namespace

std::vector<int> percentile_buckets(std::span<const double> values, const std::vector<std::string>& groups,
                                    bool invert) {
    if (groups.size() != values.size()) throw DataError("percentile buckets: group and value counts differ");
    std::vector<int> out(values.size(), 0);
    for (const auto& [g, rows] : group_rows(groups)) {
        std::vector<double> v;
        v.reserve(rows.size());
        for (auto i : rows) v.push_back(invert ? -values[i] : values[i]);
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        std::array<double, 6> edge{};  // p90, p92, ..., p100
        for (int k = 0; k < 6; ++k) edge[k] = quantile_sorted(sorted, 0.90 + 0.02 * k);
        edge[5] = sorted.back();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double x = v[r];
            if (x <= edge[0]) continue;
            std::vector<int> candidates;
            for (int k = 1; k <= 5; ++k) {
                const double lo = edge[k - 1], hi = edge[k];
                if ((lo < x && x <= hi) || (lo == hi && hi == x)) candidates.push_back(k);
            }
            if (candidates.empty()) candidates.push_back(5);  // guards rounding at the top edge
            out[rows[r]] = candidates[(candidates.size() - 1) / 2];
        }
    }
    return out;
}

std::vector<int> top_cited_indicator(std::span<const double> citations, const std::vector<std::string>& groups,
                                     double pct) {
    if (groups.size() != citations.size()) throw DataError("top-cited indicator: group and value counts differ");
    if (!(pct > 0 && pct < 100)) throw UsageError("top-cited percentile must lie in (0, 100)");
    std::vector<int> out(citations.size(), 0);
    for (const auto& [g, rows] : group_rows(groups)) {
        std::vector<double> sorted;
        for (auto i : rows) sorted.push_back(citations[i]);
        std::sort(sorted.begin(), sorted.end());
        const double cut = quantile_sorted(sorted, pct / 100.0);
        for (auto i : rows) out[i] = citations[i] > cut ? 1 : 0;
    }
    return out;
}

}  // namespace scinov::stats
