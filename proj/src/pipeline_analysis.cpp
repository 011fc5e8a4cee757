#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "pipeline_internal.hpp"
#include "scinov/citemetrics.hpp"
#include "scinov/count_store.hpp"
#include "scinov/error.hpp"
#include "scinov/format.hpp"
#include "scinov/stats.hpp"
#include "scinov/tsv.hpp"

namespace scinov::pipeline::detail {

using nlohmann::json;

namespace {

// Metrics that take the value 0 plus a missing indicator when undefined.
const std::set<std::string> kZeroFilled{"uzzi", "wang", "cd"};
const std::vector<std::string> kCategorical{"year", "venue", "subfield", "field"};

/// Per-paper analysis columns in corpus order.
struct Frame {
    std::vector<std::string> ids;
    std::vector<Date> dates;
    std::map<std::string, std::vector<std::optional<double>>> num;
    std::map<std::string, std::vector<std::string>> cat;

    [[nodiscard]] std::size_t rows() const { return ids.size(); }
    [[nodiscard]] bool has(const std::string& name) const { return num.contains(name); }
    [[nodiscard]] const std::vector<std::optional<double>>& column(const std::string& name) const {
        auto it = num.find(name);
        if (it == num.end()) throw DataError("analysis spec: unknown column '" + name + "'");
        return it->second;
    }
    void require(const std::string& name) const { static_cast<void>(column(name)); }
    void require_group(const std::string& name) const { static_cast<void>(group(name)); }
    [[nodiscard]] const std::vector<std::string>& group(const std::string& name) const {
        auto it = cat.find(name);
        if (it == cat.end()) throw DataError("analysis spec: unknown grouping column '" + name + "'");
        return it->second;
    }
};

std::optional<double> parse_cell(const std::string& cell, const std::string& where) {
    if (cell.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": not a number: '" + cell + "'");
    }
}

std::vector<std::string> read_id_list(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        ids.emplace_back(split(t, '\t').front());
    }
    return ids;
}

Frame build_frame(const PipelineConfig& c, const std::vector<corpus::PaperRecord>& records) {
    Frame f;
    for (const auto& r : records) {
        f.ids.push_back(r.paper_id);
        f.dates.push_back(r.pub_date);
        f.cat["year"].push_back(std::to_string(r.pub_date.year()));
        f.cat["venue"].push_back(r.venue_id);
        f.cat["subfield"].push_back(r.subfield_id ? std::to_string(*r.subfield_id) : "none");
        f.cat["field"].push_back(r.field_id ? std::to_string(*r.field_id) : "none");
        f.num["year"].push_back(r.pub_date.year());
    }
    const std::size_t n = records.size();
    for (const auto& name : kCategorical) f.cat[name].resize(n);

    auto attach = [&](const Table& t, const std::vector<std::string>& skip) {
        if (t.rows.size() != n) throw DataError(t.source + " does not match corpus.jsonl; rerun the pipeline");
        for (std::size_t col = 1; col < t.header.size(); ++col) {
            if (std::find(skip.begin(), skip.end(), t.header[col]) != skip.end()) continue;
            auto& dst = f.num[t.header[col]];
            dst.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (t.rows[i][0] != f.ids[i]) throw DataError(t.source + " is out of step with corpus.jsonl");
                dst[i] = parse_cell(t.rows[i][col], t.source + ":" + std::to_string(i + 2));
            }
        }
    };
    attach(read_tsv(c.output / "metrics.tsv"), {});
    attach(read_tsv(c.output / "citemetrics.tsv"), {"n_refs", "n_ref_journals", "uzzi", "wang", "cd"});

    {
        std::ifstream in(c.output / "termsets.tsv", std::ios::binary);
        std::string line;
        std::getline(in, line);
        auto& dst = f.num["novelty_language"];
        dst.resize(n);
        std::size_t i = 0;
        while (std::getline(in, line)) {
            if (i >= n) throw DataError("termsets.tsv does not match corpus.jsonl; rerun the pipeline");
            const auto fields = split(line, '\t');
            if (fields.size() < 3 || fields[0] != f.ids[i]) throw DataError("termsets.tsv is out of step with corpus.jsonl");
            dst[i++] = fields[2] == "1" ? 1.0 : 0.0;
        }
        if (i != n) throw DataError("termsets.tsv does not match corpus.jsonl; rerun the pipeline");
    }

    // most-cited indicators within subfield-year groups
    std::vector<std::string> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = f.cat["subfield"][i] + "/" + f.cat["year"][i];
    std::vector<double> cites(n);
    for (std::size_t i = 0; i < n; ++i) cites[i] = f.num["citations"][i].value_or(0);
    for (int pct : {95, 99}) {
        const auto top = stats::top_cited_indicator(cites, cells, pct);
        auto& dst = f.num["top_cited_" + std::to_string(pct)];
        for (int v : top) dst.emplace_back(v);
    }

    std::unordered_map<std::string, std::size_t> ordinal;
    for (std::size_t i = 0; i < n; ++i) ordinal.emplace(f.ids[i], i);
    if (c.cases) {
        auto& dst = f.num["case"];
        dst.assign(n, 0.0);
        for (const auto& id : read_id_list(*c.cases))
            if (auto it = ordinal.find(id); it != ordinal.end()) dst[it->second] = 1.0;
    }
    if (c.neighbors) {
        // share of a paper's resolvable neighbors that come after it
        auto& dst = f.num["after_share"];
        dst.assign(n, std::nullopt);
        const auto t = read_tsv(*c.neighbors);
        const auto id_col = t.column("paper_id"), nb_col = t.column("neighbors");
        for (const auto& row : t.rows) {
            auto it = ordinal.find(row[id_col]);
            if (it == ordinal.end()) continue;
            std::size_t resolved = 0, later = 0;
            for (auto nb : split(row[nb_col], ',')) {
                auto jt = ordinal.find(std::string(trim(nb)));
                if (jt == ordinal.end() || jt->second == it->second) continue;
                ++resolved;
                later += jt->second > it->second ? 1 : 0;
            }
            if (resolved > 0) dst[it->second] = static_cast<double>(later) / static_cast<double>(resolved);
        }
    }
    return f;
}

// --- spec helpers -------------------------------------------------------------

std::vector<std::string> str_list(const json& obj, const char* key) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    if (!obj.at(key).is_array()) throw DataError(std::string("analysis spec: '") + key + "' must be a list");
    for (const auto& v : obj.at(key)) out.push_back(v.get<std::string>());
    return out;
}

std::string str_field(const json& obj, const char* key, std::string fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback.empty()) throw DataError(std::string("analysis spec: missing '") + key + "'");
        return fallback;
    }
    return obj.at(key).get<std::string>();
}

json load_spec(const PipelineConfig& c) {
    if (!c.analysis) return json::object();
    std::ifstream in(*c.analysis);
    try {
        auto spec = json::parse(in);
        if (!spec.is_object()) throw DataError("analysis spec must be a JSON object");
        return spec;
    } catch (const json::exception& e) {
        throw DataError("analysis spec " + c.analysis->string() + ": " + e.what());
    }
}

struct Options {
    bool zero_fill = true;
};

Options options_of(const json& spec) {
    Options o;
    const auto missing = spec.value("missing", std::string("zero"));
    if (missing != "zero" && missing != "drop") throw DataError("analysis spec: missing must be zero or drop");
    o.zero_fill = missing == "zero";
    return o;
}

/// Value of a column at a row after the missing-value convention and transform.
std::optional<double> value_at(const Frame& f, const std::string& name, std::size_t row, bool log1p,
                               const Options& o) {
    auto v = f.column(name)[row];
    if (!v && o.zero_fill && kZeroFilled.contains(name)) v = 0.0;
    if (v && log1p) {
        if (*v < 0) throw DataError("log1p transform of negative value in column '" + name + "'");
        v = std::log1p(*v);
    }
    return v;
}

struct ModelSpec {
    std::string name;
    std::string sample = "all";
    stats::Family family = stats::Family::Logit;
    std::string outcome;
    std::vector<std::string> covariates;
    std::set<std::string> log1p;
    std::vector<std::string> fixed_effects;
    bool absorb = false;
    std::vector<std::string> ame;
};

ModelSpec parse_model(const json& m) {
    ModelSpec s;
    s.name = str_field(m, "name");
    s.sample = m.value("sample", std::string("all"));
    if (s.sample != "all" && s.sample != "matched") throw DataError("model " + s.name + ": sample must be all or matched");
    try {
        s.family = stats::parse_family(str_field(m, "family"));
    } catch (const UsageError& e) {
        throw DataError("model " + s.name + ": " + e.what());
    }
    s.outcome = str_field(m, "outcome");
    s.covariates = str_list(m, "covariates");
    for (const auto& v : str_list(m, "log1p")) s.log1p.insert(v);
    s.fixed_effects = str_list(m, "fixed_effects");
    s.absorb = m.value("absorb", false);
    s.ame = str_list(m, "ame");
    if (s.absorb && s.family != stats::Family::Identity)
        throw DataError("model " + s.name + ": absorbed fixed effects need the identity family");
    return s;
}

struct Assembled {
    stats::DesignMatrix design;
    std::vector<std::size_t> rows;  // frame rows kept
    std::vector<std::vector<std::string>> fe_labels;
};

/// Listwise assembly over `candidates`; extra columns are appended after the covariates.
Assembled assemble(const Frame& f, const std::vector<std::size_t>& candidates, const ModelSpec& m, const Options& o,
                   const std::vector<std::pair<std::string, std::vector<double>>>& extra = {}) {
    f.require(m.outcome);
    for (const auto& v : m.covariates) f.require(v);
    for (const auto& g : m.fixed_effects) f.require_group(g);
    for (const auto& v : m.log1p)
        if (v != m.outcome && std::find(m.covariates.begin(), m.covariates.end(), v) == m.covariates.end())
            throw DataError("model " + m.name + ": log1p column '" + v + "' is not in the model");

    Assembled a;
    std::vector<double> y;
    std::vector<std::pair<std::string, std::vector<double>>> cov;
    for (const auto& v : m.covariates) cov.emplace_back(m.log1p.contains(v) ? "log1p(" + v + ")" : v, std::vector<double>{});
    for (const auto& [name, values] : extra) cov.emplace_back(name, std::vector<double>{});
    std::vector<std::pair<std::string, std::vector<std::string>>> fe;
    for (const auto& g : m.fixed_effects) fe.emplace_back(g, std::vector<std::string>{});

    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto i = candidates[k];
        auto out = value_at(f, m.outcome, i, m.log1p.contains(m.outcome), o);
        if (!out) continue;
        std::vector<double> xs;
        bool ok = true;
        for (const auto& v : m.covariates) {
            auto x = value_at(f, v, i, m.log1p.contains(v), o);
            if (!x) {
                ok = false;
                break;
            }
            xs.push_back(*x);
        }
        if (!ok) continue;
        a.rows.push_back(i);
        y.push_back(*out);
        for (std::size_t j = 0; j < xs.size(); ++j) cov[j].second.push_back(xs[j]);
        for (std::size_t j = 0; j < extra.size(); ++j) cov[m.covariates.size() + j].second.push_back(extra[j].second[k]);
        for (std::size_t j = 0; j < fe.size(); ++j) fe[j].second.push_back(f.group(m.fixed_effects[j])[i]);
    }
    if (m.absorb) {
        for (auto& [name, labels] : fe) a.fe_labels.push_back(labels);
        a.design = stats::build_design(cov, {}, y, false);
    } else {
        a.design = stats::build_design(cov, fe, y, true);
    }
    return a;
}

bool binary_outcome(const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0 && y(i) != 1) return false;
    return true;
}

json named(const stats::GlmFit& fit, const Eigen::VectorXd& v) {
    json out = json::object();
    for (std::size_t j = 0; j < fit.names.size(); ++j) out[fit.names[j]] = v(static_cast<Eigen::Index>(j));
    return out;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double sample_sd(const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

json fit_model(const Frame& f, const std::vector<std::size_t>& candidates, const ModelSpec& m, const Options& o) {
    json out{{"name", m.name}, {"family", std::string(stats::family_name(m.family))}, {"sample", m.sample},
             {"outcome", m.outcome}};
    const auto a = assemble(f, candidates, m, o);
    out["n"] = a.rows.size();
    out["rows_dropped_missing"] = candidates.size() - a.rows.size();
    if (a.rows.empty()) {
        out["error"] = "empty estimation sample";
        return out;
    }
    stats::GlmFit fit;
    try {
        fit = m.absorb ? stats::fit_identity_absorbed(a.design, a.fe_labels) : stats::fit_glm(a.design, m.family);
    } catch (const DataError& e) {
        throw DataError("model " + m.name + ": " + e.what());
    }
    out["coefficients"] = named(fit, fit.coef);
    out["se_classical"] = named(fit, fit.se_classical);
    out["se_robust"] = named(fit, fit.se_robust);
    out["dropped"] = fit.dropped;
    out["loglik"] = fit.loglik;
    out["loglik_null"] = fit.loglik_null;
    out["pseudo_r2"] = fit.pseudo_r2;
    out["converged"] = fit.converged;
    out["separation"] = fit.separation;
    out["iterations"] = fit.iterations;
    if (m.absorb) out["absorbed_levels"] = fit.absorbed_levels;

    if ((m.family == stats::Family::Logit || m.family == stats::Family::FractionalLogit) && binary_outcome(a.design.y)) {
        const Eigen::VectorXd p = stats::predict(fit, a.design);
        std::vector<double> scores(p.data(), p.data() + p.size());
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < a.design.y.size(); ++i) labels.push_back(a.design.y(i) == 1 ? 1 : 0);
        const auto cls = stats::classification_metrics(scores, labels);
        out["precision"] = opt_json(cls.precision);
        out["recall"] = opt_json(cls.recall);
        out["auc"] = opt_json(cls.auc);
    }
    json ame = json::object();
    for (const auto& v : m.ame) {
        if (std::find(m.covariates.begin(), m.covariates.end(), v) == m.covariates.end())
            throw DataError("model " + m.name + ": marginal effect of '" + v + "', which is not a covariate");
        const std::string col = m.log1p.contains(v) ? "log1p(" + v + ")" : v;
        const auto idx = std::find(a.design.names.begin(), a.design.names.end(), col) - a.design.names.begin();
        const double sd = sample_sd(a.design.x.col(idx));
        ame[v] = {{"delta", sd}, {"percentage_points", 100 * stats::average_marginal_effect(fit, a.design, col, sd)}};
    }
    out["ame"] = ame;
    return out;
}

// --- stats stage --------------------------------------------------------------

std::vector<std::string> describe_header() {
    return {"n", "mean", "std", "min", "p25", "p50", "p75", "p95", "p99", "max", "skew"};
}

std::vector<std::string> describe_cells(const std::vector<double>& v) {
    if (v.empty()) return std::vector<std::string>(describe_header().size(), "");
    const auto d = stats::describe(v);
    return {std::to_string(d.n), format_double(d.mean), format_double(d.std), format_double(d.min),
            format_double(d.p25), format_double(d.p50), format_double(d.p75), format_double(d.p95),
            format_double(d.p99), format_double(d.max), format_optional(d.skew)};
}

std::vector<double> present_values(const Frame& f, const std::string& col, const std::vector<std::size_t>& rows,
                                   bool log1p, const Options& o) {
    std::vector<double> out;
    for (auto i : rows)
        if (auto v = value_at(f, col, i, log1p, o)) out.push_back(*v);
    return out;
}

std::vector<std::size_t> all_rows(const Frame& f) {
    std::vector<std::size_t> rows(f.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

void write_describe(const Frame& f, const json& spec, const Options& o, const fs::path& dir) {
    if (!spec.contains("describe")) return;
    const auto& d = spec.at("describe");
    const auto cols = str_list(d, "columns");
    const auto logs = str_list(d, "log1p");
    auto header = describe_header();
    header.insert(header.begin(), {"column", "transform"});
    TsvWriter out(dir / "describe.tsv", header);
    for (const auto& col : cols) {
        const bool lg = std::find(logs.begin(), logs.end(), col) != logs.end();
        auto row = describe_cells(present_values(f, col, all_rows(f), lg, o));
        row.insert(row.begin(), {col, lg ? "log1p" : "none"});
        out.row(row);
    }
    out.close();
}

void write_variance(const Frame& f, const json& spec, const Options& o, const fs::path& dir) {
    if (!spec.contains("variance")) return;
    TsvWriter out(dir / "variance.tsv", {"column", "transform", "g1", "g2", "between_g1", "g1_by_g2", "residual"});
    for (const auto& v : spec.at("variance")) {
        const auto col = str_field(v, "column");
        const bool lg = v.value("log1p", false);
        const auto g1n = str_field(v, "g1"), g2n = str_field(v, "g2");
        const auto& g1 = f.group(g1n);
        const auto& g2 = f.group(g2n);
        std::vector<double> vals;
        std::vector<std::string> a, b;
        for (std::size_t i = 0; i < f.rows(); ++i) {
            auto x = value_at(f, col, i, lg, o);
            if (!x) continue;
            vals.push_back(*x);
            a.push_back(g1[i]);
            b.push_back(g2[i]);
        }
        const auto s = stats::variance_decomposition(vals, a, b);
        out.row({col, lg ? "log1p" : "none", g1n, g2n, format_optional(s.between_g1), format_optional(s.g1_by_g2),
                 format_optional(s.residual)});
    }
    out.close();
}

stats::MatchUnit unit_at(const Frame& f, std::size_t i) {
    auto opt_int = [](const std::string& s) -> std::optional<int> {
        if (s == "none") return std::nullopt;
        return std::stoi(s);
    };
    return {f.ids[i],
            {f.cat.at("venue")[i], std::stoi(f.cat.at("year")[i]), opt_int(f.cat.at("subfield")[i]),
             opt_int(f.cat.at("field")[i])}};
}

/// Matched case and control rows, in case-id order.
std::vector<std::size_t> case_control(const PipelineConfig& c, const Frame& f, const json& spec, const Options& o,
                                      const fs::path& dir, json& summary) {
    if (!c.cases) return {};
    const auto listed = read_id_list(*c.cases);
    const auto& is_case = f.column("case");
    std::vector<stats::MatchUnit> cases, pool;
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        row_of.emplace(f.ids[i], i);
        (*is_case[i] == 1.0 ? cases : pool).push_back(unit_at(f, i));
    }
    const auto result = stats::match_case_control(cases, pool, c.matching_seed);
    std::vector<std::size_t> rows;
    std::map<std::string, std::size_t> by_level;
    TsvWriter out(dir / "matching.tsv", {"case_id", "control_id", "level"});
    for (const auto& p : result.pairs) {
        out.row({p.case_id, p.control_id, std::string(stats::level_name(p.level))});
        rows.push_back(row_of.at(p.case_id));
        rows.push_back(row_of.at(p.control_id));
        ++by_level[std::string(stats::level_name(p.level))];
    }
    out.close();
    summary["matching"] = {{"cases_listed", listed.size()},
                           {"cases_in_corpus", cases.size()},
                           {"pairs", result.pairs.size()},
                           {"unmatched", result.unmatched.size()},
                           {"by_level", by_level}};

    if (!spec.contains("case_control")) return rows;
    const auto& cc = spec.at("case_control");
    const auto cols = str_list(cc, "columns");
    const auto logs = str_list(cc, "log1p");
    auto header = describe_header();
    header.insert(header.begin(), {"column", "transform", "group"});
    TsvWriter desc(dir / "case_control.tsv", header);
    TsvWriter mw(dir / "mann_whitney.tsv", {"column", "transform", "u_case", "z", "p_two_sided"});
    std::vector<std::size_t> case_rows, control_rows;
    for (std::size_t k = 0; k < rows.size(); ++k) (k % 2 == 0 ? case_rows : control_rows).push_back(rows[k]);
    for (const auto& col : cols) {
        const bool lg = std::find(logs.begin(), logs.end(), col) != logs.end();
        const auto x = present_values(f, col, case_rows, lg, o);
        const auto y = present_values(f, col, control_rows, lg, o);
        for (const auto& [group, vals] : {std::pair{"case", &x}, std::pair{"control", &y}}) {
            auto row = describe_cells(*vals);
            row.insert(row.begin(), {col, lg ? "log1p" : "none", group});
            desc.row(row);
        }
        if (x.empty() || y.empty()) {
            mw.row({col, lg ? "log1p" : "none", "", "", ""});
            continue;
        }
        const auto t = stats::mann_whitney(x, y);
        mw.row({col, lg ? "log1p" : "none", format_double(t.u_x), format_double(t.z), format_optional(t.p_two_sided)});
    }
    desc.close();
    mw.close();
    return rows;
}

void write_models(const Frame& f, const json& spec, const Options& o, const std::vector<std::size_t>& matched,
                  bool have_cases, const fs::path& dir) {
    if (!spec.contains("models")) return;
    std::set<std::string> names;
    for (const auto& mj : spec.at("models")) {
        const auto m = parse_model(mj);
        if (!names.insert(m.name).second) throw DataError("analysis spec: duplicate model name '" + m.name + "'");
        if (m.sample == "matched" && !have_cases)
            throw DataError("model " + m.name + " uses the matched sample but no cases file is configured");
        const auto rows = m.sample == "matched" ? matched : all_rows(f);
        write_text_file(dir / ("model_" + m.name + ".json"), fit_model(f, rows, m, o).dump(2) + "\n");
    }
}

void write_reuse(const PipelineConfig& c, const Frame& f, const json& spec, const fs::path& dir) {
    if (!spec.contains("reuse")) return;
    const auto& r = spec.at("reuse");
    auto kinds = str_list(r, "kinds");
    if (kinds.empty()) kinds = {"word", "phrase", "word_pair", "phrase_pair"};
    const auto min_reuse = r.value("min_reuse", 10U);
    const auto max_terms = r.value("max_terms", std::size_t{10000});

    const auto records = read_jsonl(c.output / "corpus.jsonl");
    const auto graph = cite::build_graph(records);
    auto cites = [&](std::uint32_t a, std::uint32_t b) {
        return std::binary_search(graph.cites[a].begin(), graph.cites[a].end(), b);
    };
    std::vector<stats::PaperFacts> facts;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        const auto u = unit_at(f, i);
        stats::PaperFacts p{f.ids[i], u.key.year, u.key.venue, u.key.subfield, u.key.field, {}};
        for (const char* col : {"has_abstract", "word_count", "phrase_count", "n_refs", "n_ref_journals"})
            p.controls.push_back(f.column(col)[i].value_or(0));
        facts.push_back(std::move(p));
    }
    const auto term_stats = read_tsv(c.output / "term_stats.tsv");
    const auto k_col = term_stats.column("kind"), t_col = term_stats.column("term"),
               p_col = term_stats.column("pioneer_id"), r_col = term_stats.column("reuse");
    std::unordered_map<std::string, std::uint32_t> ordinal;
    for (std::uint32_t i = 0; i < f.rows(); ++i) ordinal.emplace(f.ids[i], i);

    TsvWriter out(dir / "reuse.tsv", {"kind", "candidates", "sampled", "terms", "terms_excluded", "reusers", "controls",
                                      "rate_reusing", "rate_control", "ratio"});
    TsvWriter gaps(dir / "reuse_gap.tsv", {"kind", "gap", "value", "lower", "upper"});
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
        const auto& kind = kinds[ki];
        const auto kind_index = static_cast<std::size_t>(novelty::parse_kind(kind));
        std::vector<std::pair<std::string, std::uint32_t>> candidates;  // term, pioneer ordinal
        for (const auto& row : term_stats.rows)
            if (row[k_col] == kind && std::stoul(row[r_col]) >= min_reuse)
                candidates.emplace_back(row[t_col], ordinal.at(row[p_col]));
        std::sort(candidates.begin(), candidates.end());
        std::mt19937_64 rng(novelty::mix64(c.matching_seed ^ novelty::mix64(kind_index + 1)));
        const auto take = std::min(max_terms, candidates.size());
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
            std::swap(candidates[i], candidates[pick(rng)]);
        }
        candidates.resize(take);
        std::sort(candidates.begin(), candidates.end());

        std::vector<stats::ReusedTerm> terms(candidates.size());
        std::unordered_map<std::string, std::size_t> slot;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            terms[i].kind = kind;
            terms[i].term = candidates[i].first;
            terms[i].pioneer = candidates[i].second;
            slot.emplace(candidates[i].first, i);
        }
        std::ifstream in(c.output / "termsets.tsv", std::ios::binary);
        std::string line;
        std::getline(in, line);
        for (std::uint32_t i = 0; std::getline(in, line); ++i) {
            const auto row = parse_termset_line(line, "termsets.tsv:" + std::to_string(i + 2));
            auto visit = [&](const std::string& term) {
                auto it = slot.find(term);
                if (it == slot.end()) return;
                auto& t = terms[it->second];
                t.containing.push_back(i);
                if (i > t.pioneer) t.reusers.push_back(i);
            };
            switch (kind_index) {
                case 0: for (const auto& w : row.sets.words) visit(w); break;
                case 1: for (const auto& p : row.sets.phrases) visit(p); break;
                case 2: for (const auto& p : row.sets.word_pairs) visit(p.first + "|" + p.second); break;
                default: for (const auto& p : row.sets.phrase_pairs) visit(p.first + "|" + p.second); break;
            }
        }
        const auto res = stats::reuse_citation_analysis(terms, facts, cites,
                                                        novelty::mix64(c.matching_seed + kind_index));
        out.row({kind, std::to_string(std::count_if(term_stats.rows.begin(), term_stats.rows.end(),
                                                    [&](const auto& row) {
                                                        return row[k_col] == kind && std::stoul(row[r_col]) >= min_reuse;
                                                    })),
                 std::to_string(take), std::to_string(res.terms), std::to_string(res.terms_excluded),
                 std::to_string(res.reusers), std::to_string(res.controls),
                 res.reusers ? format_double(res.rate_reusing) : "", res.reusers ? format_double(res.rate_control) : "",
                 format_optional(res.ratio)});
        for (const auto& g : res.gap_predictions)
            gaps.row({kind, std::to_string(g.gap), format_double(g.prediction.value), format_double(g.prediction.lower),
                      format_double(g.prediction.upper)});
    }
    out.close();
    gaps.close();
}

}  // namespace

void run_stats(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "corpus.jsonl");
    const auto frame = build_frame(c, records);
    const auto spec = load_spec(c);
    const auto opts = options_of(spec);
    const auto dir = c.output / "stats";
    fs::remove_all(dir);
    fs::create_directories(dir);

    json summary{{"papers", frame.rows()}, {"missing", opts.zero_fill ? "zero" : "drop"}};
    write_describe(frame, spec, opts, dir);
    write_variance(frame, spec, opts, dir);
    const auto matched = case_control(c, frame, spec, opts, dir, summary);
    write_models(frame, spec, opts, matched, c.cases.has_value(), dir);
    write_reuse(c, frame, spec, dir);
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

// --- plot data ------------------------------------------------------------------

namespace {

const std::array<std::string, 6> kBucketLabels{"p0-90", "p90-92", "p92-94", "p94-96", "p96-98", "p98-100"};

void bucket_prediction(const Frame& f, const json& p, const Options& o, const fs::path& path) {
    TsvWriter out(path, {"metric", "bucket", "label", "n", "value", "lower", "upper"});
    const auto metrics = str_list(p, "metrics");
    const auto invert = p.contains("invert") ? str_list(p, "invert") : std::vector<std::string>{"uzzi"};
    auto groups = str_list(p, "groups");
    if (groups.empty()) groups = {"subfield", "year"};
    ModelSpec base;
    base.name = str_field(p, "name");
    base.family = stats::parse_family(p.value("family", std::string("logit")));
    base.outcome = str_field(p, "outcome");
    base.covariates = str_list(p, "covariates");
    for (const auto& v : str_list(p, "log1p")) base.log1p.insert(v);
    base.fixed_effects = str_list(p, "fixed_effects");
    for (const auto& m : metrics) f.require(m);
    for (const auto& g : groups) f.require_group(g);
    f.require(base.outcome);
    for (const auto& v : base.covariates) f.require(v);
    const double confidence = p.value("confidence", 0.95);

    for (const auto& metric : metrics) {
        // rows where the metric is defined; bucket edges come from those rows
        std::vector<std::size_t> rows;
        std::vector<double> values;
        std::vector<std::string> cells;
        for (std::size_t i = 0; i < f.rows(); ++i) {
            auto v = value_at(f, metric, i, false, o);
            if (!v) continue;
            rows.push_back(i);
            values.push_back(*v);
            std::string cell;
            for (const auto& g : groups) cell += f.group(g)[i] + "/";
            cells.push_back(cell);
        }
        if (rows.empty()) continue;
        const bool inv = std::find(invert.begin(), invert.end(), metric) != invert.end();
        const auto bucket = stats::percentile_buckets(values, cells, inv);
        std::vector<std::pair<std::string, std::vector<double>>> extra;
        for (int k = 1; k <= 5; ++k) {
            std::vector<double> col;
            for (int b : bucket) col.push_back(b == k ? 1.0 : 0.0);
            extra.emplace_back("bucket=" + std::to_string(k), std::move(col));
        }
        auto a = assemble(f, rows, base, o, extra);
        if (a.rows.empty()) continue;
        const auto fit = stats::fit_glm(a.design, base.family);
        std::array<std::size_t, 6> counts{};
        for (Eigen::Index i = 0; i < a.design.x.rows(); ++i) {
            int b = 0;
            for (int k = 1; k <= 5; ++k)
                if (a.design.x(i, static_cast<Eigen::Index>(a.design.names.size()) - 6 + k) == 1.0) b = k;
            ++counts[static_cast<std::size_t>(b)];
        }
        for (int k = 0; k <= 5; ++k) {
            std::vector<std::pair<std::string, double>> settings;
            for (int j = 1; j <= 5; ++j) settings.emplace_back("bucket=" + std::to_string(j), j == k ? 1.0 : 0.0);
            const auto pred = stats::average_prediction(fit, a.design, settings, confidence);
            out.row({metric, std::to_string(k), kBucketLabels[static_cast<std::size_t>(k)],
                     std::to_string(counts[static_cast<std::size_t>(k)]), format_double(100 * pred.value),
                     format_double(100 * pred.lower), format_double(100 * pred.upper)});
        }
    }
    out.close();
}

void group_mean(const Frame& f, const json& p, const Options& o, const fs::path& path) {
    const auto groups = str_list(p, "groups");
    const auto col = str_field(p, "column");
    const bool lg = p.value("log1p", false);
    f.require(col);
    for (const auto& g : groups) f.require_group(g);
    std::map<std::vector<std::string>, std::pair<std::size_t, double>> acc;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        auto v = value_at(f, col, i, lg, o);
        if (!v) continue;
        std::vector<std::string> key;
        for (const auto& g : groups) key.push_back(f.group(g)[i]);
        auto& [n, sum] = acc[key];
        ++n;
        sum += *v;
    }
    auto header = groups;
    header.push_back("n");
    header.push_back("mean_" + col);
    TsvWriter out(path, header);
    for (const auto& [key, ns] : acc) {
        auto row = key;
        row.push_back(std::to_string(ns.first));
        row.push_back(format_double(ns.second / static_cast<double>(ns.first)));
        out.row(row);
    }
    out.close();
}

}  // namespace

void run_plotdata(const PipelineConfig& c) {
    const auto records = read_jsonl(c.output / "corpus.jsonl");
    const auto frame = build_frame(c, records);
    const auto spec = load_spec(c);
    const auto opts = options_of(spec);
    const auto dir = c.output / "plots";
    fs::remove_all(dir);
    fs::create_directories(dir);
    if (!spec.contains("plots")) return;
    std::set<std::string> names;
    for (const auto& p : spec.at("plots")) {
        const auto name = str_field(p, "name");
        if (!names.insert(name).second) throw DataError("analysis spec: duplicate plot name '" + name + "'");
        const auto type = str_field(p, "type");
        const auto path = dir / (name + ".tsv");
        if (type == "bucket_prediction")
            bucket_prediction(frame, p, opts, path);
        else if (type == "group_mean")
            group_mean(frame, p, opts, path);
        else
            throw DataError("analysis spec: unknown plot type '" + type + "'");
    }
}

}  // namespace scinov::pipeline::detail
