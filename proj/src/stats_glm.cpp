#include "scinov/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <unordered_set>

#include "scinov/error.hpp"

namespace scinov::stats {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Logit: return "logit";
        case Family::FractionalLogit: return "fractional_logit";
        case Family::Poisson: return "poisson";
        case Family::Identity: return "identity";
    }
    return "identity";
}

Family parse_family(std::string_view name) {
    for (auto f : {Family::Logit, Family::FractionalLogit, Family::Poisson, Family::Identity})
        if (family_name(f) == name) return f;
    throw UsageError("unknown family '" + std::string(name) + "'");
}

std::optional<std::size_t> GlmFit::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    return std::nullopt;
}

DesignMatrix build_design(const std::vector<std::pair<std::string, std::vector<double>>>& covariates,
                          const std::vector<std::pair<std::string, std::vector<std::string>>>& fixed_effects,
                          std::vector<double> outcome, bool intercept) {
    const std::size_t n = outcome.size();
    DesignMatrix d;
    std::vector<std::vector<double>> cols;
    if (intercept) {
        d.names.emplace_back("intercept");
        cols.emplace_back(n, 1.0);
    }
    for (const auto& [name, values] : covariates) {
        if (values.size() != n) throw DataError("covariate '" + name + "' has the wrong length");
        d.names.push_back(name);
        cols.push_back(values);
    }
    for (const auto& [name, labels] : fixed_effects) {
        if (labels.size() != n) throw DataError("fixed effect '" + name + "' has the wrong length");
        const std::set<std::string> levels(labels.begin(), labels.end());
        for (auto it = std::next(levels.begin(), levels.empty() ? 0 : 1); it != levels.end(); ++it) {
            d.names.push_back("fe:" + name + "=" + *it);
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = labels[i] == *it ? 1.0 : 0.0;
            cols.push_back(std::move(col));
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : d.names)
        if (!seen.insert(name).second) throw DataError("duplicate design column '" + name + "'");

    d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(outcome[i])) throw DataError("non-finite outcome in row " + std::to_string(i));
        d.y(static_cast<Eigen::Index>(i)) = outcome[i];
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (!std::isfinite(cols[j][i]))
                throw DataError("non-finite value in column '" + d.names[j] + "' row " + std::to_string(i));
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
        }
    }
    return d;
}

namespace {

bool is_logit(Family f) { return f == Family::Logit || f == Family::FractionalLogit; }

double softplus(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

/// d mu / d eta, which is also the IRLS working weight for these canonical links.
double mean_derivative(Family f, double eta) {
    switch (f) {
        case Family::Logit:
        case Family::FractionalLogit: {
            const double mu = mean_function(f, eta);
            return mu * (1 - mu);
        }
        case Family::Poisson: return std::exp(eta);
        case Family::Identity: return 1.0;
    }
    return 1.0;
}

double row_loglik(Family f, double y, double eta) {
    switch (f) {
        case Family::Logit:
        case Family::FractionalLogit: return y * eta - softplus(eta);
        case Family::Poisson: return y * eta - std::exp(eta) - std::lgamma(y + 1);
        case Family::Identity: return -0.5 * (y - eta) * (y - eta);
    }
    return 0;
}

double weight_at(const std::optional<VectorXd>& w, Eigen::Index i) { return w ? (*w)(i) : 1.0; }

void check_support(Family f, const VectorXd& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double v = y(i);
        const bool ok = f == Family::Logit             ? (v == 0 || v == 1)
                        : f == Family::FractionalLogit ? (v >= 0 && v <= 1)
                        : f == Family::Poisson         ? v >= 0
                                                       : std::isfinite(v);
        if (!ok)
            throw DataError("outcome value " + std::to_string(v) + " outside the support of the " +
                            std::string(family_name(f)) + " family");
    }
}

/// Greedy left-to-right: a column whose residual after projecting out the
/// kept columns is negligible relative to its own norm is dropped.
std::vector<Eigen::Index> independent_columns(const MatrixXd& x) {
    std::vector<Eigen::Index> kept;
    std::vector<VectorXd> basis;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        VectorXd r = x.col(j);
        const double norm0 = r.norm();
        if (norm0 == 0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) r -= q.dot(r) * q;
        const double norm = r.norm();
        if (norm <= 1e-9 * norm0) continue;
        basis.push_back(r / norm);
        kept.push_back(j);
    }
    return kept;
}

MatrixXd select_columns(const MatrixXd& x, const std::vector<Eigen::Index>& cols) {
    MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
    return out;
}

double weighted_mean(const VectorXd& y, const std::optional<VectorXd>& w) {
    double num = 0, den = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        num += weight_at(w, i) * y(i);
        den += weight_at(w, i);
    }
    return den > 0 ? num / den : 0.0;
}

double weight_total(const VectorXd& y, const std::optional<VectorXd>& w) {
    return w ? w->sum() : static_cast<double>(y.size());
}

double gaussian_profile_loglik(double rss, double wsum) {
    return -0.5 * wsum * (std::log(2 * std::numbers::pi * rss / wsum) + 1);
}

double null_loglik(Family f, const VectorXd& y, const std::optional<VectorXd>& w) {
    const double m = weighted_mean(y, w);
    if (f == Family::Identity) {
        double tss = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) tss += weight_at(w, i) * (y(i) - m) * (y(i) - m);
        return gaussian_profile_loglik(tss, weight_total(y, w));
    }
    if (is_logit(f) && (m <= 0 || m >= 1)) return 0.0;
    if (f == Family::Poisson && m <= 0) return 0.0;
    const double eta = is_logit(f) ? std::log(m / (1 - m)) : std::log(m);
    double ll = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += weight_at(w, i) * row_loglik(f, y(i), eta);
    return ll;
}

/// Newton/IRLS on the kept columns. `extra_dof` counts parameters swept out
/// before the fit (absorbed fixed effects).
GlmFit fit_core(const MatrixXd& x_all, const std::vector<std::string>& names_all, const VectorXd& y,
                const std::optional<VectorXd>& weights, Family family, const GlmOptions& opt,
                std::size_t extra_dof) {
    check_support(family, y);
    if (weights) {
        if (weights->size() != y.size()) throw DataError("weights and outcome differ in length");
        for (Eigen::Index i = 0; i < weights->size(); ++i)
            if (!((*weights)(i) >= 0)) throw DataError("negative observation weight");
    }
    GlmFit fit;
    fit.family = family;
    fit.n = static_cast<std::size_t>(y.size());
    const auto kept = independent_columns(x_all);
    {
        std::size_t next = 0;
        for (Eigen::Index j = 0; j < x_all.cols(); ++j) {
            if (next < kept.size() && kept[next] == j) {
                fit.names.push_back(names_all[static_cast<std::size_t>(j)]);
                ++next;
            } else {
                fit.dropped.push_back(names_all[static_cast<std::size_t>(j)]);
            }
        }
    }
    const MatrixXd x = select_columns(x_all, kept);
    const Eigen::Index k = x.cols();
    const double n = static_cast<double>(fit.n);

    VectorXd beta = VectorXd::Zero(k);
    // start the intercept at the link of the mean
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(x.col(j).array() == 1.0).all()) continue;
        const double m = weighted_mean(y, weights);
        if (family == Family::Identity) beta(j) = m;
        else if (family == Family::Poisson && m > 0) beta(j) = std::log(m);
        else if (is_logit(family) && m > 0 && m < 1) beta(j) = std::log(m / (1 - m));
        break;
    }

    double ll = log_likelihood(family, x, y, beta, weights);
    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        const VectorXd g = score(family, x, y, beta, weights);
        if (k == 0 || g.cwiseAbs().maxCoeff() / std::max(n, 1.0) <= opt.tol) {
            fit.converged = true;
            fit.iterations = iter;
            break;
        }
        fit.iterations = iter;
        if (iter == opt.max_iter) break;
        const VectorXd eta = x * beta;
        MatrixXd info = MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double v = weight_at(weights, i) * mean_derivative(family, eta(i));
            info.selfadjointView<Eigen::Lower>().rankUpdate(x.row(i).transpose(), v);
        }
        info = info.selfadjointView<Eigen::Lower>();
        const VectorXd step = info.ldlt().solve(g);
        double t = 1.0;
        bool improved = false;
        for (int h = 0; h < 60; ++h, t *= 0.5) {
            const VectorXd cand = beta + t * step;
            const double ll_cand = log_likelihood(family, x, y, cand, weights);
            if (std::isfinite(ll_cand) && ll_cand >= ll - 1e-12 * std::fabs(ll)) {
                beta = cand;
                ll = ll_cand;
                improved = true;
                break;
            }
        }
        if (!improved) {
            fit.iterations = iter + 1;
            fit.converged = score(family, x, y, beta, weights).cwiseAbs().maxCoeff() / std::max(n, 1.0) <= opt.tol;
            break;
        }
    }
    fit.coef = beta;

    const VectorXd eta = x * beta;
    MatrixXd info = MatrixXd::Zero(k, k);
    MatrixXd meat = MatrixXd::Zero(k, k);
    double rss = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double w = weight_at(weights, i);
        const double r = y(i) - mean_function(family, eta(i));
        info.selfadjointView<Eigen::Lower>().rankUpdate(x.row(i).transpose(), w * mean_derivative(family, eta(i)));
        meat.selfadjointView<Eigen::Lower>().rankUpdate(x.row(i).transpose(), (w * r) * (w * r));
        rss += w * r * r;
    }
    info = info.selfadjointView<Eigen::Lower>();
    meat = meat.selfadjointView<Eigen::Lower>();
    const MatrixXd bread = k > 0 ? MatrixXd(info.ldlt().solve(MatrixXd::Identity(k, k))) : MatrixXd(0, 0);
    const double params = static_cast<double>(k) + static_cast<double>(extra_dof);
    const double resid_dof = n - params;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    MatrixXd vcov_classical = bread;
    if (family == Family::Identity) vcov_classical *= resid_dof > 0 ? rss / resid_dof : nan;
    fit.vcov_robust = bread * meat * bread;
    fit.vcov_robust *= resid_dof > 0 ? n / resid_dof : nan;
    fit.se_classical = vcov_classical.diagonal().cwiseSqrt();
    fit.se_robust = fit.vcov_robust.diagonal().cwiseSqrt();

    const double wsum = weight_total(y, weights);
    fit.loglik = family == Family::Identity ? gaussian_profile_loglik(rss, wsum)
                                            : log_likelihood(family, x, y, beta, weights);
    fit.loglik_null = null_loglik(family, y, weights);
    if (family == Family::Identity) {
        const double m = weighted_mean(y, weights);
        double tss = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) tss += weight_at(weights, i) * (y(i) - m) * (y(i) - m);
        fit.pseudo_r2 = tss > 0 ? 1 - rss / tss : 0.0;
    } else {
        fit.pseudo_r2 = fit.loglik_null != 0 ? 1 - fit.loglik / fit.loglik_null : 0.0;
    }
    if (is_logit(family))
        for (Eigen::Index j = 0; j < k; ++j)
            if (std::fabs(beta(j)) > opt.separation_threshold) fit.separation = true;
    return fit;
}

std::vector<Eigen::Index> column_map(const GlmFit& fit, const DesignMatrix& design) {
    std::vector<Eigen::Index> cols;
    for (const auto& name : fit.names) {
        auto it = std::find(design.names.begin(), design.names.end(), name);
        if (it == design.names.end()) throw UsageError("design lacks fitted column '" + name + "'");
        cols.push_back(it - design.names.begin());
    }
    return cols;
}

}  // namespace

double mean_function(Family f, double eta) {
    switch (f) {
        case Family::Logit:
        case Family::FractionalLogit:
            return eta >= 0 ? 1 / (1 + std::exp(-eta)) : std::exp(eta) / (1 + std::exp(eta));
        case Family::Poisson: return std::exp(eta);
        case Family::Identity: return eta;
    }
    return eta;
}

double log_likelihood(Family f, const MatrixXd& x, const VectorXd& y, const VectorXd& beta,
                      const std::optional<VectorXd>& weights) {
    const VectorXd eta = x * beta;
    double ll = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += weight_at(weights, i) * row_loglik(f, y(i), eta(i));
    return ll;
}

VectorXd score(Family f, const MatrixXd& x, const VectorXd& y, const VectorXd& beta,
               const std::optional<VectorXd>& weights) {
    const VectorXd eta = x * beta;
    VectorXd r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) r(i) = weight_at(weights, i) * (y(i) - mean_function(f, eta(i)));
    return x.transpose() * r;
}

GlmFit fit_glm(const DesignMatrix& design, Family family, const GlmOptions& options) {
    if (design.x.rows() != design.y.size()) throw DataError("design rows and outcome length differ");
    return fit_core(design.x, design.names, design.y, design.weights, family, options, 0);
}

GlmFit fit_identity_absorbed(const DesignMatrix& design, const std::vector<std::vector<std::string>>& fixed_effects,
                             const GlmOptions& options) {
    const Eigen::Index n = design.y.size();
    if (design.x.rows() != n) throw DataError("design rows and outcome length differ");
    if (std::find(design.names.begin(), design.names.end(), "intercept") != design.names.end())
        throw UsageError("absorbed fits take no intercept column");

    // group index per fixed effect, levels in sorted order
    std::vector<std::vector<std::size_t>> group(fixed_effects.size());
    std::vector<std::size_t> levels(fixed_effects.size());
    for (std::size_t f = 0; f < fixed_effects.size(); ++f) {
        if (static_cast<Eigen::Index>(fixed_effects[f].size()) != n)
            throw DataError("fixed effect labels and outcome differ in length");
        std::map<std::string, std::size_t> ids;
        for (const auto& label : fixed_effects[f]) ids.emplace(label, 0);
        std::size_t next = 0;
        for (auto& [label, id] : ids) id = next++;
        levels[f] = ids.size();
        for (const auto& label : fixed_effects[f]) group[f].push_back(ids[label]);
    }

    MatrixXd z(n, design.x.cols() + 1);
    z.leftCols(design.x.cols()) = design.x;
    z.col(design.x.cols()) = design.y;
    const auto& w = design.weights;
    if (!fixed_effects.empty()) {
        const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
        for (int sweep = 0; sweep < 100000; ++sweep) {
            double change = 0;
            for (std::size_t f = 0; f < group.size(); ++f) {
                MatrixXd sums = MatrixXd::Zero(static_cast<Eigen::Index>(levels[f]), z.cols());
                VectorXd wsum = VectorXd::Zero(static_cast<Eigen::Index>(levels[f]));
                for (Eigen::Index i = 0; i < n; ++i) {
                    const auto g = static_cast<Eigen::Index>(group[f][static_cast<std::size_t>(i)]);
                    sums.row(g) += weight_at(w, i) * z.row(i);
                    wsum(g) += weight_at(w, i);
                }
                for (Eigen::Index g = 0; g < sums.rows(); ++g)
                    if (wsum(g) > 0) sums.row(g) /= wsum(g);
                change = std::max(change, sums.cwiseAbs().maxCoeff());
                for (Eigen::Index i = 0; i < n; ++i)
                    z.row(i) -= sums.row(static_cast<Eigen::Index>(group[f][static_cast<std::size_t>(i)]));
            }
            if (change <= 1e-14 * scale || group.size() == 1) break;
        }
    }
    std::size_t absorbed = 0;
    for (auto l : levels) absorbed += l;
    if (!levels.empty()) absorbed -= levels.size() - 1;

    const VectorXd y_within = z.col(design.x.cols());
    GlmFit fit = fit_core(z.leftCols(design.x.cols()), design.names, y_within, w, Family::Identity, options, absorbed);
    fit.absorbed_levels = absorbed;

    // the within residuals are the full-model residuals; only the null model changes
    std::vector<Eigen::Index> cols;
    for (const auto& name : fit.names)
        cols.push_back(std::find(design.names.begin(), design.names.end(), name) - design.names.begin());
    const VectorXd resid = y_within - select_columns(z.leftCols(design.x.cols()), cols) * fit.coef;
    double rss = 0;
    for (Eigen::Index i = 0; i < n; ++i) rss += weight_at(w, i) * resid(i) * resid(i);
    const double m = weighted_mean(design.y, w);
    double tss = 0;
    for (Eigen::Index i = 0; i < n; ++i) tss += weight_at(w, i) * (design.y(i) - m) * (design.y(i) - m);
    fit.loglik = gaussian_profile_loglik(rss, weight_total(design.y, w));
    fit.loglik_null = null_loglik(Family::Identity, design.y, w);
    fit.pseudo_r2 = tss > 0 ? 1 - rss / tss : 0.0;
    return fit;
}

VectorXd predict(const GlmFit& fit, const DesignMatrix& design) {
    const MatrixXd x = select_columns(design.x, column_map(fit, design));
    VectorXd eta = x * fit.coef;
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta(i) = mean_function(fit.family, eta(i));
    return eta;
}

double average_marginal_effect(const GlmFit& fit, const DesignMatrix& design, std::string_view var, double delta) {
    if (std::find(design.names.begin(), design.names.end(), var) == design.names.end())
        throw UsageError("unknown column '" + std::string(var) + "'");
    const auto j = fit.index_of(var);
    if (!j) return 0.0;  // dropped as collinear
    const MatrixXd x = select_columns(design.x, column_map(fit, design));
    const VectorXd eta = x * fit.coef;
    const double shift = fit.coef(static_cast<Eigen::Index>(*j)) * delta;
    double sum = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        sum += mean_function(fit.family, eta(i) + shift) - mean_function(fit.family, eta(i));
    return eta.size() > 0 ? sum / static_cast<double>(eta.size()) : 0.0;
}

Prediction average_prediction(const GlmFit& fit, const DesignMatrix& design,
                              const std::vector<std::pair<std::string, double>>& settings, double confidence) {
    MatrixXd x = select_columns(design.x, column_map(fit, design));
    for (const auto& [name, value] : settings) {
        if (std::find(design.names.begin(), design.names.end(), name) == design.names.end())
            throw UsageError("unknown column '" + name + "'");
        if (auto j = fit.index_of(name)) x.col(static_cast<Eigen::Index>(*j)).setConstant(value);
    }
    const Eigen::Index rows = x.rows();
    if (rows == 0) throw DataError("average prediction over an empty design");
    const VectorXd eta = x * fit.coef;
    double mean = 0;
    VectorXd grad = VectorXd::Zero(x.cols());
    for (Eigen::Index i = 0; i < rows; ++i) {
        mean += mean_function(fit.family, eta(i));
        grad += mean_derivative(fit.family, eta(i)) * x.row(i).transpose();
    }
    mean /= static_cast<double>(rows);
    grad /= static_cast<double>(rows);
    const double se = std::sqrt(grad.dot(fit.vcov_robust * grad));
    const double z = normal_quantile_two_sided(confidence);
    return {mean, mean - z * se, mean + z * se};
}

}  // namespace scinov::stats
