#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace scinov::stats {

// --- descriptive ------------------------------------------------------------

/// Linear interpolation between order statistics of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

struct Description {
    std::size_t n = 0;
    double mean = 0, std = 0, min = 0, p25 = 0, p50 = 0, p75 = 0, p95 = 0, p99 = 0, max = 0;
    std::optional<double> skew;  // adjusted Fisher-Pearson G1; needs n >= 3 and std > 0
};

/// Sample standard deviation (n - 1). Throws DataError when empty.
Description describe(std::span<const double> values);

struct VarianceShares {
    std::optional<double> between_g1;
    std::optional<double> g1_by_g2;
    std::optional<double> residual;
};

/// Sums-of-squares shares of g1, of the g1 x g2 cells beyond g1, and the rest.
VarianceShares variance_decomposition(std::span<const double> values, const std::vector<std::string>& g1,
                                      const std::vector<std::string>& g2);

std::vector<double> transform_log1p(std::span<const double> values);

// --- matching ---------------------------------------------------------------

struct MatchKey {
    std::string venue;
    int year = 0;
    std::optional<int> subfield;
    std::optional<int> field;
};

struct MatchUnit {
    std::string id;
    MatchKey key;
};

enum class MatchLevel { Subfield, Field };
std::string_view level_name(MatchLevel level);

struct MatchPair {
    std::string case_id;
    std::string control_id;
    MatchLevel level = MatchLevel::Subfield;
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<std::string> unmatched;
};

/// Cases are processed in id order. Each draws one unused pool unit with the
/// same venue, year and subfield, else the same venue, year and field. Pool
/// units whose id is a case id are ignored.
MatchResult match_case_control(std::vector<MatchUnit> cases, const std::vector<MatchUnit>& pool,
                               std::uint64_t seed);

// --- rank test --------------------------------------------------------------

struct MannWhitney {
    double u_x = 0;  // pairs (x, y) with x > y, ties counting one half
    double u_y = 0;
    double z = 0;    // (u_x - nm/2) / sigma, no continuity correction; 0 when sigma = 0
    std::optional<double> p_two_sided;  // normal approximation with continuity correction
};

/// Midranks for ties and a tie-corrected variance. Throws DataError when a
/// sample is empty.
MannWhitney mann_whitney(std::span<const double> x, std::span<const double> y);

/// Midranks (1-based) of the values in input order.
std::vector<double> midranks(std::span<const double> values);

/// Standard normal upper tail.
double normal_sf(double z);

// --- GLM --------------------------------------------------------------------

enum class Family { Logit, FractionalLogit, Poisson, Identity };
std::string_view family_name(Family f);
Family parse_family(std::string_view name);

struct DesignMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::optional<Eigen::VectorXd> weights;
};

/// Covariates plus one dummy per non-reference level of each fixed effect
/// (levels sorted, the first is the reference), with an optional intercept.
DesignMatrix build_design(const std::vector<std::pair<std::string, std::vector<double>>>& covariates,
                          const std::vector<std::pair<std::string, std::vector<std::string>>>& fixed_effects,
                          std::vector<double> outcome, bool intercept = true);

struct GlmOptions {
    /// Convergence: max |score| / n below tol.
    double tol = 1e-10;
    int max_iter = 100;
    /// A logit-family coefficient beyond this magnitude flags separation.
    double separation_threshold = 20.0;
};

struct GlmFit {
    Family family = Family::Identity;
    std::vector<std::string> names;  // kept columns
    std::vector<std::string> dropped;
    Eigen::VectorXd coef;
    Eigen::VectorXd se_classical;
    Eigen::VectorXd se_robust;
    Eigen::MatrixXd vcov_robust;
    double loglik = 0;
    double loglik_null = 0;
    double pseudo_r2 = 0;  // McFadden; R squared for the identity family
    bool converged = false;
    bool separation = false;
    int iterations = 0;
    std::size_t n = 0;
    std::size_t absorbed_levels = 0;

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;
};

/// Inverse link: logistic for the logit families, exp for Poisson.
double mean_function(Family f, double eta);

/// Objective maximized by IRLS: Bernoulli quasi log-likelihood for the logit
/// families, Poisson log-likelihood, and -(1/2) sum w r^2 for identity.
double log_likelihood(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                      const std::optional<Eigen::VectorXd>& weights = std::nullopt);
/// Gradient of log_likelihood with respect to beta.
Eigen::VectorXd score(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                      const std::optional<Eigen::VectorXd>& weights = std::nullopt);

/// IRLS with greedy dropping of collinear columns. Throws DataError when the
/// outcome is outside the family's support.
GlmFit fit_glm(const DesignMatrix& design, Family family, const GlmOptions& options = {});

/// Identity family with the fixed effects swept out by alternating
/// projections instead of dummies. `design` must not carry an intercept.
GlmFit fit_identity_absorbed(const DesignMatrix& design,
                             const std::vector<std::vector<std::string>>& fixed_effects,
                             const GlmOptions& options = {});

/// Fitted means for the kept columns of `design`.
Eigen::VectorXd predict(const GlmFit& fit, const DesignMatrix& design);

/// Mean over rows of mu(x b + b_var delta) - mu(x b). Multiply by 100 for
/// percentage points.
double average_marginal_effect(const GlmFit& fit, const DesignMatrix& design, std::string_view var, double delta);

struct Prediction {
    double value = 0;
    double lower = 0;
    double upper = 0;
};

/// Average prediction with the listed columns forced to the given values,
/// with a delta-method interval from the robust covariance.
Prediction average_prediction(const GlmFit& fit, const DesignMatrix& design,
                              const std::vector<std::pair<std::string, double>>& settings, double confidence);

/// Two-sided normal quantile for a confidence level, e.g. 1.96 for 0.95.
double normal_quantile_two_sided(double confidence);

// --- classification ---------------------------------------------------------

struct Classification {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> auc;
};

/// Predicted positive when score >= threshold. AUC is the tie-adjusted
/// share of concordant positive/negative pairs.
Classification classification_metrics(std::span<const double> scores, std::span<const int> labels,
                                       double threshold = 0.5);

// --- percentile indicators --------------------------------------------------

/// 0 = p0-p90 reference, 1..5 = (p90,p92] ... (p98,p100]. When several
/// buckets collapse onto the same value the lower-middle one is used.
std::vector<int> percentile_buckets(std::span<const double> values, const std::vector<std::string>& groups,
                                    bool invert = false);

/// 1 when the value is strictly above the group's pct percentile.
std::vector<int> top_cited_indicator(std::span<const double> citations, const std::vector<std::string>& groups,
                                     double pct);

// --- reuse linkage ----------------------------------------------------------

struct PaperFacts {
    std::string id;
    int year = 0;
    std::string venue;
    std::optional<int> subfield;
    std::optional<int> field;
    std::vector<double> controls;  // has_abstract, word_count, phrase_count, n_refs, n_ref_journals
};

struct ReusedTerm {
    std::string kind;
    std::string term;
    std::uint32_t pioneer = 0;
    std::vector<std::uint32_t> reusers;    // papers after the pioneer containing the term
    std::vector<std::uint32_t> containing; // every paper containing the term
};

struct GapPrediction {
    int gap = 0;
    Prediction prediction;
};

struct ReuseAnalysis {
    std::size_t terms = 0;
    std::size_t terms_excluded = 0;  // no reuser could be matched
    std::size_t reusers = 0;
    std::size_t controls = 0;
    double rate_reusing = 0;
    double rate_control = 0;
    std::optional<double> ratio;
    std::optional<GlmFit> gap_fit;
    std::vector<GapPrediction> gap_predictions;
};

/// Matches every reuser to a paper of the same venue and year (subfield,
/// else field) that does not contain the term, compares the rates of citing
/// the pioneer and fits a linear probability model on year-gap indicators.
ReuseAnalysis reuse_citation_analysis(const std::vector<ReusedTerm>& terms, const std::vector<PaperFacts>& papers,
                                      const std::function<bool(std::uint32_t, std::uint32_t)>& cites,
                                      std::uint64_t seed, double confidence = 0.95);

}  // namespace scinov::stats
