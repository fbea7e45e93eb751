#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survey/model.hpp"

namespace survey {

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-question, per-respondent chosen options for the questions the
/// pairwise analyses can use: exclusive, with real options (no checkbox,
/// freetext, or instructional questions). Breakoff records are included;
/// analyses that need completed-only data filter upstream.
class ResponseMatrix {
public:
    struct Cell {
        std::string option_id;
        int display_position = 0;
        double rank = 0.0;  // 1-based authored option index
    };

    ResponseMatrix(const Survey& s, const std::vector<ResponseRecord>& records);

    const std::vector<const Question*>& questions() const { return questions_; }
    const std::vector<std::string>& respondents() const { return respondent_ids_; }
    /// nullptr when this respondent did not answer the question.
    const Cell* answer(std::size_t respondent, const std::string& question_id) const;

private:
    std::vector<const Question*> questions_;
    std::vector<std::string> respondent_ids_;
    std::vector<std::map<std::string, Cell>> cells_;  // per respondent
};

struct AnalysisOptions {
    double alpha = 0.05;
    double strength_threshold = 0.5;  // |rho| or V needed to flag a correlation
    int min_partition = 5;
    int bootstrap_b = 2000;
    std::uint32_t seed = 0;
    /// Literal-formula mode: the order/variant chi-squared treats the first
    /// partition's frequencies as a known expectation with (m-1)^2 degrees
    /// of freedom, and the respondent score is the signed p*log2(p) sum with
    /// a lower-tail threshold. The defaults (two-sample homogeneity test,
    /// df = m-1; surprisal score, upper tail) hold their advertised error
    /// rates; this mode is for comparing against the written recipes.
    bool paper_compat = false;
};

struct CorrelationFinding {
    std::string question_a;
    std::string question_b;
    std::string statistic_name;  // "spearman_rho" or "cramers_v"
    double statistic = 0.0;
    double p_value = 1.0;
    int n = 0;
    bool flagged = false;
    bool expected = false;  // authored as correlated
    bool low_confidence = false;
};

struct OrderBiasFinding {
    std::string question;  // the question whose answers shift
    std::string other;     // the question whose relative order defines the split
    std::string statistic_name;  // "mann_whitney_u" or "chi_squared"
    double statistic = 0.0;
    double p_value = 1.0;
    int n_before = 0;  // question seen before other
    int n_after = 0;
    bool flagged = false;
    bool low_confidence = false;
};

struct VariantBiasFinding {
    std::string block;
    std::string variant_a;
    std::string variant_b;
    std::string statistic_name;
    double statistic = 0.0;
    double p_value = 1.0;
    int n_a = 0;
    int n_b = 0;
    bool flagged = false;
    bool low_confidence = false;
};

struct BreakoffReport {
    std::vector<std::pair<int, int>> by_position;          // (position, count) desc
    std::vector<std::pair<std::string, int>> by_question;  // (question_id, count) desc
};

struct RespondentScore {
    std::string respondent_id;
    double score = 0.0;
    bool flagged = false;
};

struct RandomRespondentReport {
    std::string score_kind;  // "surprisal" or "plogp"
    double threshold = 0.0;
    int n_completed = 0;
    std::vector<RespondentScore> entries;
};

/// Pairwise correlation over exclusive questions: Spearman's rho when both
/// are ordered, Cramer's V otherwise. A pair is flagged when p < alpha and
/// the statistic clears the strength threshold; pairs authored as correlated
/// (same CORRELATED label) are reported when they do NOT flag. Returns
/// flagged and authored pairs.
std::vector<CorrelationFinding> analyze_correlations(const ResponseMatrix& m,
                                                     const AnalysisOptions& opts,
                                                     int* pairs_tested = nullptr);

/// For every question pair where both relative orders reached at least
/// min_partition respondents, tests whether each question's answers depend
/// on which came first: Mann-Whitney U for ordered questions, two-sample
/// chi-squared for unordered ones. Returns every directed test performed.
std::vector<OrderBiasFinding> analyze_order_bias(const ResponseMatrix& m,
                                                 const AnalysisOptions& opts);

/// Within each wording-variant (ALL) block, compares every variant pair's
/// answers on the shared authored option scale, with the same tests as the
/// order analysis. Returns every pair tested.
std::vector<VariantBiasFinding> analyze_variant_bias(const ResponseMatrix& m, const Survey& s,
                                                     const AnalysisOptions& opts);

/// Tallies of where respondents gave up: last answered display position and
/// last displayed question, each ranked by count descending.
BreakoffReport analyze_breakoff(const std::vector<ResponseRecord>& records);

/// Scores every completed respondent by the improbability of their choices
/// (total surprisal by default) and flags scores beyond a bootstrap
/// threshold: each resample contributes a one-sided (1-alpha) normal bound
/// mean + z*sd, and the threshold is the median of those bounds, so a
/// homogeneous population flags about an alpha share while a random cluster
/// widens the bound into the gap between clusters. Breakoff records are
/// excluded from both the probability estimates and the scoring. Throws
/// InsufficientData below 20 completed records.
RandomRespondentReport detect_random_respondents(const std::vector<ResponseRecord>& records,
                                                 const Survey& s, const AnalysisOptions& opts);

struct DynamicReport {
    std::string survey_id;
    std::string source_digest;
    double alpha = 0.05;
    bool paper_compat = false;
    int n_records = 0;
    int n_completed = 0;
    int n_breakoff = 0;
    int n_stale_skipped = 0;
    int correlation_pairs_tested = 0;
    std::vector<CorrelationFinding> correlations;
    std::vector<OrderBiasFinding> order_bias;      // all tests
    std::vector<VariantBiasFinding> variant_bias;  // all tests
    BreakoffReport breakoff;
    std::optional<RandomRespondentReport> random_respondents;
    std::vector<std::string> notes;

    bool any_flagged() const;
};

/// Full pipeline over a response log: drops records whose digest does not
/// match the survey, keeps one record per respondent (completed wins over
/// breakoff), then runs every analysis.
DynamicReport analyze_dynamic(const Survey& s, const std::vector<ResponseRecord>& records,
                              const AnalysisOptions& opts);

std::string dynamic_report_text(const DynamicReport& r);
std::string dynamic_report_json(const DynamicReport& r);

}  // namespace survey
