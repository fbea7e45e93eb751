#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace survey::stats {

class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- distribution helpers -------------------------------------------------

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double chi_squared_upper_tail(double chi2, double df);
/// Two-sided p for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);
double normal_cdf(double z);
/// Inverse of normal_cdf; p in (0, 1).
double normal_quantile(double p);

/// Pooled average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// --- tests -----------------------------------------------------------------

struct SpearmanResult {
    double rho = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

/// Rank correlation with average-rank tie handling; p from the
/// t approximation t = rho * sqrt((n-2)/(1-rho^2)). Throws DegenerateInput
/// if either vector is constant or n < 3.
SpearmanResult spearman_rho(std::span<const double> xs, std::span<const double> ys);

struct ChiSquaredResult {
    double chi2 = 0.0;
    double p = 1.0;
    double df = 0.0;
    bool low_confidence = false;  // some expected count below 5
};

/// Goodness of fit of observed counts against expected frequencies (which
/// must sum to 1). Cells with zero expectation are skipped. The caller picks
/// df. Small expected counts only flag the result, they do not suppress it.
ChiSquaredResult chi_squared_gof(std::span<const double> observed,
                                 std::span<const double> expected_freqs, double df);

struct CramersVResult {
    double v = 0.0;
    double chi2 = 0.0;
    double p = 1.0;
    double df = 0.0;
    double n = 0.0;
    bool low_confidence = false;
};

/// Association strength for an r x c contingency table of counts. Empty rows
/// and columns are dropped before computing; throws DegenerateInput when
/// fewer than two nonempty rows or columns remain.
CramersVResult cramers_v(const std::vector<std::vector<double>>& table);

struct MannWhitneyResult {
    double u = 0.0;
    double p = 1.0;
    double z = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool low_confidence = false;  // a sample smaller than 5
};

/// U = min(U1, U2) over pooled average ranks; two-sided p from the normal
/// approximation with tie-corrected variance and continuity correction.
/// Throws DegenerateInput when either sample is empty.
MannWhitneyResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys);

}  // namespace survey::stats
