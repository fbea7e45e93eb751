#include "survey/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace survey::stats {

namespace {

constexpr int kMaxIterations = 300;
constexpr double kEpsilon = 1e-14;

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEpsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double beta_continued_fraction(double a, double b, double x) {
    double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DegenerateInput("gamma_p domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DegenerateInput("gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double chi_squared_upper_tail(double chi2, double df) {
    if (df <= 0.0) return 1.0;
    return clamp01(regularized_gamma_q(df / 2.0, chi2 / 2.0));
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) return 1.0;
    if (!std::isfinite(t)) return 0.0;
    return clamp01(incomplete_beta(df / 2.0, 0.5, df / (df + t * t)));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw DegenerateInput("normal_quantile domain");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = (lo + hi) / 2.0;
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman_rho(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DegenerateInput("paired samples differ in length");
    const std::size_t n = xs.size();
    if (n < 3) throw DegenerateInput("need at least 3 pairs");

    auto constant = [](std::span<const double> v) {
        return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
    };
    if (constant(xs) || constant(ys)) throw DegenerateInput("constant vector has no ranks");

    std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);

    double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = rx[i] - mean;
        double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    SpearmanResult r;
    r.n = n;
    r.rho = sxy / std::sqrt(sxx * syy);
    r.rho = std::min(1.0, std::max(-1.0, r.rho));
    double df = static_cast<double>(n) - 2.0;
    double fac = 1.0 - r.rho * r.rho;
    if (fac <= 0.0) {
        r.p = 0.0;
    } else {
        double t = r.rho * std::sqrt(df / fac);
        r.p = student_t_two_sided_p(t, df);
    }
    return r;
}

ChiSquaredResult chi_squared_gof(std::span<const double> observed,
                                 std::span<const double> expected_freqs, double df) {
    if (observed.size() != expected_freqs.size())
        throw DegenerateInput("observed and expected sizes differ");
    double freq_total = std::accumulate(expected_freqs.begin(), expected_freqs.end(), 0.0);
    if (std::abs(freq_total - 1.0) > 1e-6)
        throw DegenerateInput("expected frequencies must sum to 1");
    double total = std::accumulate(observed.begin(), observed.end(), 0.0);
    if (total <= 0.0) throw DegenerateInput("no observations");

    ChiSquaredResult r;
    r.df = df;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_freqs[i] * total;
        if (e <= 0.0) continue;
        if (e < 5.0) r.low_confidence = true;
        double d = observed[i] - e;
        r.chi2 += d * d / e;
    }
    r.p = chi_squared_upper_tail(r.chi2, df);
    return r;
}

CramersVResult cramers_v(const std::vector<std::vector<double>>& table) {
    if (table.empty()) throw DegenerateInput("empty table");
    const std::size_t cols = table.front().size();
    for (const auto& row : table)
        if (row.size() != cols) throw DegenerateInput("ragged table");

    std::vector<double> row_sum(table.size(), 0.0), col_sum(cols, 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
            n += table[i][j];
        }
    if (n <= 0.0) throw DegenerateInput("empty table");

    std::size_t live_rows = 0, live_cols = 0;
    for (double s : row_sum)
        if (s > 0.0) ++live_rows;
    for (double s : col_sum)
        if (s > 0.0) ++live_cols;
    if (live_rows < 2 || live_cols < 2)
        throw DegenerateInput("table needs at least two nonempty rows and columns");

    CramersVResult r;
    r.n = n;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (row_sum[i] <= 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            if (col_sum[j] <= 0.0) continue;
            double e = row_sum[i] * col_sum[j] / n;
            if (e < 5.0) r.low_confidence = true;
            double d = table[i][j] - e;
            r.chi2 += d * d / e;
        }
    }
    r.df = static_cast<double>((live_rows - 1) * (live_cols - 1));
    r.p = chi_squared_upper_tail(r.chi2, r.df);
    double denom = static_cast<double>(std::min(live_rows, live_cols) - 1);
    r.v = std::sqrt(std::max(0.0, r.chi2 / n / denom));
    r.v = std::min(1.0, r.v);
    return r;
}

MannWhitneyResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw DegenerateInput("empty sample");
    const std::size_t n1 = xs.size(), n2 = ys.size();
    std::vector<double> pooled;
    pooled.reserve(n1 + n2);
    pooled.insert(pooled.end(), xs.begin(), xs.end());
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    std::vector<double> ranks = average_ranks(pooled);

    double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(n1), 0.0);
    double u1 = r1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    double u2 = static_cast<double>(n1) * static_cast<double>(n2) - u1;

    MannWhitneyResult r;
    r.n1 = n1;
    r.n2 = n2;
    r.low_confidence = n1 < 5 || n2 < 5;
    r.u = std::min(u1, u2);

    // Tie-corrected variance over the pooled sample.
    double n = static_cast<double>(n1 + n2);
    double tie_term = 0.0;
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    double variance = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                      ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) {
        r.z = 0.0;
        r.p = 1.0;
        return r;
    }
    r.z = (r.u - mu + 0.5) / std::sqrt(variance);
    r.p = clamp01(2.0 * normal_cdf(r.z));
    return r;
}

}  // namespace survey::stats
