#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hdea/error.hpp"

// Summary statistics and the two significance tests used by the comparison
// harness. Everything here is a pure function of its inputs.

namespace hdea::stats {

namespace detail {

// Lanczos approximation (g=7, n=9), standard coefficients.
inline double log_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection
        return std::log(3.141592653589793238462643 / std::sin(3.141592653589793238462643 * x)) -
               log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coef[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return 0.5 * std::log(2.0 * 3.141592653589793238462643) + (x + 0.5) * std::log(t) - t +
           std::log(a);
}

// Continued fraction for the regularized incomplete beta, evaluated with the
// modified Lentz algorithm.
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace detail

// Two-sided Student-t tail probability P(|T_df| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    return detail::incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

// Upper quantile: the t >= 0 with P(|T_df| >= t) = 1 - level solved by bisection.
inline double student_t_quantile(double level, double df) {
    if (!(level > 0.0 && level < 1.0)) throw ParameterError("quantile level must be in (0,1)");
    const double target = 1.0 - level;
    double lo = 0.0, hi = 1.0;
    while (student_t_two_sided_p(hi, df) > target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_two_sided_p(mid, df) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;       // sample standard deviation, n-1 denominator; NaN for n < 2
    double median = 0.0;
    double kurtosis = 0.0; // non-excess Pearson kurtosis m4/m2^2; NaN if undefined
    double min = 0.0;
    double max = 0.0;
};

inline SampleSummary summarize(std::span<const double> xs) {
    if (xs.empty()) throw ParameterError("summarize: empty sample");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SampleSummary s;
    s.n = xs.size();

    double sum = 0.0;
    s.min = xs[0];
    s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(s.n);

    double m2 = 0.0, m4 = 0.0, ss = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        ss += d * d;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(s.n);
    m4 /= static_cast<double>(s.n);
    s.sd = s.n >= 2 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : nan;
    s.kurtosis = (s.n >= 2 && m2 > 0.0) ? m4 / (m2 * m2) : nan;

    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    s.median = s.n % 2 == 1 ? sorted[s.n / 2]
                            : 0.5 * (sorted[s.n / 2 - 1] + sorted[s.n / 2]);
    return s;
}

// ---------------------------------------------------------------------------
// Welch's unequal-variance two-sample t test
// ---------------------------------------------------------------------------

enum class TestMethod { welch_t, wilcoxon_signed_rank_exact, wilcoxon_signed_rank_normal };

inline std::string to_string(TestMethod m) {
    switch (m) {
    case TestMethod::welch_t: return "welch-t";
    case TestMethod::wilcoxon_signed_rank_exact: return "wilcoxon-signed-rank-exact";
    case TestMethod::wilcoxon_signed_rank_normal: return "wilcoxon-signed-rank-normal";
    }
    return "?";
}

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::welch_t;
};

// Welch statistic with Welch-Satterthwaite degrees of freedom. Degenerate
// samples (both variances zero): p=1 for equal means, p=0 sentinel otherwise.
// One-sided alternative is mean(xs) > mean(ys).
inline TestResult welch_t_test(std::span<const double> xs, std::span<const double> ys,
                               bool two_sided = true) {
    if (xs.size() < 2 || ys.size() < 2)
        throw ParameterError("welch_t_test: each sample needs n >= 2");
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    double mx = 0.0, my = 0.0;
    for (double x : xs) mx += x;
    for (double y : ys) my += y;
    mx /= nx;
    my /= ny;
    double vx = 0.0, vy = 0.0;
    for (double x : xs) vx += (x - mx) * (x - mx);
    for (double y : ys) vy += (y - my) * (y - my);
    vx /= nx - 1.0;
    vy /= ny - 1.0;

    TestResult r;
    r.method = TestMethod::welch_t;
    if (vx == 0.0 && vy == 0.0) {
        if (mx == my) {
            r.statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.statistic = mx > my ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
        return r;
    }
    const double se2 = vx / nx + vy / ny;
    const double t = (mx - my) / std::sqrt(se2);
    const double df = se2 * se2 /
                      ((vx / nx) * (vx / nx) / (nx - 1.0) + (vy / ny) * (vy / ny) / (ny - 1.0));
    r.statistic = t;
    const double p2 = student_t_two_sided_p(t, df);
    r.p_value = two_sided ? p2 : (t >= 0.0 ? p2 / 2.0 : 1.0 - p2 / 2.0);
    return r;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test (paired)
// ---------------------------------------------------------------------------
//
// Zero differences are dropped (Wilcoxon's convention); tied |differences|
// receive averaged ranks. The statistic is W+, the rank sum of positive
// differences. For n <= 25 remaining pairs the null distribution is
// enumerated exactly by dynamic programming over doubled ranks (doubling
// keeps tie-averaged half-ranks integral); beyond that the normal
// approximation with tie correction and a 0.5 continuity correction is used.
// One-sided alternative is xs > ys (large W+).

namespace detail {

struct SignedRanks {
    std::vector<double> ranks; // averaged ranks of |d|, aligned with kept pairs
    std::vector<int> signs;
    double w_plus = 0.0;
    std::size_t n = 0;
};

inline SignedRanks signed_ranks(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw ParameterError("wilcoxon_signed_rank: samples must be paired (equal length)");
    SignedRanks out;
    std::vector<double> abs_d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - ys[i];
        if (d == 0.0) continue;
        abs_d.push_back(std::fabs(d));
        out.signs.push_back(d > 0.0 ? 1 : -1);
    }
    out.n = abs_d.size();
    out.ranks.resize(out.n);

    std::vector<std::size_t> order(out.n);
    for (std::size_t i = 0; i < out.n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    std::size_t i = 0;
    while (i < out.n) {
        std::size_t j = i;
        while (j + 1 < out.n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) out.ranks[order[t]] = avg_rank;
        i = j + 1;
    }
    for (std::size_t t = 0; t < out.n; ++t)
        if (out.signs[t] > 0) out.w_plus += out.ranks[t];
    return out;
}

} // namespace detail

inline TestResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys,
                                       bool two_sided = true) {
    const auto sr = detail::signed_ranks(xs, ys);
    TestResult r;
    r.statistic = sr.w_plus;
    if (sr.n == 0) {
        // every pair tied: no evidence either way
        r.method = TestMethod::wilcoxon_signed_rank_exact;
        r.p_value = 1.0;
        return r;
    }

    if (sr.n <= 25) {
        r.method = TestMethod::wilcoxon_signed_rank_exact;
        // doubled ranks are integers; count sign assignments by achievable sum
        std::vector<std::uint64_t> doubled(sr.n);
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < sr.n; ++i) {
            doubled[i] = static_cast<std::uint64_t>(std::llround(2.0 * sr.ranks[i]));
            total += doubled[i];
        }
        std::vector<std::uint64_t> count(total + 1, 0);
        count[0] = 1;
        for (std::size_t i = 0; i < sr.n; ++i) {
            const std::uint64_t w = doubled[i];
            for (std::size_t s = total + 1; s-- > w;) count[s] += count[s - w];
        }
        const std::uint64_t w_obs = static_cast<std::uint64_t>(std::llround(2.0 * sr.w_plus));
        std::uint64_t le = 0, ge = 0;
        for (std::uint64_t s = 0; s <= total; ++s) {
            if (s <= w_obs) le += count[s];
            if (s >= w_obs) ge += count[s];
        }
        const double denom = std::ldexp(1.0, static_cast<int>(sr.n)); // 2^n, exact
        const double p_le = static_cast<double>(le) / denom;
        const double p_ge = static_cast<double>(ge) / denom;
        if (two_sided)
            r.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
        else
            r.p_value = p_ge;
        return r;
    }

    r.method = TestMethod::wilcoxon_signed_rank_normal;
    const double n = static_cast<double>(sr.n);
    const double mean = n * (n + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted_ranks = sr.ranks;
        std::sort(sorted_ranks.begin(), sorted_ranks.end());
        std::size_t i = 0;
        while (i < sorted_ranks.size()) {
            std::size_t j = i;
            while (j + 1 < sorted_ranks.size() && sorted_ranks[j + 1] == sorted_ranks[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    const double diff = sr.w_plus - mean;
    const double cc = diff > 0.0 ? -0.5 : (diff < 0.0 ? 0.5 : 0.0);
    const double z = (diff + cc) / std::sqrt(var);
    if (two_sided)
        r.p_value = 2.0 * (1.0 - detail::normal_cdf(std::fabs(z)));
    else
        r.p_value = 1.0 - detail::normal_cdf(z);
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

// ---------------------------------------------------------------------------
// Pointwise confidence band across equally long per-run curves
// ---------------------------------------------------------------------------

struct ConfidenceBand {
    std::vector<double> mean;
    std::vector<double> lower;
    std::vector<double> upper;
};

// mean +- t_{(1+level)/2, n-1} * sd/sqrt(n) at each point.
inline ConfidenceBand confidence_band(const std::vector<std::vector<double>>& curves,
                                      double level = 0.95) {
    if (curves.size() < 2) throw ParameterError("confidence_band: need >= 2 curves");
    const std::size_t len = curves[0].size();
    for (const auto& c : curves)
        if (c.size() != len) throw ParameterError("confidence_band: curves differ in length");
    const double n = static_cast<double>(curves.size());
    const double tq = student_t_quantile(level, n - 1.0);

    ConfidenceBand band;
    band.mean.resize(len);
    band.lower.resize(len);
    band.upper.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        double m = 0.0;
        for (const auto& c : curves) m += c[i];
        m /= n;
        double ss = 0.0;
        for (const auto& c : curves) ss += (c[i] - m) * (c[i] - m);
        const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        band.mean[i] = m;
        band.lower[i] = m - tq * se;
        band.upper[i] = m + tq * se;
    }
    return band;
}

} // namespace hdea::stats
