#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"

namespace hadq::stats {

// Upper tail Q(lambda) of the Kolmogorov distribution. Uses the
// theta-function form on the small-lambda side so both tails converge in
// a few terms.
inline double kolmogorov_q(double lambda) {
    if (lambda <= 1e-12) return 1.0;
    if (lambda < 1.18) {
        double y = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
        double p = std::sqrt(2.0 * M_PI) / lambda *
                   (y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0));
        return std::max(0.0, std::min(1.0, 1.0 - p));
    }
    double u = std::exp(-2.0 * lambda * lambda);
    double q = 2.0 * (u - std::pow(u, 4.0) + std::pow(u, 9.0) - std::pow(u, 16.0));
    return std::max(0.0, std::min(1.0, q));
}

// Asymptotic p-value for a KS statistic at effective sample size ne.
inline double ks_pvalue(double d, double ne) {
    double s = std::sqrt(ne);
    return kolmogorov_q((s + 0.12 + 0.11 / s) * d);
}

struct KsResult {
    double statistic;
    double p;
    std::size_t n;
};

// One-sample KS against a cdf callable; data need not be sorted.
template <typename Cdf>
KsResult ks_one_sample(std::vector<double> data, Cdf&& cdf) {
    if (data.empty()) throw TooFewSamples("ks_one_sample: empty sample");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double f = cdf(data[i]);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    return {d, ks_pvalue(d, n), data.size()};
}

// Two-sample KS with tie handling.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw TooFewSamples("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    double ne = na * nb / (na + nb);
    return {d, ks_pvalue(d, ne), a.size() + b.size()};
}

namespace detail {

// Regularized incomplete gamma Q(a, x) by series / continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw InvalidParameters("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a, x) series
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - lg);
        return std::max(0.0, std::min(1.0, 1.0 - p));
    }
    // Q(a, x) continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double dd = 1.0 / b;
    double h = dd;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < tiny) dd = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return std::max(0.0, std::min(1.0, q));
}

}  // namespace detail

inline double chi_square_pvalue(double statistic, double dof) {
    if (dof <= 0.0) throw InvalidParameters("chi_square_pvalue: dof <= 0");
    return detail::gamma_q(dof / 2.0, statistic / 2.0);
}

// Chi-square goodness of fit of observed counts against fixed expected
// counts (no fitted parameters).
struct ChiSquareResult {
    double statistic;
    double p;
    std::size_t cells;
};

inline ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                                      const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw InvalidParameters("chi_square_gof: mismatched cell counts");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0))
            throw InvalidParameters("chi_square_gof: nonpositive expectation");
        double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    return {stat, chi_square_pvalue(stat, static_cast<double>(observed.size())),
            observed.size()};
}

inline double pearson_correlation(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw TooFewSamples("pearson_correlation: need matched samples, n >= 3");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw InvalidParameters("pearson_correlation: degenerate sample");
    return sxy / std::sqrt(sxx * syy);
}

// Fisher z bound: |atanh(r)| <= nsigma / sqrt(n - 3) holds with
// probability ~erf(nsigma/sqrt 2) when the true correlation is zero.
inline bool correlation_consistent_with_zero(double r, std::size_t n,
                                             double nsigma = 3.0) {
    if (n < 4) throw TooFewSamples("correlation test: need n >= 4");
    return std::abs(std::atanh(r)) <=
           nsigma / std::sqrt(static_cast<double>(n) - 3.0);
}

inline double exponential_cdf(double x, double rate) {
    return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x);
}

// Inter-particle gaps in position order; the wrap gap of a cycle is
// excluded (tests of fixed-count cyclic samples should use
// gof_uniform_positions instead).
inline std::vector<double> interparticle_gaps(const Configuration& c) {
    const auto& p = c.positions();
    std::vector<double> gaps;
    if (p.size() < 2) return gaps;
    gaps.reserve(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) gaps.push_back(p[i] - p[i - 1]);
    return gaps;
}

inline constexpr std::size_t min_gof_samples = 30;

// KS of inter-particle gaps against Exponential(rate).
inline KsResult gof_exponential_gaps(const Configuration& c, double rate) {
    if (!(rate > 0.0))
        throw InvalidParameters("gof_exponential_gaps: rate must be positive");
    std::vector<double> gaps = interparticle_gaps(c);
    if (gaps.size() < min_gof_samples)
        throw TooFewSamples("gof_exponential_gaps: need at least 30 gaps");
    return ks_one_sample(std::move(gaps),
                         [rate](double x) { return exponential_cdf(x, rate); });
}

// KS of normalized positions against the uniform law; the right test for
// fixed-count samples on a cycle.
inline KsResult gof_uniform_positions(const Configuration& c) {
    if (c.size() < min_gof_samples)
        throw TooFewSamples("gof_uniform_positions: need at least 30 points");
    std::vector<double> u;
    u.reserve(c.size());
    const Geometry& g = c.geometry();
    for (double x : c.positions()) u.push_back((x - g.lo) / g.length);
    return ks_one_sample(std::move(u), [](double x) {
        return std::min(1.0, std::max(0.0, x));
    });
}

// Two-sample KS wrapper with the sample-size contract.
inline KsResult two_sample_test(const std::vector<double>& a,
                                const std::vector<double>& b) {
    if (a.size() < min_gof_samples || b.size() < min_gof_samples)
        throw TooFewSamples("two_sample_test: need at least 30 values each");
    return ks_two_sample(a, b);
}

}  // namespace hadq::stats
