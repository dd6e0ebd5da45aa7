#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hadq/rng.hpp"
#include "hadq/sampling.hpp"
#include "hadq/stats.hpp"

using namespace hadq;
using Catch::Approx;

TEST_CASE("kolmogorov tail values") {
    // classical table values of Q(lambda)
    CHECK(stats::kolmogorov_q(1.2238) == Approx(0.10).margin(5e-4));
    CHECK(stats::kolmogorov_q(1.3581) == Approx(0.05).margin(5e-4));
    CHECK(stats::kolmogorov_q(1.6276) == Approx(0.01).margin(5e-4));
    CHECK(stats::kolmogorov_q(0.0) == 1.0);
    CHECK(stats::kolmogorov_q(0.3) > 0.9999);
    CHECK(stats::kolmogorov_q(3.0) < 1e-7);
}

TEST_CASE("chi-square tail values") {
    // 95th and 99th percentiles of chi-square
    CHECK(stats::chi_square_pvalue(3.841, 1) == Approx(0.05).margin(1e-3));
    CHECK(stats::chi_square_pvalue(18.307, 10) == Approx(0.05).margin(1e-3));
    CHECK(stats::chi_square_pvalue(23.209, 10) == Approx(0.01).margin(1e-3));
    CHECK(stats::chi_square_pvalue(124.342, 100) == Approx(0.05).margin(2e-3));
    CHECK(stats::chi_square_pvalue(0.0, 5) == 1.0);
}

TEST_CASE("one-sample KS calibration against exponential gaps") {
    RngStream rng(61, 0);
    const int runs = 200;
    int pass = 0;
    for (int r = 0; r < runs; ++r) {
        std::vector<double> gaps;
        for (int i = 0; i < 1000; ++i) gaps.push_back(rng.exponential(1.0));
        auto res = stats::ks_one_sample(
            std::move(gaps), [](double x) { return stats::exponential_cdf(x, 1.0); });
        if (res.p > 0.01) ++pass;
    }
    // nominal pass rate 99%
    CHECK(pass >= 193);
}

TEST_CASE("KS rejects a degenerate equally spaced sample") {
    Geometry g = Geometry::interval(100.0);
    std::vector<double> pos;
    for (int i = 0; i < 100; ++i) pos.push_back(i + 0.5);
    Configuration c(g, pos);
    auto res = stats::gof_exponential_gaps(c, 1.0);
    CHECK(res.p < 1e-6);
}

TEST_CASE("gof helpers enforce the sample-size contract") {
    Geometry g = Geometry::interval(10.0);
    Configuration tiny(g, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(stats::gof_exponential_gaps(tiny, 1.0), TooFewSamples);
    CHECK_THROWS_AS(stats::gof_uniform_positions(tiny), TooFewSamples);
    CHECK_THROWS_AS(
        stats::two_sample_test({1.0, 2.0}, std::vector<double>(50, 1.0)),
        TooFewSamples);
    CHECK_THROWS_AS(stats::gof_exponential_gaps(tiny, 0.0), InvalidParameters);
}

TEST_CASE("uniform-position gof accepts fixed-count cyclic samples") {
    RngStream rng(62, 0);
    Geometry g = Geometry::cycle(50.0);
    int pass = 0;
    for (int r = 0; r < 100; ++r) {
        Configuration c = sample_configuration(std::size_t(200), g, rng);
        if (stats::gof_uniform_positions(c).p > 0.01) ++pass;
    }
    CHECK(pass >= 95);
}

TEST_CASE("two-sample KS on identical samples has statistic zero") {
    std::vector<double> a;
    RngStream rng(63, 0);
    for (int i = 0; i < 100; ++i) a.push_back(rng.uniform01());
    auto res = stats::two_sample_test(a, a);
    CHECK(res.statistic == 0.0);
    CHECK(res.p == 1.0);
}

TEST_CASE("two-sample KS separates different rates and accepts equal ones") {
    RngStream rng(64, 0);
    const int runs = 150;
    int reject_diff = 0;
    int accept_same = 0;
    for (int r = 0; r < runs; ++r) {
        std::vector<double> a, b, c;
        for (int i = 0; i < 1000; ++i) {
            a.push_back(rng.exponential(1.0));
            b.push_back(rng.exponential(2.0));
            c.push_back(rng.exponential(1.0));
        }
        if (stats::two_sample_test(a, b).p < 0.01) ++reject_diff;
        if (stats::two_sample_test(a, c).p > 0.01) ++accept_same;
    }
    CHECK(reject_diff == runs);  // rate 1 vs 2 at n=1000 is unmistakable
    CHECK(accept_same >= 144);   // nominal 99%
}

TEST_CASE("chi-square gof calibration on Poisson cells") {
    RngStream rng(65, 0);
    const double mean = 50.0;
    int pass = 0;
    for (int r = 0; r < 100; ++r) {
        std::vector<double> obs, exp;
        for (int cell = 0; cell < 100; ++cell) {
            // Poisson(50) by counting exponential gaps
            int count = 0;
            double acc = rng.exponential(1.0);
            while (acc <= mean) {
                ++count;
                acc += rng.exponential(1.0);
            }
            obs.push_back(count);
            exp.push_back(mean);
        }
        if (stats::chi_square_gof(obs, exp).p > 0.01) ++pass;
    }
    CHECK(pass >= 95);

    // a shifted sample must be rejected
    std::vector<double> obs(100, 60.0), exp(100, 50.0);
    CHECK(stats::chi_square_gof(obs, exp).p < 1e-6);
}

TEST_CASE("correlation of independent samples is consistent with zero") {
    RngStream rng(66, 0);
    int consistent = 0;
    for (int r = 0; r < 100; ++r) {
        std::vector<double> xs, ys;
        for (int i = 0; i < 200; ++i) {
            xs.push_back(rng.uniform01());
            ys.push_back(rng.uniform01());
        }
        double rho = stats::pearson_correlation(xs, ys);
        if (stats::correlation_consistent_with_zero(rho, xs.size())) ++consistent;
    }
    CHECK(consistent >= 98);

    // strongly dependent samples are flagged
    std::vector<double> xs, ys;
    for (int i = 0; i < 200; ++i) {
        double v = rng.uniform01();
        xs.push_back(v);
        ys.push_back(v + 0.01 * rng.uniform01());
    }
    double rho = stats::pearson_correlation(xs, ys);
    CHECK_FALSE(stats::correlation_consistent_with_zero(rho, xs.size()));
}
