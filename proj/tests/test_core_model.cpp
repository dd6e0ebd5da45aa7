#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hadq/configuration.hpp"
#include "hadq/geometry.hpp"
#include "hadq/point_field.hpp"
#include "hadq/rng.hpp"
#include "hadq/sampling.hpp"

using namespace hadq;

static bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] < v[i])) return false;
    return true;
}

TEST_CASE("geometry construction and containment") {
    Geometry c = Geometry::cycle(10.0);
    CHECK(c.is_cycle());
    CHECK(c.contains(0.0));
    CHECK(c.contains(9.999));
    CHECK_FALSE(c.contains(10.0));
    CHECK_FALSE(c.contains(-0.1));

    Geometry w = Geometry::interval(5.0, -2.0);
    CHECK_FALSE(w.is_cycle());
    CHECK(w.contains(-2.0));
    CHECK(w.contains(2.999));
    CHECK_FALSE(w.contains(3.0));

    CHECK_THROWS_AS(Geometry::cycle(0.0), InvalidParameters);
    CHECK_THROWS_AS(Geometry::interval(-1.0), InvalidParameters);
}

TEST_CASE("configuration invariants") {
    Geometry g = Geometry::cycle(10.0);
    CHECK_NOTHROW(Configuration(g, {1.0, 3.0, 5.0}));
    CHECK_THROWS_AS(Configuration(g, {3.0, 1.0}), InvalidParameters);
    CHECK_THROWS_AS(Configuration(g, {1.0, 1.0}), InvalidParameters);
    CHECK_THROWS_AS(Configuration(g, {1.0, 11.0}), InvalidParameters);
}

TEST_CASE("nearest_left on a cycle") {
    Configuration c(Geometry::cycle(10.0), {1.0, 3.0, 5.0});
    CHECK(c.nearest_left(4.0) == 3.0);
    CHECK(c.nearest_left(0.5) == 5.0);  // wraps to the rightmost particle
    CHECK(c.nearest_left(9.0) == 5.0);
    CHECK(c.nearest_left(1.5) == 1.0);
    CHECK_THROWS_AS(c.nearest_left(3.0), PositionCollision);

    Configuration empty(Geometry::cycle(10.0));
    CHECK_THROWS_AS(empty.nearest_left(4.0), EmptyConfiguration);
}

TEST_CASE("nearest_left on an interval") {
    Configuration c(Geometry::interval(10.0), {1.0, 3.0, 5.0});
    CHECK(c.nearest_left(4.0) == 3.0);
    CHECK_THROWS_AS(c.nearest_left(0.5), NoLeftParticle);
}

TEST_CASE("nearest_right mirrors nearest_left") {
    Configuration c(Geometry::cycle(10.0), {1.0, 3.0, 5.0});
    CHECK(c.nearest_right(4.0) == 5.0);
    CHECK(c.nearest_right(6.0) == 1.0);  // wraps to the leftmost particle
    Configuration w(Geometry::interval(10.0), {1.0, 3.0, 5.0});
    CHECK_THROWS_AS(w.nearest_right(6.0), NoRightParticle);
}

TEST_CASE("nearest_left always returns an element of the configuration") {
    RngStream rng(7, 0);
    Geometry g = Geometry::cycle(20.0);
    for (int rep = 0; rep < 200; ++rep) {
        Configuration c = sample_configuration(std::size_t(1 + rep % 17), g, rng);
        double x = rng.uniform(0.0, 20.0);
        if (c.contains(x)) continue;
        double u = c.nearest_left(x);
        CHECK(c.contains(u));
    }
}

TEST_CASE("fixed-count sampling yields exactly the requested particles") {
    RngStream rng(1, 0);
    Geometry g = Geometry::cycle(10.0);
    Configuration empty = sample_configuration(std::size_t(0), g, rng);
    CHECK(empty.empty());

    Configuration five = sample_configuration(std::size_t(5), g, rng);
    REQUIRE(five.size() == 5);
    CHECK(strictly_increasing(five.positions()));
    for (double x : five.positions()) CHECK(g.contains(x));
}

TEST_CASE("rate sampling matches Poisson count statistics") {
    RngStream rng(2, 0);
    Geometry g = Geometry::cycle(10.0);
    const int draws = 10000;
    const double mean = 2.0 * 10.0;
    double total = 0.0;
    for (int i = 0; i < draws; ++i) {
        Configuration c = sample_configuration(2.0, g, rng);
        total += static_cast<double>(c.size());
        if (i % 500 == 0) CHECK(strictly_increasing(c.positions()));
    }
    double sample_mean = total / draws;
    double sigma = std::sqrt(mean / draws);
    CHECK(std::abs(sample_mean - mean) < 3.0 * sigma);

    CHECK_THROWS_AS(sample_configuration(0.0, g, rng), InvalidParameters);
    CHECK_THROWS_AS(sample_configuration(-1.0, g, rng), InvalidParameters);
}

TEST_CASE("point field sampling") {
    RngStream rng(3, 0);
    Geometry g = Geometry::cycle(10.0);

    PointField none = sample_point_field(g, 0.0, rng);
    CHECK(none.empty());
    CHECK_THROWS_AS(sample_point_field(g, -1.0, rng), InvalidParameters);

    const int draws = 10000;
    const double mean = 10.0 * 5.0;
    double total = 0.0;
    for (int i = 0; i < draws; ++i) {
        PointField f = sample_point_field(g, 5.0, rng);
        total += static_cast<double>(f.size());
        if (i % 500 == 0) {
            for (std::size_t j = 1; j < f.size(); ++j)
                REQUIRE(f.points()[j - 1].t < f.points()[j].t);
        }
    }
    double sample_mean = total / draws;
    double sigma = std::sqrt(mean / draws);
    CHECK(std::abs(sample_mean - mean) < 3.0 * sigma);
}

TEST_CASE("rng streams are reproducible and distinct") {
    RngStream a(42, 3), b(42, 3), c(42, 4);
    bool all_equal = true;
    bool any_diff_stream = false;
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_diff_stream = any_diff_stream || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff_stream);
}

TEST_CASE("cycle translation rotates positions") {
    Configuration c(Geometry::cycle(10.0), {1.0, 3.0, 5.0});
    Configuration r = c.translated(-3.0);
    CHECK(r.positions() == std::vector<double>{0.0, 2.0, 8.0});
    Configuration w(Geometry::interval(10.0), {1.0, 3.0});
    Configuration ws = w.translated(-1.0);
    CHECK(ws.positions() == std::vector<double>{0.0, 2.0});
    CHECK(ws.geometry().lo == -1.0);
}

TEST_CASE("point field slice shifts times to the origin") {
    Geometry g = Geometry::cycle(10.0);
    PointField f(g, {{1.0, 0.5}, {2.0, 1.5}, {3.0, 2.5}});
    PointField s = f.sliced_and_shifted(1.0, 2.5);
    REQUIRE(s.size() == 2);
    CHECK(s.points()[0].x == 2.0);
    CHECK(s.points()[0].t == 0.5);
    CHECK(s.points()[1].t == 1.5);
}
