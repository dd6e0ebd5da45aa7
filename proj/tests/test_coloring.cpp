#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hadq/coloring.hpp"
#include "hadq/dynamics.hpp"
#include "hadq/rng.hpp"
#include "hadq/sampling.hpp"

using namespace hadq;

namespace {

Configuration cfg(const Geometry& g, std::vector<double> pos) {
    return Configuration(g, std::move(pos));
}

std::vector<int> labels_of_color(const std::vector<ColoredParticle>& side,
                                 Color c) {
    std::vector<int> out;
    for (const auto& p : side)
        if (p.color == c) out.push_back(p.label);
    return out;
}

// a must be a cyclic rotation of b
bool cyclically_equal(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    std::vector<int> doubled(b);
    doubled.insert(doubled.end(), b.begin(), b.end());
    return std::search(doubled.begin(), doubled.end(), a.begin(), a.end()) !=
           doubled.end();
}

double free_position(const ColoredPair& s, RngStream& rng) {
    for (;;) {
        double x = rng.uniform(0.0, s.geometry().length);
        bool taken = false;
        for (const auto& p : s.first()) taken = taken || p.pos == x;
        for (const auto& p : s.second()) taken = taken || p.pos == x;
        if (!taken) return x;
    }
}

}  // namespace

TEST_CASE("identical copies are all yellow and stay equal") {
    Geometry g = Geometry::cycle(10.0);
    Configuration eta = cfg(g, {1.0, 4.0, 7.0});
    ColoredPair state(eta, eta);
    CHECK(state.red_count() == 0);
    CHECK(state.blue_count() == 0);
    CHECK(state.yellow_count() == 3);

    RngStream rng(51, 0);
    for (int i = 0; i < 50; ++i) {
        double x = free_position(state, rng);
        state = colored_step(state, x).state;
        CHECK(state.red_count() == 0);
        CHECK(state.first_marginal() == state.second_marginal());
    }
}

TEST_CASE("a blue-red meeting turns both yellow") {
    Geometry g = Geometry::cycle(10.0);
    ColoredPair state(cfg(g, {3.0}), cfg(g, {2.0}));
    CHECK(state.red_count() == 1);
    ColoredStepResult r = colored_step(state, 5.0);
    CHECK(r.state.red_count() == 0);
    CHECK(r.state.blue_count() == 0);
    CHECK(r.state.yellow_count() == 1);
    CHECK(r.state.first()[0].pos == 5.0);
    CHECK(r.state.second()[0].pos == 5.0);
    REQUIRE(r.newly_yellow.size() == 2);
}

TEST_CASE("relay chains keep the marginals on the plain dynamics") {
    // blue at 4 (eta jumper), red at 1 (tilde jumper), extra blues at 2, 3
    Geometry g = Geometry::cycle(10.0);
    ColoredPair state(cfg(g, {2.0, 3.0, 4.0}), cfg(g, {1.0, 8.0, 9.0}));
    ColoredStepResult r = colored_step(state, 5.0);
    // eta marginal: nearest-left of 5 was 4, so positions become {2,3,5}
    CHECK(r.state.first_marginal().positions() ==
          std::vector<double>{2.0, 3.0, 5.0});
    // tilde marginal: nearest-left of 5 was 1
    CHECK(r.state.second_marginal().positions() ==
          std::vector<double>{5.0, 8.0, 9.0});
    // the pair at 5 is yellow on both sides
    for (const auto& p : r.state.first())
        if (p.pos == 5.0) CHECK(p.color == Color::yellow);
    for (const auto& p : r.state.second())
        if (p.pos == 5.0) CHECK(p.color == Color::yellow);
    CHECK(r.state.red_count() == 2);
    CHECK(r.state.blue_count() == 2);
}

TEST_CASE("red counts never increase and yellows never revert") {
    RngStream rng(52, 0);
    Geometry g = Geometry::cycle(20.0);
    for (int rep = 0; rep < 20; ++rep) {
        ColoredPair state(sample_configuration(std::size_t(8), g, rng),
                          sample_configuration(std::size_t(8), g, rng));
        std::size_t red = state.red_count();
        std::size_t yellow = state.yellow_count();
        std::vector<char> was_yellow_first(8, 0), was_yellow_second(8, 0);
        for (int i = 0; i < 400; ++i) {
            double x = free_position(state, rng);
            state = colored_step(state, x).state;
            CHECK(state.red_count() <= red);
            CHECK(state.yellow_count() >= yellow);
            red = state.red_count();
            yellow = state.yellow_count();
            CHECK(state.blue_count() == state.red_count());
            for (const auto& p : state.first()) {
                if (p.color == Color::yellow) was_yellow_first[p.label] = 1;
                else CHECK_FALSE(was_yellow_first[p.label]);
            }
            for (const auto& p : state.second()) {
                if (p.color == Color::yellow) was_yellow_second[p.label] = 1;
                else CHECK_FALSE(was_yellow_second[p.label]);
            }
        }
    }
}

TEST_CASE("blue and red labels never overpass within their copy") {
    RngStream rng(53, 0);
    Geometry g = Geometry::cycle(20.0);
    for (int rep = 0; rep < 10; ++rep) {
        ColoredPair state(sample_configuration(std::size_t(10), g, rng),
                          sample_configuration(std::size_t(10), g, rng));
        for (int i = 0; i < 300; ++i) {
            auto blues_before = labels_of_color(state.first(), Color::blue);
            auto reds_before = labels_of_color(state.second(), Color::red);
            double x = free_position(state, rng);
            state = colored_step(state, x).state;
            auto blues_after = labels_of_color(state.first(), Color::blue);
            auto reds_after = labels_of_color(state.second(), Color::red);

            // drop labels that coalesced during the step, then the cyclic
            // order of the survivors must be unchanged
            std::vector<int> blues_kept;
            for (int l : blues_before)
                if (std::count(blues_after.begin(), blues_after.end(), l))
                    blues_kept.push_back(l);
            std::vector<int> reds_kept;
            for (int l : reds_before)
                if (std::count(reds_after.begin(), reds_after.end(), l))
                    reds_kept.push_back(l);
            CHECK(cyclically_equal(blues_after, blues_kept));
            CHECK(cyclically_equal(reds_after, reds_kept));
        }
    }
}

TEST_CASE("forgetting colors reproduces the plain evolution") {
    RngStream rng(54, 0);
    Geometry g = Geometry::cycle(25.0);
    for (int rep = 0; rep < 20; ++rep) {
        Configuration eta = sample_configuration(std::size_t(12), g, rng);
        Configuration tld = sample_configuration(std::size_t(12), g, rng);
        PointField omega = sample_point_field(g, 2.0, rng);

        ColoredPair state(eta, tld);
        for (const auto& p : omega.points())
            state = colored_step(state, p.x).state;

        CHECK(state.first_marginal() ==
              evolve(eta, omega, {2.0}).snapshots[0].second);
        CHECK(state.second_marginal() ==
              evolve(tld, omega, {2.0}).snapshots[0].second);
    }
}

TEST_CASE("coalescence runs shrink to zero reds") {
    RngStream rng(55, 0);
    CoalescenceRun run = coalescence_run(10, 30.0, 2000.0, rng);
    REQUIRE_FALSE(run.series.empty());
    for (std::size_t i = 1; i < run.series.size(); ++i) {
        CHECK(run.series[i].red <= run.series[i - 1].red);
        CHECK(run.series[i].time > run.series[i - 1].time);
    }
    CHECK(run.absorbed);
    CHECK(run.series.back().red == 0);
    // every label went yellow at some finite time
    for (double t : run.first_yellow_first) CHECK(std::isfinite(t));
    for (double t : run.first_yellow_second) CHECK(std::isfinite(t));

    CHECK_THROWS_AS(coalescence_run(0, 30.0, 10.0, rng), InvalidParameters);
}

TEST_CASE("colored pair rejects mismatched counts") {
    Geometry g = Geometry::cycle(10.0);
    CHECK_THROWS_AS(ColoredPair(cfg(g, {1.0}), cfg(g, {2.0, 3.0})),
                    InvalidParameters);
}
