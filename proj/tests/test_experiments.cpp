#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hadq/experiments.hpp"

using namespace hadq;

namespace {

// Shrunk parameter sets keep the unit suite fast; the acceptance binary
// runs the full-scale protocols.
ExperimentParams small(const std::string& name) {
    ExperimentParams p = defaults_for(name);
    p.replicas = std::min<std::size_t>(p.replicas, 10);
    p.meta_replicas = 3;
    p.samples = 60;
    if (name == "burke") p.window = 4000.0;
    if (name == "invariance") p.horizon = 2.0;
    if (name == "convergence") p.late_time = 2.0;
    if (name == "dual-points") p.horizon = 10.0;
    if (name == "regeneration") {
        p.cycle = 1000.0;
        p.string_cycle = 50000.0;
        p.replicas = 40;
    }
    if (name == "coalescence") {
        p.counts = {10};
        p.cycle = 40.0;
        p.horizon = 4000.0;
        p.replicas = 10;
    }
    if (name == "shock") {
        p.window = 200.0;
        p.horizon = 4.0;
        p.measure_width = 15.0;
        p.replicas = 10;
    }
    return p;
}

}  // namespace

TEST_CASE("palm recentering rotates a class particle to the origin") {
    Geometry g = Geometry::cycle(10.0);
    MulticlassConfig xi({Configuration(g, {1.0, 5.0}), Configuration(g, {3.0})});
    RngStream rng(71, 0);
    MulticlassConfig rec = palm_recenter(xi, 2, rng);
    CHECK(rec.cls(1).positions() == std::vector<double>{0.0});
    CHECK(rec.cls(0).size() == 2);
    for (double x : rec.cls(0).positions()) CHECK(g.contains(x));

    MulticlassConfig none({Configuration(g, {1.0}), Configuration(g)});
    CHECK_THROWS_AS(palm_recenter(none, 2, rng), EmptyClass);
    Geometry w = Geometry::interval(10.0);
    MulticlassConfig iv({Configuration(w, {1.0}), Configuration(w, {3.0})});
    CHECK_THROWS_AS(palm_recenter(iv, 2, rng), InvalidParameters);
}

TEST_CASE("shock construction follows the documented readings") {
    Geometry g = Geometry::interval(10.0, -5.0);
    MulticlassConfig xi({Configuration(g, {-2.0, 1.0}),
                         Configuration(g, {-1.0, 0.0, 3.0})});

    ShockConfigs a = shock_construct(xi, ShockReading::second_class_right);
    CHECK(a.eta.positions() == std::vector<double>{-2.0, -1.0, 3.0});
    CHECK(a.eta_with_origin.positions() ==
          std::vector<double>{-2.0, -1.0, 0.0, 3.0});

    ShockConfigs b = shock_construct(xi, ShockReading::first_class_right);
    CHECK(b.eta.positions() == std::vector<double>{-2.0, -1.0, 1.0});

    MulticlassConfig no_origin(
        {Configuration(g, {-2.0}), Configuration(g, {-1.0, 3.0})});
    CHECK_THROWS_AS(shock_construct(no_origin, ShockReading::second_class_right),
                    NoOriginParticle);
}

TEST_CASE("neighbor gap statistic wraps the cycle") {
    Geometry g = Geometry::cycle(10.0);
    MulticlassConfig xi({Configuration(g, {2.0, 6.0}), Configuration(g, {1.0, 7.0})});
    auto gaps = gaps_to_previous(xi, 2, 2);
    // class-2 particles at 1 and 7: previous any-class neighbors are 7 (wrap) and 6
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0] == 4.0);
    CHECK(gaps[1] == 1.0);
}

TEST_CASE("experiment dispatch validates names and parameters") {
    CHECK_THROWS_AS(defaults_for("nonsense"), UnknownExperiment);
    CHECK_THROWS_AS(run_experiment("nonsense", ExperimentParams{}, 1),
                    UnknownExperiment);

    ExperimentParams bad = defaults_for("burke");
    bad.lambda = 1.0;
    bad.rho = 0.5;
    CHECK_THROWS_AS(run_burke(bad, 1), InvalidParameters);

    ExperimentParams nonmono = defaults_for("invariance");
    nonmono.counts = {30, 30};
    CHECK_THROWS_AS(run_invariance(nonmono, 1), InvalidParameters);

    ExperimentParams badrates = defaults_for("regeneration");
    badrates.rates = {1.0, 0.5};
    CHECK_THROWS_AS(run_regeneration(badrates, 1), InvalidParameters);
}

TEST_CASE("small-scale experiments run and produce well-formed reports") {
    for (const std::string name :
         {"burke", "invariance", "convergence", "multiclass-burke",
          "dual-points", "regeneration", "coalescence", "shock"}) {
        INFO(name);
        ExperimentReport rep = run_experiment(name, small(name), 7);
        CHECK(rep.experiment == name);
        CHECK(rep.seed == 7);
        CHECK_FALSE(rep.verdicts.empty());
        CHECK_FALSE(rep.tests.empty());
        CHECK(rep.runtime_s >= 0.0);
        for (const auto& v : rep.verdicts) {
            CHECK_FALSE(v.name.empty());
            CHECK_FALSE(v.threshold.empty());
        }
    }
}

TEST_CASE("reports are reproducible for a fixed seed") {
    for (const std::string name : {"burke", "coalescence", "dual-points"}) {
        INFO(name);
        ExperimentParams p = small(name);
        ExperimentReport r1 = run_experiment(name, p, 3);
        ExperimentReport r2 = run_experiment(name, p, 3);
        CHECK(r1.canonical_json() == r2.canonical_json());

        ExperimentReport r3 = run_experiment(name, p, 4);
        CHECK(r1.canonical_json() != r3.canonical_json());
    }
}

TEST_CASE("replica parallelism does not change the report") {
    ExperimentParams p = small("invariance");
    p.jobs = 1;
    ExperimentReport serial = run_invariance(p, 5);
    p.jobs = 2;
    ExperimentReport parallel = run_invariance(p, 5);
    // jobs is recorded in params; the measured content must be identical
    CHECK(serial.to_json(false)["tests"] == parallel.to_json(false)["tests"]);
    CHECK(serial.to_json(false)["verdicts"] == parallel.to_json(false)["verdicts"]);
}

TEST_CASE("coalescence reports monotone series and absorption") {
    ExperimentParams p = small("coalescence");
    ExperimentReport rep = run_coalescence(p, 11);
    for (const auto& v : rep.verdicts) CHECK(v.pass);
}
