#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coloring.hpp"
#include "configuration.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "multiline.hpp"
#include "point_field.hpp"
#include "queueing.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "stats.hpp"

namespace hadq {

// Flat parameter set shared by all experiments; run_experiment validates
// the fields it uses. Keys mirror the CLI flag names.
struct ExperimentParams {
    double cycle = 100.0;
    double window = 1e5;
    double warmup_fraction = 0.2;
    double lambda = 0.5;
    double rho = 1.0;
    std::vector<double> rates = {0.5, 1.0};
    std::vector<std::size_t> counts = {30, 60};
    std::vector<std::size_t> counts_alt = {20, 40};
    double horizon = 20.0;
    double late_time = 50.0;
    std::size_t replicas = 100;
    std::size_t meta_replicas = 100;
    std::size_t samples = 2000;
    std::size_t grid_x = 10;
    std::size_t grid_t = 10;
    double measure_width = 30.0;
    double corr_width = 20.0;
    std::vector<double> string_rates = {0.25, 0.5, 0.75, 1.0};
    double string_cycle = 50000.0;
    std::vector<int> string_pattern = {4, 1, 2, 3, 1, 2};
    double significance = 0.01;
    std::size_t jobs = 1;

    nlohmann::json to_json() const {
        return nlohmann::json{{"cycle", cycle},
                              {"window", window},
                              {"warmup-fraction", warmup_fraction},
                              {"lambda", lambda},
                              {"rho", rho},
                              {"rates", rates},
                              {"counts", counts},
                              {"counts-alt", counts_alt},
                              {"horizon", horizon},
                              {"late-time", late_time},
                              {"replicas", replicas},
                              {"meta-replicas", meta_replicas},
                              {"samples", samples},
                              {"grid-x", grid_x},
                              {"grid-t", grid_t},
                              {"measure-width", measure_width},
                              {"corr-width", corr_width},
                              {"string-rates", string_rates},
                              {"string-cycle", string_cycle},
                              {"string-pattern", string_pattern},
                              {"significance", significance},
                              {"jobs", jobs}};
    }
};

// Rotates a cyclic multiclass configuration so that a uniformly chosen
// class-k particle (1-based k) sits exactly at the origin. Realizes the
// Palm conditioning on the cycle.
inline MulticlassConfig palm_recenter(const MulticlassConfig& xi,
                                      std::size_t cls_1based, RngStream& rng) {
    if (!xi.geometry().is_cycle())
        throw InvalidParameters("palm_recenter: needs a cycle");
    if (cls_1based < 1 || cls_1based > xi.num_classes())
        throw InvalidParameters("palm_recenter: class index out of range");
    const Configuration& target = xi.cls(cls_1based - 1);
    if (target.empty()) throw EmptyClass("palm_recenter: empty class");
    const double n = xi.geometry().length;
    const double x0 =
        target.positions()[rng.below(target.size())];

    std::vector<Configuration> rotated;
    rotated.reserve(xi.num_classes());
    for (const auto& cls : xi.classes()) {
        std::vector<double> lo, hi;
        for (double p : cls.positions())
            (p >= x0 ? lo : hi).push_back(p - x0 + (p >= x0 ? 0.0 : n));
        lo.insert(lo.end(), hi.begin(), hi.end());
        rotated.push_back(Configuration(xi.geometry(), std::move(lo)));
    }
    return MulticlassConfig(std::move(rotated));
}

// The two readings of the shock superposition: both take every particle
// left of the origin; they differ in which class survives to the right.
enum class ShockReading {
    second_class_right,  // reading A: second-class particles to the right
    first_class_right,   // reading B: first-class particles to the right
};

struct ShockConfigs {
    Configuration eta;              // the shock profile
    Configuration eta_with_origin;  // eta plus the origin discrepancy
};

// Builds the shock profile from a two-class configuration recentred at a
// second-class particle at the origin of an interval window.
inline ShockConfigs shock_construct(const MulticlassConfig& xi,
                                    ShockReading reading) {
    if (xi.geometry().is_cycle())
        throw InvalidParameters("shock_construct: needs an interval window");
    if (xi.num_classes() != 2)
        throw InvalidParameters("shock_construct: needs exactly two classes");
    if (!xi.cls(1).contains(0.0))
        throw NoOriginParticle(
            "shock_construct: no second-class particle at the origin");

    std::vector<double> eta;
    for (double p : xi.cls(0).positions())
        if (p < 0.0) eta.push_back(p);
    const auto& right_class =
        reading == ShockReading::second_class_right ? xi.cls(1) : xi.cls(0);
    for (double p : xi.cls(1).positions())
        if (p < 0.0) eta.push_back(p);
    for (double p : right_class.positions())
        if (p > 0.0) eta.push_back(p);
    std::sort(eta.begin(), eta.end());

    std::vector<double> with_origin(eta);
    with_origin.insert(
        std::lower_bound(with_origin.begin(), with_origin.end(), 0.0), 0.0);
    return {Configuration(xi.geometry(), std::move(eta)),
            Configuration(xi.geometry(), std::move(with_origin))};
}

// Gap from each class-k particle (1-based) to the nearest particle of
// classes 1..m strictly to its left, wrapping on the cycle.
inline std::vector<double> gaps_to_previous(const MulticlassConfig& xi,
                                            std::size_t cls_1based,
                                            std::size_t max_class_1based) {
    const double n = xi.geometry().length;
    std::vector<double> merged;
    for (std::size_t k = 0; k < max_class_1based; ++k) {
        const auto& p = xi.cls(k).positions();
        merged.insert(merged.end(), p.begin(), p.end());
    }
    std::sort(merged.begin(), merged.end());

    std::vector<double> gaps;
    const auto& targets = xi.cls(cls_1based - 1).positions();
    gaps.reserve(targets.size());
    for (double p : targets) {
        auto it = std::lower_bound(merged.begin(), merged.end(), p);
        double prev = it == merged.begin() ? merged.back() : *(it - 1);
        double gap = p - prev;
        if (gap <= 0.0) gap += n;
        gaps.push_back(gap);
    }
    return gaps;
}

namespace exp_detail {

inline std::uint64_t stream_of(std::uint64_t block, std::uint64_t index,
                               std::uint64_t sub = 0) {
    return (block << 40) + index * 8 + sub;
}

template <typename F>
void parallel_replicas(std::size_t n, std::size_t jobs, F&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::min(jobs, n); ++j)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::size_t pass_threshold(std::size_t total, double fraction) {
    return static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(total) - 1e-9));
}

inline MultiLineConfig fixed_count_stack(const std::vector<std::size_t>& counts,
                                         const Geometry& g, RngStream& rng) {
    std::vector<Configuration> lines;
    lines.reserve(counts.size());
    for (std::size_t c : counts) lines.push_back(sample_configuration(c, g, rng));
    return MultiLineConfig(std::move(lines));
}

// Rate-sampled stack, redrawn until the cyclic stability requirement
// (strictly increasing counts) holds.
inline MultiLineConfig rate_stack_stable(const std::vector<double>& rates,
                                         const Geometry& g, RngStream& rng) {
    for (;;) {
        std::vector<Configuration> lines;
        bool ok = true;
        std::size_t prev = 0;
        bool first = true;
        for (double r : rates) {
            Configuration c = sample_configuration(r, g, rng);
            if (!first && c.size() <= prev) {
                ok = false;
                break;
            }
            if (first && c.empty()) {
                ok = false;
                break;
            }
            first = false;
            prev = c.size();
            lines.push_back(std::move(c));
        }
        if (ok) return MultiLineConfig(std::move(lines));
    }
}

inline void require_increasing_counts(const std::vector<std::size_t>& counts,
                                      const char* what) {
    if (counts.size() < 2)
        throw InvalidParameters(std::string(what) + ": needs at least 2 lines");
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] <= counts[i - 1])
            throw InvalidParameters(std::string(what) +
                                    ": line counts must strictly increase");
}

inline void require_increasing_rates(const std::vector<double>& rates,
                                     const char* what) {
    if (rates.size() < 2)
        throw InvalidParameters(std::string(what) + ": needs at least 2 rates");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] > 0.0))
            throw InvalidParameters(std::string(what) + ": rates must be positive");
        if (i > 0 && !(rates[i] > rates[i - 1]))
            throw InvalidParameters(std::string(what) +
                                    ": rates must strictly increase");
    }
}

// Count of positions inside the cyclic window [a, a+len).
inline std::size_t count_in_cyclic(const std::vector<double>& sorted,
                                   double a, double len, double n) {
    double b = a + len;
    auto count_range = [&](double lo, double hi) {
        auto l = std::lower_bound(sorted.begin(), sorted.end(), lo);
        auto h = std::lower_bound(sorted.begin(), sorted.end(), hi);
        return static_cast<std::size_t>(h - l);
    };
    if (a < 0.0) return count_range(a + n, n) + count_range(0.0, b);
    if (b > n) return count_range(a, n) + count_range(0.0, b - n);
    return count_range(a, b);
}

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

}  // namespace exp_detail

// ---------------------------------------------------------------------------
// burke: departures of the window queue against the arrival law
// ---------------------------------------------------------------------------
inline ExperimentReport run_burke(const ExperimentParams& p,
                                  std::uint64_t seed) {
    if (!(p.lambda > 0.0) || !(p.lambda < p.rho))
        throw InvalidParameters("burke: requires 0 < lambda < rho");
    if (!(p.window > 0.0) || p.warmup_fraction < 0.0 || p.warmup_fraction >= 1.0)
        throw InvalidParameters("burke: bad window or warm-up fraction");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "burke";
    rep.params = p.to_json();
    rep.seed = seed;

    const Geometry g = Geometry::interval(p.window);
    const double warmup = p.window * p.warmup_fraction;

    std::vector<stats::KsResult> results(p.replicas);
    exp_detail::parallel_replicas(p.replicas, p.jobs, [&](std::size_t r) {
        RngStream rng(seed, exp_detail::stream_of(1, r));
        Configuration A = sample_configuration(p.lambda, g, rng);
        Configuration S = sample_configuration(p.rho, g, rng);
        Configuration D = split_departures_unused(A, S).departures;
        std::vector<double> gaps;
        const auto& d = D.positions();
        for (std::size_t i = 1; i < d.size(); ++i)
            if (d[i - 1] >= warmup) gaps.push_back(d[i] - d[i - 1]);
        if (gaps.size() < stats::min_gof_samples)
            throw TooFewSamples("burke: too few departure gaps after warm-up");
        results[r] = stats::ks_one_sample(std::move(gaps), [&](double x) {
            return stats::exponential_cdf(x, p.lambda);
        });
    });

    std::size_t pass = 0;
    for (std::size_t r = 0; r < p.replicas; ++r) {
        rep.tests.push_back({"departure_gap_ks_rep" + std::to_string(r),
                             results[r].n, results[r].statistic, results[r].p});
        if (results[r].p > p.significance) ++pass;
    }
    std::size_t need = exp_detail::pass_threshold(p.replicas, 0.95);
    rep.verdicts.push_back({"departure_gap_pass_rate",
                            "KS p > 0.01 in >= 95% of replicas",
                            static_cast<double>(pass), pass >= need});
    rep.runtime_s = timer.seconds();
    return rep;
}

namespace exp_detail {

// Pooled class-2 neighbor-gap statistic of one fresh invariant draw.
inline void append_fresh_stat(const ExperimentParams& p, const Geometry& g,
                              RngStream& rng, std::vector<double>& out) {
    MultiLineConfig alpha = fixed_count_stack(p.counts, g, rng);
    MulticlassConfig xi = map_multiclass(alpha);
    auto gaps = gaps_to_previous(xi, 2, xi.num_classes());
    out.insert(out.end(), gaps.begin(), gaps.end());
}

// Same statistic after evolving an invariant draw for `time`.
inline void append_evolved_stat(const ExperimentParams& p, const Geometry& g,
                                double time, RngStream& rng,
                                std::vector<double>& out) {
    MultiLineConfig alpha = fixed_count_stack(p.counts, g, rng);
    CoupledConfig eta = build_coupled(alpha);
    PointField omega = sample_point_field(g, time, rng);
    CoupledConfig eta_t = evolve(eta, omega, {time}).snapshots[0].second;
    auto gaps = gaps_to_previous(collapse_classes(eta_t), 2, eta_t.num_lines());
    out.insert(out.end(), gaps.begin(), gaps.end());
}

}  // namespace exp_detail

// ---------------------------------------------------------------------------
// invariance: fresh invariant draws vs evolved invariant draws
// ---------------------------------------------------------------------------
inline ExperimentReport run_invariance(const ExperimentParams& p,
                                       std::uint64_t seed) {
    exp_detail::require_increasing_counts(p.counts, "invariance");
    if (!(p.horizon > 0.0)) throw InvalidParameters("invariance: horizon <= 0");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "invariance";
    rep.params = p.to_json();
    rep.seed = seed;

    const Geometry g = Geometry::cycle(p.cycle);
    std::vector<double> pvals(p.meta_replicas);
    exp_detail::parallel_replicas(p.meta_replicas, p.jobs, [&](std::size_t m) {
        std::vector<double> fresh, evolved;
        for (std::size_t i = 0; i < p.samples; ++i) {
            RngStream ra(seed, exp_detail::stream_of(2, m * p.samples + i, 0));
            exp_detail::append_fresh_stat(p, g, ra, fresh);
            RngStream rb(seed, exp_detail::stream_of(2, m * p.samples + i, 1));
            exp_detail::append_evolved_stat(p, g, p.horizon, rb, evolved);
        }
        pvals[m] = stats::two_sample_test(fresh, evolved).p;
    });

    std::size_t pass = 0;
    for (std::size_t m = 0; m < p.meta_replicas; ++m) {
        rep.tests.push_back({"gap_ks_meta" + std::to_string(m),
                             p.samples * 2, 0.0, pvals[m]});
        if (pvals[m] > p.significance) ++pass;
    }
    std::size_t need = exp_detail::pass_threshold(p.meta_replicas, 0.95);
    rep.verdicts.push_back({"invariance_pass_rate",
                            "two-sample KS p > 0.01 in >= 95% of meta-replicas",
                            static_cast<double>(pass), pass >= need});
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// convergence: non-invariant start is rejected at t=0 and accepted later
// ---------------------------------------------------------------------------
inline ExperimentReport run_convergence(const ExperimentParams& p,
                                        std::uint64_t seed) {
    exp_detail::require_increasing_counts(p.counts, "convergence");
    if (!(p.late_time > 0.0))
        throw InvalidParameters("convergence: late time <= 0");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "convergence";
    rep.params = p.to_json();
    rep.seed = seed;

    const Geometry g = Geometry::cycle(p.cycle);
    std::vector<std::size_t> class_counts;
    class_counts.push_back(p.counts[0]);
    for (std::size_t i = 1; i < p.counts.size(); ++i)
        class_counts.push_back(p.counts[i] - p.counts[i - 1]);

    std::vector<double> p_start(p.meta_replicas), p_late(p.meta_replicas);
    exp_detail::parallel_replicas(p.meta_replicas, p.jobs, [&](std::size_t m) {
        std::vector<double> initial, late, fresh_a, fresh_b;
        for (std::size_t i = 0; i < p.samples; ++i) {
            RngStream rng(seed, exp_detail::stream_of(3, m * p.samples + i, 0));
            // independent uniform classes with the prescribed densities
            std::vector<Configuration> classes;
            for (std::size_t c : class_counts)
                classes.push_back(sample_configuration(c, g, rng));
            MulticlassConfig xi0(std::move(classes));
            auto gaps0 = gaps_to_previous(xi0, 2, xi0.num_classes());
            initial.insert(initial.end(), gaps0.begin(), gaps0.end());

            PointField omega = sample_point_field(g, p.late_time, rng);
            CoupledConfig eta_t =
                evolve(expand_classes(xi0), omega, {p.late_time})
                    .snapshots[0]
                    .second;
            auto gaps1 =
                gaps_to_previous(collapse_classes(eta_t), 2, eta_t.num_lines());
            late.insert(late.end(), gaps1.begin(), gaps1.end());

            RngStream rf(seed, exp_detail::stream_of(3, m * p.samples + i, 1));
            exp_detail::append_fresh_stat(p, g, rf, fresh_a);
            RngStream rf2(seed, exp_detail::stream_of(3, m * p.samples + i, 2));
            exp_detail::append_fresh_stat(p, g, rf2, fresh_b);
        }
        p_start[m] = stats::two_sample_test(initial, fresh_a).p;
        p_late[m] = stats::two_sample_test(late, fresh_b).p;
    });

    std::size_t reject0 = 0, pass_late = 0;
    for (std::size_t m = 0; m < p.meta_replicas; ++m) {
        rep.tests.push_back(
            {"gap_ks_t0_meta" + std::to_string(m), p.samples * 2, 0.0, p_start[m]});
        rep.tests.push_back({"gap_ks_late_meta" + std::to_string(m),
                             p.samples * 2, 0.0, p_late[m]});
        if (p_start[m] < p.significance) ++reject0;
        if (p_late[m] > p.significance) ++pass_late;
    }
    rep.verdicts.push_back(
        {"initial_law_rejected",
         "two-sample KS p < 0.01 at t=0 in >= 95% of meta-replicas",
         static_cast<double>(reject0),
         reject0 >= exp_detail::pass_threshold(p.meta_replicas, 0.95)});
    rep.verdicts.push_back(
        {"late_law_accepted",
         "two-sample KS p > 0.01 at the late time in >= 90% of meta-replicas",
         static_cast<double>(pass_late),
         pass_late >= exp_detail::pass_threshold(p.meta_replicas, 0.90)});
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// multiclass-burke: first two coordinates of the map do not depend on n
// ---------------------------------------------------------------------------
inline ExperimentReport run_multiclass_burke(const ExperimentParams& p,
                                             std::uint64_t seed) {
    exp_detail::require_increasing_counts(p.counts, "multiclass-burke");
    exp_detail::require_increasing_counts(p.counts_alt, "multiclass-burke");
    if (p.counts_alt.size() >= p.counts.size())
        throw InvalidParameters(
            "multiclass-burke: the alternate stack must have fewer lines");
    for (std::size_t i = 0; i < p.counts_alt.size(); ++i)
        if (p.counts_alt[i] != p.counts[i])
            throw InvalidParameters(
                "multiclass-burke: stacks must share the leading counts");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "multiclass-burke";
    rep.params = p.to_json();
    rep.seed = seed;

    const Geometry g = Geometry::cycle(p.cycle);
    std::vector<double> pvals(p.meta_replicas);
    exp_detail::parallel_replicas(p.meta_replicas, p.jobs, [&](std::size_t m) {
        std::vector<double> big, small;
        for (std::size_t i = 0; i < p.samples; ++i) {
            RngStream ra(seed, exp_detail::stream_of(4, m * p.samples + i, 0));
            MulticlassConfig xi_n =
                map_multiclass(exp_detail::fixed_count_stack(p.counts, g, ra));
            auto ga = gaps_to_previous(xi_n, 2, 2);
            big.insert(big.end(), ga.begin(), ga.end());

            RngStream rb(seed, exp_detail::stream_of(4, m * p.samples + i, 1));
            MulticlassConfig xi_k = map_multiclass(
                exp_detail::fixed_count_stack(p.counts_alt, g, rb));
            auto gb = gaps_to_previous(xi_k, 2, 2);
            small.insert(small.end(), gb.begin(), gb.end());
        }
        pvals[m] = stats::two_sample_test(big, small).p;
    });

    std::size_t pass = 0;
    for (std::size_t m = 0; m < p.meta_replicas; ++m) {
        rep.tests.push_back({"first_two_coordinate_gap_ks_meta" + std::to_string(m),
                             p.samples * 2, 0.0, pvals[m]});
        if (pvals[m] > p.significance) ++pass;
    }
    rep.verdicts.push_back(
        {"marginal_match_pass_rate",
         "two-sample KS p > 0.01 in >= 95% of meta-replicas",
         static_cast<double>(pass),
         pass >= exp_detail::pass_threshold(p.meta_replicas, 0.95)});
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// dual-points: space-time law of the pre-jump positions
// ---------------------------------------------------------------------------
inline ExperimentReport run_dual_points(const ExperimentParams& p,
                                        std::uint64_t seed) {
    if (p.counts.empty() || p.counts[0] == 0)
        throw InvalidParameters("dual-points: needs a particle count");
    if (p.grid_x < 2 || p.grid_t < 2)
        throw InvalidParameters("dual-points: grid too coarse");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "dual-points";
    rep.params = p.to_json();
    rep.seed = seed;

    const Geometry g = Geometry::cycle(p.cycle);
    const double T = p.horizon;
    const double box_area = (p.cycle / p.grid_x) * (T / p.grid_t);

    std::vector<double> chi_p(p.replicas);
    std::vector<double> dual_counts(p.replicas), state_counts(p.replicas);
    exp_detail::parallel_replicas(p.replicas, p.jobs, [&](std::size_t r) {
        RngStream rng(seed, exp_detail::stream_of(5, r));
        Configuration eta = sample_configuration(p.counts[0], g, rng);
        PointField omega = sample_point_field(g, T, rng);
        Trajectory<Configuration> traj = evolve(eta, omega, {T});
        const PointField& duals = traj.dual_lines[0];

        std::vector<double> observed(p.grid_x * p.grid_t, 0.0);
        std::size_t in_quarter = 0;
        for (const auto& pt : duals.points()) {
            auto ix = static_cast<std::size_t>(pt.x / (p.cycle / p.grid_x));
            auto it = static_cast<std::size_t>((pt.t - 1e-12) / (T / p.grid_t));
            ix = std::min(ix, p.grid_x - 1);
            it = std::min(it, p.grid_t - 1);
            observed[it * p.grid_x + ix] += 1.0;
            if (pt.x < p.cycle / 2 && pt.t <= T / 2) ++in_quarter;
        }
        std::vector<double> expected(observed.size(), box_area);
        chi_p[r] = stats::chi_square_gof(observed, expected).p;

        dual_counts[r] = static_cast<double>(in_quarter);
        const auto& final_pos = traj.snapshots[0].second.positions();
        state_counts[r] = static_cast<double>(
            std::lower_bound(final_pos.begin(), final_pos.end(), p.cycle / 2) -
            final_pos.begin());
    });

    std::size_t pass = 0;
    for (std::size_t r = 0; r < p.replicas; ++r) {
        rep.tests.push_back({"dual_box_chi2_rep" + std::to_string(r),
                             p.grid_x * p.grid_t, 0.0, chi_p[r]});
        if (chi_p[r] > p.significance) ++pass;
    }
    double corr = stats::pearson_correlation(dual_counts, state_counts);
    bool corr_ok = stats::correlation_consistent_with_zero(corr, p.replicas);
    rep.tests.push_back({"dual_vs_final_state_correlation", p.replicas, corr, 1.0});

    rep.verdicts.push_back(
        {"poisson_box_pass_rate",
         "chi-square p > 0.01 in >= 95% of replicas",
         static_cast<double>(pass),
         pass >= exp_detail::pass_threshold(p.replicas, 0.95)});
    rep.verdicts.push_back({"independence_of_final_state",
                            "box-count correlation consistent with 0 at 3 sigma",
                            corr, corr_ok});
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// regeneration: Palm structure around a second-class particle, plus the
// regeneration-string independence check
// ---------------------------------------------------------------------------
inline ExperimentReport run_regeneration(const ExperimentParams& p,
                                         std::uint64_t seed) {
    exp_detail::require_increasing_rates(p.rates, "regeneration");
    if (p.rates.size() != 2)
        throw InvalidParameters("regeneration: needs exactly two rates");
    exp_detail::require_increasing_rates(p.string_rates, "regeneration strings");
    if (p.string_pattern.empty() ||
        p.string_pattern.front() !=
            static_cast<int>(p.string_rates.size()) ||
        p.string_pattern.back() != 2)
        throw InvalidParameters(
            "regeneration: string must start at the top class and end at 2");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "regeneration";
    rep.params = p.to_json();
    rep.seed = seed;

    const Geometry g = Geometry::cycle(p.cycle);
    const double rho1 = p.rates[0], rho2 = p.rates[1];
    const double span = p.cycle / 4.0;

    std::vector<double> left_p(p.replicas), right_p(p.replicas);
    std::vector<double> left_counts(p.replicas), right_counts(p.replicas);
    exp_detail::parallel_replicas(p.replicas, p.jobs, [&](std::size_t r) {
        RngStream rng(seed, exp_detail::stream_of(6, r));
        MulticlassConfig xi = palm_recenter(
            map_multiclass(exp_detail::rate_stack_stable(p.rates, g, rng)), 2,
            rng);

        // leftward distances of first-class particles within the span
        std::vector<double> left_gaps;
        {
            std::vector<double> dists;
            for (double x : xi.cls(0).positions()) {
                double d = p.cycle - x;
                if (x > 0.0 && d <= span) dists.push_back(d);
            }
            std::sort(dists.begin(), dists.end());
            double prev = 0.0;
            for (double d : dists) {
                left_gaps.push_back(d - prev);
                prev = d;
            }
        }
        // rightward gaps of the merged classes within the span
        std::vector<double> right_gaps;
        {
            std::vector<double> merged;
            for (std::size_t k = 0; k < 2; ++k)
                for (double x : xi.cls(k).positions())
                    if (x > 0.0 && x <= span) merged.push_back(x);
            std::sort(merged.begin(), merged.end());
            double prev = 0.0;
            for (double x : merged) {
                right_gaps.push_back(x - prev);
                prev = x;
            }
        }
        if (left_gaps.size() < stats::min_gof_samples ||
            right_gaps.size() < stats::min_gof_samples)
            throw TooFewSamples("regeneration: span too small for the rates");
        left_p[r] = stats::ks_one_sample(std::move(left_gaps), [&](double x) {
                        return stats::exponential_cdf(x, rho1);
                    }).p;
        right_p[r] = stats::ks_one_sample(std::move(right_gaps), [&](double x) {
                         return stats::exponential_cdf(x, rho2);
                     }).p;

        std::vector<double> all;
        for (std::size_t k = 0; k < 2; ++k)
            for (double x : xi.cls(k).positions()) all.push_back(x);
        std::sort(all.begin(), all.end());
        left_counts[r] = static_cast<double>(exp_detail::count_in_cyclic(
            all, p.cycle - p.corr_width, p.corr_width, p.cycle));
        right_counts[r] = static_cast<double>(exp_detail::count_in_cyclic(
            all, 1e-12, p.corr_width, p.cycle));
    });

    std::size_t left_pass = 0, right_pass = 0;
    for (std::size_t r = 0; r < p.replicas; ++r) {
        rep.tests.push_back(
            {"left_class1_gap_ks_rep" + std::to_string(r), 0, 0.0, left_p[r]});
        rep.tests.push_back(
            {"right_merged_gap_ks_rep" + std::to_string(r), 0, 0.0, right_p[r]});
        if (left_p[r] > p.significance) ++left_pass;
        if (right_p[r] > p.significance) ++right_pass;
    }
    double corr = stats::pearson_correlation(left_counts, right_counts);
    bool corr_ok = stats::correlation_consistent_with_zero(corr, p.replicas);

    // regeneration strings on the wider cycle
    const Geometry gs = Geometry::cycle(p.string_cycle);
    std::vector<double> sl(p.replicas), sr(p.replicas);
    std::vector<char> found(p.replicas, 0);
    exp_detail::parallel_replicas(p.replicas, p.jobs, [&](std::size_t r) {
        RngStream rng(seed, exp_detail::stream_of(7, r));
        MulticlassConfig xi =
            map_multiclass(exp_detail::rate_stack_stable(p.string_rates, gs, rng));

        // merged particles with class labels
        std::vector<std::pair<double, int>> seq;
        for (std::size_t k = 0; k < xi.num_classes(); ++k)
            for (double x : xi.cls(k).positions())
                seq.emplace_back(x, static_cast<int>(k) + 1);
        std::sort(seq.begin(), seq.end());

        const std::size_t len = p.string_pattern.size();
        std::vector<std::size_t> occurrences;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            bool match = seq.size() >= len;
            for (std::size_t j = 0; match && j < len; ++j)
                match = seq[(i + j) % seq.size()].second == p.string_pattern[j];
            if (match) occurrences.push_back(i);
        }
        if (occurrences.empty()) return;
        std::size_t pick = occurrences[rng.below(occurrences.size())];
        double x0 = seq[pick].first;
        double xl = seq[(pick + len - 1) % seq.size()].first;

        std::vector<double> all;
        for (const auto& [x, c] : seq) all.push_back(x);
        sl[r] = static_cast<double>(exp_detail::count_in_cyclic(
            all, x0 - p.corr_width, p.corr_width, p.string_cycle));
        sr[r] = static_cast<double>(exp_detail::count_in_cyclic(
            all, xl + 1e-12, p.corr_width, p.string_cycle));
        found[r] = 1;
    });

    std::vector<double> sls, srs;
    for (std::size_t r = 0; r < p.replicas; ++r)
        if (found[r]) {
            sls.push_back(sl[r]);
            srs.push_back(sr[r]);
        }
    if (sls.size() < 30)
        throw TooFewSamples("regeneration: too few string occurrences");
    double string_corr = stats::pearson_correlation(sls, srs);
    bool string_ok =
        stats::correlation_consistent_with_zero(string_corr, sls.size());

    rep.tests.push_back({"palm_count_correlation", p.replicas, corr, 1.0});
    rep.tests.push_back({"string_count_correlation", sls.size(), string_corr, 1.0});

    rep.verdicts.push_back(
        {"left_class1_pass_rate", "KS vs Exponential(rho1) p > 0.01 in >= 95%",
         static_cast<double>(left_pass),
         left_pass >= exp_detail::pass_threshold(p.replicas, 0.95)});
    rep.verdicts.push_back(
        {"right_merged_pass_rate", "KS vs Exponential(rho2) p > 0.01 in >= 95%",
         static_cast<double>(right_pass),
         right_pass >= exp_detail::pass_threshold(p.replicas, 0.95)});
    rep.verdicts.push_back({"left_right_independence",
                            "count correlation consistent with 0 at 3 sigma",
                            corr, corr_ok});
    rep.verdicts.push_back({"string_independence",
                            "count correlation consistent with 0 at 3 sigma",
                            string_corr, string_ok});
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// coalescence: monotone discrepancy counts and absorption
// ---------------------------------------------------------------------------
inline ExperimentReport run_coalescence(const ExperimentParams& p,
                                        std::uint64_t seed) {
    if (p.counts.empty() || p.counts[0] == 0)
        throw InvalidParameters("coalescence: needs a particle count");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "coalescence";
    rep.params = p.to_json();
    rep.seed = seed;

    std::vector<CoalescenceRun> runs(p.replicas);
    exp_detail::parallel_replicas(p.replicas, p.jobs, [&](std::size_t r) {
        RngStream rng(seed, exp_detail::stream_of(8, r));
        runs[r] = coalescence_run(p.counts[0], p.cycle, p.horizon, rng);
    });

    bool all_monotone = true;
    bool all_absorbed = true;
    std::vector<double> absorption;
    for (std::size_t r = 0; r < p.replicas; ++r) {
        const auto& run = runs[r];
        for (std::size_t i = 1; i < run.series.size(); ++i)
            if (run.series[i].red > run.series[i - 1].red) all_monotone = false;
        all_absorbed = all_absorbed && run.absorbed;
        if (run.absorbed) absorption.push_back(run.absorption_time);
        rep.tests.push_back({"absorption_time_rep" + std::to_string(r),
                             run.series.size(),
                             run.absorbed ? run.absorption_time : -1.0, 1.0});
    }
    double median = -1.0;
    if (!absorption.empty()) {
        std::sort(absorption.begin(), absorption.end());
        median = absorption[absorption.size() / 2];
    }
    rep.verdicts.push_back({"red_count_monotone",
                            "non-increasing in every run (exact)",
                            all_monotone ? 1.0 : 0.0, all_monotone});
    rep.verdicts.push_back({"absorption_within_horizon",
                            "red count reaches 0 in every run",
                            all_absorbed ? 1.0 : 0.0, all_absorbed});
    rep.verdicts.push_back({"median_absorption_time",
                            "reported; no reference value", median, true});
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// shock: density profile around the tracked discrepancy
// ---------------------------------------------------------------------------
inline ExperimentReport run_shock(const ExperimentParams& p,
                                  std::uint64_t seed) {
    exp_detail::require_increasing_rates(p.rates, "shock");
    if (p.rates.size() != 2)
        throw InvalidParameters("shock: needs exactly two rates");
    if (!(p.window > 0.0) || !(p.measure_width > 0.0))
        throw InvalidParameters("shock: bad window or measure width");

    exp_detail::Timer timer;
    ExperimentReport rep;
    rep.experiment = "shock";
    rep.params = p.to_json();
    rep.seed = seed;

    const double rho1 = p.rates[0], rho2 = p.rates[1];
    const double left_target = rho2;          // all particles left of the origin
    const double right_target_a = rho2 - rho1;  // second class to the right
    const double right_target_b = rho1;         // first class to the right
    const Geometry g = Geometry::interval(p.window);
    const double w = p.measure_width;

    auto run_reading = [&](ShockReading reading, std::uint64_t block,
                           double& left_mean, double& right_mean) {
        std::vector<double> lefts(p.replicas), rights(p.replicas);
        exp_detail::parallel_replicas(p.replicas, p.jobs, [&](std::size_t r) {
            RngStream rng(seed, exp_detail::stream_of(block, r));
            for (;;) {
                MultiLineConfig alpha({sample_configuration(rho1, g, rng),
                                       sample_configuration(rho2, g, rng)});
                MulticlassConfig xi = map_multiclass(alpha);
                // second-class particle nearest the window centre
                const auto& cls2 = xi.cls(1).positions();
                double best = -1.0;
                for (double x : cls2)
                    if (x > 0.3 * p.window && x < 0.7 * p.window &&
                        (best < 0.0 ||
                         std::abs(x - p.window / 2) < std::abs(best - p.window / 2)))
                        best = x;
                if (best < 0.0) continue;

                std::vector<Configuration> shifted;
                for (const auto& cls : xi.classes())
                    shifted.push_back(cls.translated(-best));
                MulticlassConfig recentred(std::move(shifted));
                ShockConfigs sc = shock_construct(recentred, reading);

                const Geometry& gw = sc.eta.geometry();
                CoupledConfig pair({sc.eta, sc.eta_with_origin});
                PointField omega = sample_point_field(gw, p.horizon, rng);
                CoupledConfig at_T =
                    evolve(pair, omega, {p.horizon}).snapshots[0].second;

                std::vector<double> diff;
                std::set_difference(at_T.line(1).positions().begin(),
                                    at_T.line(1).positions().end(),
                                    at_T.line(0).positions().begin(),
                                    at_T.line(0).positions().end(),
                                    std::back_inserter(diff));
                if (diff.size() != 1)
                    throw Error("shock: discrepancy count is not one");
                double xt = diff[0];

                const auto& pos = at_T.line(0).positions();
                auto first_geq = [&](double v) {
                    return std::lower_bound(pos.begin(), pos.end(), v);
                };
                auto first_gt = [&](double v) {
                    return std::upper_bound(pos.begin(), pos.end(), v);
                };
                // [xt - w, xt) and (xt, xt + w]
                lefts[r] =
                    static_cast<double>(first_geq(xt) - first_geq(xt - w)) / w;
                rights[r] =
                    static_cast<double>(first_gt(xt + w) - first_gt(xt)) / w;
                break;
            }
        });
        left_mean = 0.0;
        right_mean = 0.0;
        for (std::size_t r = 0; r < p.replicas; ++r) {
            left_mean += lefts[r];
            right_mean += rights[r];
        }
        left_mean /= static_cast<double>(p.replicas);
        right_mean /= static_cast<double>(p.replicas);
    };

    double la = 0, ra = 0, lb = 0, rb = 0;
    run_reading(ShockReading::second_class_right, 9, la, ra);
    run_reading(ShockReading::first_class_right, 10, lb, rb);

    rep.tests.push_back({"reading_a_left_density", p.replicas, la, 1.0});
    rep.tests.push_back({"reading_a_right_density", p.replicas, ra, 1.0});
    rep.tests.push_back({"reading_b_left_density", p.replicas, lb, 1.0});
    rep.tests.push_back({"reading_b_right_density", p.replicas, rb, 1.0});

    bool left_ok = std::abs(la - left_target) <= 0.10 * left_target;
    bool right_ok = std::abs(ra - right_target_a) <= 0.10 * right_target_a;
    rep.verdicts.push_back({"reading_a_left_density",
                            "mean density within 10% of the left rate", la,
                            left_ok});
    rep.verdicts.push_back({"reading_a_right_density",
                            "mean density within 10% of the right rate", ra,
                            right_ok});
    // reading B is reported, not asserted
    rep.verdicts.push_back({"reading_b_reported",
                            "left/right densities recorded for comparison",
                            rb > 0.0 && lb > 0.0 ? 1.0 : 0.0, true});
    (void)right_target_b;
    rep.runtime_s = timer.seconds();
    return rep;
}

inline ExperimentParams defaults_for(const std::string& name) {
    ExperimentParams p;
    if (name == "burke") {
        p.window = 1e5;
        p.warmup_fraction = 0.2;
        p.lambda = 0.5;
        p.rho = 1.0;
        p.replicas = 100;
    } else if (name == "invariance") {
        p.cycle = 100.0;
        p.counts = {30, 60};
        p.horizon = 20.0;
        p.samples = 2000;
        p.meta_replicas = 100;
    } else if (name == "convergence") {
        p.cycle = 100.0;
        p.counts = {30, 60};
        p.late_time = 50.0;
        p.samples = 2000;
        p.meta_replicas = 100;
    } else if (name == "multiclass-burke") {
        p.cycle = 100.0;
        p.counts = {20, 40, 60};
        p.counts_alt = {20, 40};
        p.samples = 2000;
        p.meta_replicas = 100;
    } else if (name == "dual-points") {
        p.cycle = 100.0;
        p.counts = {50};
        p.horizon = 50.0;
        p.replicas = 100;
    } else if (name == "regeneration") {
        p.cycle = 4000.0;
        p.rates = {0.5, 1.0};
        p.replicas = 100;
        p.corr_width = 20.0;
    } else if (name == "coalescence") {
        p.cycle = 100.0;
        p.counts = {50};
        p.horizon = 1e4;
        p.replicas = 200;
    } else if (name == "shock") {
        p.window = 400.0;
        p.rates = {0.5, 1.0};
        p.horizon = 20.0;
        p.measure_width = 30.0;
        p.replicas = 200;
    } else {
        throw UnknownExperiment("unknown experiment: " + name);
    }
    return p;
}

inline ExperimentReport run_experiment(const std::string& name,
                                       const ExperimentParams& params,
                                       std::uint64_t seed) {
    if (name == "burke") return run_burke(params, seed);
    if (name == "invariance") return run_invariance(params, seed);
    if (name == "convergence") return run_convergence(params, seed);
    if (name == "multiclass-burke") return run_multiclass_burke(params, seed);
    if (name == "dual-points") return run_dual_points(params, seed);
    if (name == "regeneration") return run_regeneration(params, seed);
    if (name == "coalescence") return run_coalescence(params, seed);
    if (name == "shock") return run_shock(params, seed);
    throw UnknownExperiment("unknown experiment: " + name);
}

}  // namespace hadq
