#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "multiline.hpp"
#include "point_field.hpp"
#include "queueing.hpp"

namespace hadq {

// One HAD jump: the nearest particle left of x (wrapping on a cycle)
// moves to x.
inline Configuration had_step(const Configuration& eta, double x) {
    auto pos = eta.positions();
    detail::had_jump_inplace(eta.geometry(), pos, x);
    return Configuration::unchecked(eta.geometry(), std::move(pos));
}

// Basic coupling: every line jumps at the same point independently.
inline CoupledConfig coupled_step(const CoupledConfig& eta, double x) {
    std::vector<Configuration> lines;
    lines.reserve(eta.num_lines());
    for (const auto& line : eta.lines()) lines.push_back(had_step(line, x));
    return CoupledConfig(std::move(lines));
}

// Multiclass jump through the coupled representation.
inline MulticlassConfig multiclass_step(const MulticlassConfig& xi, double x) {
    return collapse_classes(coupled_step(expand_classes(xi), x));
}

struct MultiLineStepResult {
    MultiLineConfig state;
    // cascade[k] is the pre-jump position of the particle that moved on
    // line k+1.
    std::vector<double> cascade;
};

// Multi-line jump: the point hits the bottom line n, and each lower line
// k receives the position vacated on line k+1.
inline MultiLineStepResult multiline_step(const MultiLineConfig& alpha,
                                          double x) {
    const Geometry& g = alpha.geometry();
    std::vector<std::vector<double>> lines;
    lines.reserve(alpha.num_lines());
    for (const auto& line : alpha.lines()) lines.push_back(line.positions());

    std::vector<double> cascade(lines.size());
    double target = x;
    for (std::size_t k = lines.size(); k-- > 0;) {
        target = detail::had_jump_inplace(g, lines[k], target);
        cascade[k] = target;
    }
    std::vector<Configuration> out;
    out.reserve(lines.size());
    for (auto& v : lines) out.push_back(Configuration::unchecked(g, std::move(v)));
    return {MultiLineConfig(std::move(out)), std::move(cascade)};
}

// Reverse multi-line jump: the point hits line 1 from the left and
// vacated positions cascade upward; inverse of multiline_step.
inline MultiLineStepResult multiline_reverse_step(const MultiLineConfig& alpha,
                                                  double y) {
    const Geometry& g = alpha.geometry();
    std::vector<std::vector<double>> lines;
    lines.reserve(alpha.num_lines());
    for (const auto& line : alpha.lines()) lines.push_back(line.positions());

    std::vector<double> cascade(lines.size());
    double target = y;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        target = detail::left_drift_jump_inplace(g, lines[k], target);
        cascade[k] = target;
    }
    std::vector<Configuration> out;
    out.reserve(lines.size());
    for (auto& v : lines) out.push_back(Configuration::unchecked(g, std::move(v)));
    return {MultiLineConfig(std::move(out)), std::move(cascade)};
}

// Deterministic evolution record: snapshots at requested times plus the
// pre-jump position of every jump, per line. dual_lines[k] drives line k
// when the run follows the multi-line rule (line n is driven by the
// applied points themselves).
template <typename State>
struct Trajectory {
    State initial;
    PointField applied;
    std::vector<std::pair<double, State>> snapshots;
    std::vector<PointField> dual_lines;
};

namespace detail {

class EvolveCore {
public:
    EvolveCore(Geometry g, std::vector<std::vector<double>> lines, bool cascade)
        : g_(g), lines_(std::move(lines)), cascade_(cascade),
          duals_(lines_.size()) {}

    const Geometry& geometry() const { return g_; }
    const std::vector<std::vector<double>>& lines() const { return lines_; }

    void apply(const SpaceTimePoint& p) {
        bool any = false;
        if (cascade_) {
            double target = p.x;
            for (std::size_t k = lines_.size(); k-- > 0;) {
                if (!jump_line(k, target, p.t)) break;
                target = duals_[k].back().x;
                any = true;
            }
        } else {
            for (std::size_t k = 0; k < lines_.size(); ++k)
                any = jump_line(k, p.x, p.t) || any;
        }
        if (any) applied_.push_back(p);
    }

    PointField applied_field() const {
        return PointField::unchecked(g_, applied_);
    }

    std::vector<PointField> dual_fields() const {
        std::vector<PointField> out;
        out.reserve(duals_.size());
        for (const auto& d : duals_) out.push_back(PointField::unchecked(g_, d));
        return out;
    }

private:
    // Returns false when the point moves nothing on this line, which can
    // only happen on an interval window (the jumper would live outside
    // the window); such points are skipped there.
    bool jump_line(std::size_t k, double target, double t) {
        auto& ln = lines_[k];
        if (ln.empty())
            throw EmptyConfiguration("evolve: line emptied during evolution");
        if (!g_.is_cycle()) {
            auto it = std::lower_bound(ln.begin(), ln.end(), target);
            if (it != ln.end() && *it == target)
                throw PositionCollision("evolve: point hits an occupied position");
            if (it == ln.begin()) return false;
        }
        double u = had_jump_inplace(g_, ln, target);
        duals_[k].push_back({u, t});
        return true;
    }

    Geometry g_;
    std::vector<std::vector<double>> lines_;
    bool cascade_;
    std::vector<std::vector<SpaceTimePoint>> duals_;
    std::vector<SpaceTimePoint> applied_;
};

inline void require_snapshot_times(const std::vector<double>& ts) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0.0)
            throw InvalidParameters("evolve: negative snapshot time");
        if (i > 0 && !(ts[i - 1] < ts[i]))
            throw InvalidParameters("evolve: snapshot times must increase");
    }
}

template <typename State, typename Wrap>
Trajectory<State> evolve_core(const State& initial,
                              std::vector<std::vector<double>> lines,
                              bool cascade, const PointField& field,
                              const std::vector<double>& snapshot_times,
                              Wrap&& wrap) {
    require_snapshot_times(snapshot_times);
    EvolveCore core(field.geometry(), std::move(lines), cascade);

    Trajectory<State> out{initial, PointField(field.geometry()), {}, {}};
    const auto& pts = field.points();
    std::size_t pi = 0;
    for (double s : snapshot_times) {
        while (pi < pts.size() && pts[pi].t <= s) core.apply(pts[pi++]);
        out.snapshots.emplace_back(s, wrap(core));
    }
    while (pi < pts.size()) core.apply(pts[pi++]);

    out.applied = core.applied_field();
    out.dual_lines = core.dual_fields();
    return out;
}

inline std::vector<std::vector<double>> line_vectors(
    const std::vector<Configuration>& lines) {
    std::vector<std::vector<double>> out;
    out.reserve(lines.size());
    for (const auto& l : lines) out.push_back(l.positions());
    return out;
}

}  // namespace detail

inline Trajectory<Configuration> evolve(const Configuration& eta,
                                        const PointField& field,
                                        const std::vector<double>& snapshot_times) {
    require_same_geometry(eta.geometry(), field.geometry(), "evolve");
    return detail::evolve_core(
        eta, {eta.positions()}, false, field, snapshot_times,
        [&](const detail::EvolveCore& c) {
            return Configuration::unchecked(c.geometry(), c.lines()[0]);
        });
}

inline Trajectory<CoupledConfig> evolve(const CoupledConfig& eta,
                                        const PointField& field,
                                        const std::vector<double>& snapshot_times) {
    require_same_geometry(eta.geometry(), field.geometry(), "evolve");
    return detail::evolve_core(
        eta, detail::line_vectors(eta.lines()), false, field, snapshot_times,
        [&](const detail::EvolveCore& c) {
            std::vector<Configuration> ls;
            ls.reserve(c.lines().size());
            for (const auto& v : c.lines())
                ls.push_back(Configuration::unchecked(c.geometry(), v));
            return CoupledConfig(std::move(ls));
        });
}

inline Trajectory<MultiLineConfig> evolve(const MultiLineConfig& alpha,
                                          const PointField& field,
                                          const std::vector<double>& snapshot_times) {
    require_same_geometry(alpha.geometry(), field.geometry(), "evolve");
    return detail::evolve_core(
        alpha, detail::line_vectors(alpha.lines()), true, field, snapshot_times,
        [&](const detail::EvolveCore& c) {
            std::vector<Configuration> ls;
            ls.reserve(c.lines().size());
            for (const auto& v : c.lines())
                ls.push_back(Configuration::unchecked(c.geometry(), v));
            return MultiLineConfig(std::move(ls));
        });
}

// Multiclass evolution runs the coupled representation and collapses at
// each snapshot, so the defining identity with the coupled process holds
// by construction. Dual points are those of the coupled lines.
inline Trajectory<MulticlassConfig> evolve(const MulticlassConfig& xi,
                                           const PointField& field,
                                           const std::vector<double>& snapshot_times) {
    require_same_geometry(xi.geometry(), field.geometry(), "evolve");
    Trajectory<CoupledConfig> cc =
        evolve(expand_classes(xi), field, snapshot_times);
    Trajectory<MulticlassConfig> out{xi, std::move(cc.applied), {},
                                     std::move(cc.dual_lines)};
    out.snapshots.reserve(cc.snapshots.size());
    for (auto& [t, state] : cc.snapshots)
        out.snapshots.emplace_back(t, collapse_classes(state));
    return out;
}

}  // namespace hadq
