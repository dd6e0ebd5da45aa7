#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "multiline.hpp"

namespace hadq {

// Result of splitting a service configuration by an arrival configuration:
// departures are services consumed by a customer, unused services are the
// record-down times of the walk. Always a partition of the services.
struct SplitDU {
    Configuration departures;
    Configuration unused;
};

enum class QueueEventKind { arrival, departure, unused };

struct QueueEvent {
    double time;
    long walk;               // walk value just after the event, base 0 at domain start
    std::vector<int> queue;  // per-class customer counts just after the event
    QueueEventKind kind;
    int cls;  // 0-based class for arrivals/departures, -1 for unused services
};

// Piecewise-constant queue path; events sorted by time (= position).
struct QueueTrajectory {
    std::size_t num_classes = 0;
    std::vector<QueueEvent> events;

    int queue_total(std::size_t event_index) const {
        int s = 0;
        for (int q : events[event_index].queue) s += q;
        return s;
    }
};

struct FifoLink {
    double arrival;
    double departure;
    int cls;
};

// Order-preserving arrival/departure matching under first-in-first-out
// service within each class. Links are grouped by class in queue order
// (on a cycle: starting from the point where the minimal queue is empty).
struct FifoMatching {
    std::vector<FifoLink> links;
};

namespace detail {

struct StageEvent {
    double pos;
    int cls;  // arrival class >= 0, or -1 for a service
};

inline std::vector<StageEvent> merge_stage_events(
    const std::vector<Configuration>& arrivals, const Configuration& services,
    const char* what) {
    for (const auto& a : arrivals)
        require_same_geometry(a.geometry(), services.geometry(), what);
    std::vector<StageEvent> ev;
    std::size_t total = services.size();
    for (const auto& a : arrivals) total += a.size();
    ev.reserve(total);
    for (std::size_t c = 0; c < arrivals.size(); ++c)
        for (double x : arrivals[c].positions())
            ev.push_back({x, static_cast<int>(c)});
    for (double x : services.positions()) ev.push_back({x, -1});
    std::sort(ev.begin(), ev.end(),
              [](const StageEvent& a, const StageEvent& b) { return a.pos < b.pos; });
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (ev[i - 1].pos == ev[i].pos)
            throw PositionCollision(std::string(what) +
                                    ": coincident arrival/service positions");
    return ev;
}

// First position-order event at which the one-period walk attains its
// minimum. The minimal periodic queue is empty just after it, so a single
// cyclic sweep from there realizes the whole path.
inline std::size_t cyclic_restart_index(const std::vector<StageEvent>& ev) {
    long z = 0;
    long zmin = std::numeric_limits<long>::max();
    std::size_t idx = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        z += ev[i].cls >= 0 ? 1 : -1;
        if (z < zmin) {
            zmin = z;
            idx = i;
        }
    }
    return idx;
}

// Visits the stage events in queue order (position order on an interval,
// cyclically from the empty point on a cycle) and reports each one to
// `visit(event_index, event)`, maintaining nothing itself.
template <typename Visit>
inline void sweep_in_queue_order(const Geometry& g,
                                 const std::vector<StageEvent>& ev,
                                 Visit&& visit) {
    const std::size_t m = ev.size();
    if (m == 0) return;
    const std::size_t start = g.is_cycle() ? (cyclic_restart_index(ev) + 1) % m : 0;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t i = (start + j) % m;
        visit(i, ev[i]);
    }
}

inline std::vector<double> sorted_set_difference(const std::vector<double>& a,
                                                 const std::vector<double>& b) {
    std::vector<double> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
    return out;
}

inline std::vector<double> sorted_set_union(const std::vector<double>& a,
                                            const std::vector<double>& b,
                                            const char* what) {
    std::vector<double> out;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i - 1] == out[i])
            throw PositionCollision(std::string(what) + ": sets overlap");
    return out;
}

}  // namespace detail

// Splits services S into departures and unused services against arrivals
// A: unused services are the strict record-down times of the walk that
// steps up at arrivals and down at services, departures are the rest.
// Intervals take the walk to be 0 at the left edge (queue started empty);
// cycles use the periodic extension, whose records are realized by one
// sweep from the walk's one-period minimum, and require |S| > |A|.
inline SplitDU split_departures_unused(const Configuration& A,
                                       const Configuration& S) {
    require_same_geometry(A.geometry(), S.geometry(), "split");
    const Geometry& g = A.geometry();
    if (g.is_cycle() && S.size() <= A.size())
        throw UnstableQueue("cyclic split: requires more services than arrivals");
    auto ev = detail::merge_stage_events({A}, S, "split");

    std::vector<char> is_unused(ev.size(), 0);
    long z = 0;
    long record = 0;  // inf of the walk over everything strictly earlier
    detail::sweep_in_queue_order(g, ev, [&](std::size_t i, const detail::StageEvent& e) {
        if (e.cls >= 0) {
            ++z;
        } else {
            --z;
            if (z < record) {
                record = z;
                is_unused[i] = 1;
            }
        }
    });

    std::vector<double> dep, unu;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].cls >= 0) continue;
        (is_unused[i] ? unu : dep).push_back(ev[i].pos);
    }
    return SplitDU{Configuration::unchecked(g, std::move(dep)),
                   Configuration::unchecked(g, std::move(unu))};
}

// Full queue path for multiclass arrivals with priority service: at a
// service time the lowest nonempty class departs; all classes empty means
// an unused service.
inline QueueTrajectory queue_trajectory(const std::vector<Configuration>& arrivals,
                                        const Configuration& services) {
    if (arrivals.empty())
        throw InvalidParameters("queue_trajectory: needs at least one arrival class");
    const Geometry& g = services.geometry();
    auto ev = detail::merge_stage_events(arrivals, services, "queue_trajectory");
    if (g.is_cycle()) {
        std::size_t total_arrivals = ev.size() - services.size();
        if (services.size() <= total_arrivals)
            throw UnstableQueue(
                "cyclic queue: requires more services than arrivals");
    }

    const std::size_t ncls = arrivals.size();
    std::vector<int> q(ncls, 0);
    QueueTrajectory traj;
    traj.num_classes = ncls;
    traj.events.resize(ev.size());
    detail::sweep_in_queue_order(g, ev, [&](std::size_t i, const detail::StageEvent& e) {
        QueueEvent& out = traj.events[i];
        out.time = e.pos;
        if (e.cls >= 0) {
            ++q[e.cls];
            out.kind = QueueEventKind::arrival;
            out.cls = e.cls;
        } else {
            int serve = -1;
            for (std::size_t c = 0; c < ncls; ++c)
                if (q[c] > 0) {
                    serve = static_cast<int>(c);
                    break;
                }
            if (serve >= 0) {
                --q[serve];
                out.kind = QueueEventKind::departure;
                out.cls = serve;
            } else {
                out.kind = QueueEventKind::unused;
                out.cls = -1;
            }
        }
        out.queue = q;
    });

    long z = 0;
    for (auto& e : traj.events) {
        z += e.kind == QueueEventKind::arrival ? 1 : -1;
        e.walk = z;
    }
    return traj;
}

// Positions extracted from a trajectory.
inline Configuration trajectory_departures(const QueueTrajectory& traj,
                                           const Geometry& g, int cls = -1) {
    std::vector<double> out;
    for (const auto& e : traj.events)
        if (e.kind == QueueEventKind::departure && (cls < 0 || e.cls == cls))
            out.push_back(e.time);
    return Configuration::unchecked(g, std::move(out));
}

inline Configuration trajectory_unused(const QueueTrajectory& traj,
                                       const Geometry& g) {
    std::vector<double> out;
    for (const auto& e : traj.events)
        if (e.kind == QueueEventKind::unused) out.push_back(e.time);
    return Configuration::unchecked(g, std::move(out));
}

// Departures of a tandem of queues: line 1 arrives at a queue served by
// line 2, whose departures arrive at a queue served by line 3, and so on.
inline Configuration tandem_departures(const std::vector<Configuration>& lines) {
    if (lines.empty())
        throw InvalidParameters("tandem_departures: needs at least one line");
    Configuration d = lines[0];
    for (std::size_t k = 1; k < lines.size(); ++k)
        d = split_departures_unused(d, lines[k]).departures;
    return d;
}

// The map C: line k of the result is the tandem departure process of
// lines k..n of the input. Lines come out nested.
inline CoupledConfig build_coupled(const MultiLineConfig& alpha) {
    const std::size_t n = alpha.num_lines();
    std::vector<Configuration> eta(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<Configuration> suffix(alpha.lines().begin() + k,
                                          alpha.lines().end());
        eta[k] = tandem_departures(suffix);
    }
    return CoupledConfig(std::move(eta));
}

// The map R: classes are successive differences of the nested lines.
inline MulticlassConfig collapse_classes(const CoupledConfig& eta) {
    std::vector<Configuration> xi;
    xi.reserve(eta.num_lines());
    std::vector<double> prev;
    for (const auto& line : eta.lines()) {
        xi.push_back(Configuration::unchecked(
            eta.geometry(), detail::sorted_set_difference(line.positions(), prev)));
        prev = line.positions();
    }
    return MulticlassConfig(std::move(xi));
}

// R^{-1}: line k is the union of classes 1..k.
inline CoupledConfig expand_classes(const MulticlassConfig& xi) {
    std::vector<Configuration> eta;
    eta.reserve(xi.num_classes());
    std::vector<double> acc;
    for (const auto& cls : xi.classes()) {
        acc = detail::sorted_set_union(acc, cls.positions(), "expand_classes");
        eta.push_back(Configuration::unchecked(xi.geometry(), acc));
    }
    return CoupledConfig(std::move(eta));
}

// The map M = R o C.
inline MulticlassConfig map_multiclass(const MultiLineConfig& alpha) {
    return collapse_classes(build_coupled(alpha));
}

// One stage of the priority-queue recursion: customers of classes
// 1..k-1 arrive and are served by `services` in class order; outputs
// partition the services into per-class departures plus the unused rest.
struct ClassSplit {
    std::vector<Configuration> departures;  // one per arrival class
    Configuration unused;
};

inline ClassSplit class_departures(const std::vector<Configuration>& arrivals,
                                   const Configuration& services) {
    const Geometry& g = services.geometry();
    QueueTrajectory traj = queue_trajectory(arrivals, services);

    ClassSplit out;
    out.departures.reserve(arrivals.size());
    for (std::size_t c = 0; c < arrivals.size(); ++c)
        out.departures.push_back(
            trajectory_departures(traj, g, static_cast<int>(c)));
    out.unused = trajectory_unused(traj, g);

    // The unused services must coincide with the record-down times of the
    // merged single-class walk; the recursion relies on this identity.
    std::vector<double> merged;
    for (const auto& a : arrivals)
        merged = detail::sorted_set_union(merged, a.positions(),
                                          "class_departures");
    SplitDU check = split_departures_unused(
        Configuration::unchecked(g, std::move(merged)), services);
    if (check.unused != out.unused)
        throw Error(
            "class_departures: priority unused services deviate from the "
            "merged-walk record-down set");
    return out;
}

// M computed through the stagewise priority-queue recursion instead of
// R o C: stage k serves the previous stage's departures.
inline MulticlassConfig multiclass_via_recursion(const MultiLineConfig& alpha) {
    std::vector<Configuration> xi = {alpha.line(0)};
    for (std::size_t k = 1; k < alpha.num_lines(); ++k) {
        ClassSplit cs = class_departures(xi, alpha.line(k));
        xi = std::move(cs.departures);
        xi.push_back(std::move(cs.unused));
    }
    return MulticlassConfig(std::move(xi));
}

// FIFO arrival/departure links, one class at a time in queue order.
inline FifoMatching fifo_links(const std::vector<Configuration>& arrivals,
                               const Configuration& services) {
    const Geometry& g = services.geometry();
    auto ev = detail::merge_stage_events(arrivals, services, "fifo_links");
    if (g.is_cycle()) {
        std::size_t total_arrivals = ev.size() - services.size();
        if (services.size() <= total_arrivals)
            throw UnstableQueue("fifo_links: requires more services than arrivals");
    }

    std::vector<std::deque<double>> waiting(arrivals.size());
    std::vector<std::vector<FifoLink>> per_class(arrivals.size());
    detail::sweep_in_queue_order(g, ev, [&](std::size_t, const detail::StageEvent& e) {
        if (e.cls >= 0) {
            waiting[e.cls].push_back(e.pos);
            return;
        }
        for (auto& w : waiting)
            if (!w.empty()) {
                int c = static_cast<int>(&w - waiting.data());
                per_class[c].push_back({w.front(), e.pos, c});
                w.pop_front();
                return;
            }
    });

    FifoMatching m;
    for (auto& links : per_class)
        m.links.insert(m.links.end(), links.begin(), links.end());
    return m;
}

inline FifoMatching fifo_links(const Configuration& A, const Configuration& S) {
    return fifo_links(std::vector<Configuration>{A}, S);
}

}  // namespace hadq
