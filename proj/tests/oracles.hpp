// Independent reference implementations used only by the test suites.
// They follow the plainest possible route (explicit customer queues,
// periodic unrolling) so that agreement with the library is meaningful.
#pragma once

#include <algorithm>
#include <deque>
#include <utility>
#include <vector>

#include "hadq/configuration.hpp"
#include "hadq/queueing.hpp"

namespace oracles {

struct Event {
    double pos;
    bool arrival;
};

inline std::vector<Event> merged_events(const std::vector<double>& A,
                                        const std::vector<double>& S) {
    std::vector<Event> ev;
    for (double a : A) ev.push_back({a, true});
    for (double s : S) ev.push_back({s, false});
    std::sort(ev.begin(), ev.end(),
              [](const Event& a, const Event& b) { return a.pos < b.pos; });
    return ev;
}

// Single-server FIFO queue on a window, simulated customer by customer
// with an explicit waiting line. Queue starts empty at the left edge.
struct FifoOracleResult {
    std::vector<double> departures;
    std::vector<double> unused;
    std::vector<std::pair<double, double>> links;  // arrival -> departure
};

inline FifoOracleResult fifo_queue_oracle(const std::vector<double>& A,
                                          const std::vector<double>& S) {
    FifoOracleResult r;
    std::deque<double> waiting;
    for (const Event& e : merged_events(A, S)) {
        if (e.arrival) {
            waiting.push_back(e.pos);
        } else if (!waiting.empty()) {
            r.links.emplace_back(waiting.front(), e.pos);
            waiting.pop_front();
            r.departures.push_back(e.pos);
        } else {
            r.unused.push_back(e.pos);
        }
    }
    return r;
}

// Minimal cyclic queue via literal periodic extension: iterate one-period
// runs, carrying the queue count across the seam, until the count at the
// seam stabilizes; the classification in the stabilized period is the
// periodic split.
inline FifoOracleResult cyclic_queue_oracle(const std::vector<double>& A,
                                            const std::vector<double>& S) {
    auto ev = merged_events(A, S);
    std::size_t carried = 0;
    for (std::size_t iter = 0; iter <= A.size() + 2; ++iter) {
        std::size_t q = carried;
        FifoOracleResult r;
        for (const Event& e : ev) {
            if (e.arrival) {
                ++q;
            } else if (q > 0) {
                --q;
                r.departures.push_back(e.pos);
            } else {
                r.unused.push_back(e.pos);
            }
        }
        if (q == carried) return r;
        carried = q;
    }
    throw std::logic_error("cyclic_queue_oracle: queue count did not stabilize");
}

inline FifoOracleResult queue_oracle(const hadq::Configuration& A,
                                     const hadq::Configuration& S) {
    if (A.geometry().is_cycle())
        return cyclic_queue_oracle(A.positions(), S.positions());
    return fifo_queue_oracle(A.positions(), S.positions());
}

// Tandem departures by chaining the plain queue oracle.
inline std::vector<double> tandem_oracle(
    const std::vector<hadq::Configuration>& lines) {
    std::vector<double> d = lines[0].positions();
    for (std::size_t k = 1; k < lines.size(); ++k) {
        auto step = lines[0].geometry().is_cycle()
                        ? cyclic_queue_oracle(d, lines[k].positions())
                        : fifo_queue_oracle(d, lines[k].positions());
        d = step.departures;
    }
    return d;
}

}  // namespace oracles
