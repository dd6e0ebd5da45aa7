#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace hadq {

enum class Color { yellow, blue, red };

struct ColoredParticle {
    double pos;
    int label;
    Color color;
};

// Two coupled copies with labeled, colored particles. Yellow particles
// are shared between the copies (one partner in each at the same
// position), blue particles live only in the first copy, red only in the
// second. Once yellow, a label stays yellow.
class ColoredPair {
public:
    ColoredPair(const Configuration& eta, const Configuration& eta_tilde)
        : geom_(eta.geometry()) {
        require_same_geometry(eta.geometry(), eta_tilde.geometry(),
                              "colored pair");
        if (eta.size() != eta_tilde.size())
            throw InvalidParameters(
                "colored pair: copies need equal particle counts so that "
                "full coalescence is reachable");
        first_ = label_side(eta, eta_tilde, Color::blue);
        second_ = label_side(eta_tilde, eta, Color::red);
    }

    const Geometry& geometry() const { return geom_; }
    const std::vector<ColoredParticle>& first() const { return first_; }
    const std::vector<ColoredParticle>& second() const { return second_; }

    Configuration first_marginal() const { return marginal(first_); }
    Configuration second_marginal() const { return marginal(second_); }

    std::size_t count(Color c) const {
        std::size_t n = 0;
        for (const auto& p : first_)
            if (p.color == c) ++n;
        for (const auto& p : second_)
            if (p.color == c) ++n;
        return c == Color::yellow ? n / 2 : n;
    }

    std::size_t red_count() const { return count(Color::red); }
    std::size_t blue_count() const { return count(Color::blue); }
    std::size_t yellow_count() const { return count(Color::yellow); }

    std::vector<ColoredParticle>& side(int s) { return s == 0 ? first_ : second_; }
    const std::vector<ColoredParticle>& side(int s) const {
        return s == 0 ? first_ : second_;
    }

private:
    static std::vector<ColoredParticle> label_side(const Configuration& own,
                                                   const Configuration& other,
                                                   Color own_color) {
        std::vector<ColoredParticle> out;
        out.reserve(own.size());
        int label = 0;
        for (double x : own.positions())
            out.push_back(
                {x, label++, other.contains(x) ? Color::yellow : own_color});
        return out;
    }

    Configuration marginal(const std::vector<ColoredParticle>& v) const {
        std::vector<double> pos;
        pos.reserve(v.size());
        for (const auto& p : v) pos.push_back(p.pos);
        return Configuration::unchecked(geom_, std::move(pos));
    }

    Geometry geom_;
    std::vector<ColoredParticle> first_;
    std::vector<ColoredParticle> second_;
};

struct ColorChange {
    int side;  // 0 = first copy, 1 = second copy
    int label;
};

struct ColoredStepResult {
    ColoredPair state;
    std::vector<ColorChange> newly_yellow;
};

namespace detail {

inline std::size_t colored_jumper_index(const Geometry& g,
                                        const std::vector<ColoredParticle>& v,
                                        double x) {
    if (v.empty()) throw EmptyConfiguration("colored step: empty configuration");
    auto it = std::lower_bound(
        v.begin(), v.end(), x,
        [](const ColoredParticle& p, double q) { return p.pos < q; });
    if (it != v.end() && it->pos == x)
        throw PositionCollision("colored step: point hits a particle");
    if (it == v.begin()) {
        if (!g.is_cycle())
            throw NoLeftParticle("colored step: no particle left of point");
        return v.size() - 1;
    }
    return static_cast<std::size_t>(it - v.begin()) - 1;
}

// Leftward cyclic distance from x.
inline double delta_left(const Geometry& g, double x, double p) {
    double d = x - p;
    if (g.is_cycle() && d < 0.0) d += g.length;
    return d;
}

inline void insert_particle(std::vector<ColoredParticle>& v,
                            ColoredParticle p) {
    auto it = std::lower_bound(
        v.begin(), v.end(), p.pos,
        [](const ColoredParticle& q, double x) { return q.pos < x; });
    v.insert(it, p);
}

// Moves the particle at index i to x without changing label or color.
inline void direct_move(std::vector<ColoredParticle>& v, std::size_t i,
                        double x) {
    ColoredParticle p = v[i];
    p.pos = x;
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
    insert_particle(v, p);
}

// Chain relay on the side whose jumper sits above the other side's
// jumper: the chain holds every same-side particle strictly inside the
// arc from `low_ref` up to the jumper. Each chain member takes the
// position of its lower neighbor; the lowest member either coalesces at
// x (turning yellow) or drops onto the vacated `low_ref` position whose
// yellow occupant carries its color to x.
inline int chain_relay(const Geometry& g, std::vector<ColoredParticle>& v,
                       double x, double low_ref, bool low_ref_vacated) {
    double cutoff = delta_left(g, x, low_ref);
    std::vector<std::size_t> chain;  // ascending by leftward distance from x
    for (std::size_t i = 0; i < v.size(); ++i)
        if (delta_left(g, x, v[i].pos) < cutoff) chain.push_back(i);
    std::sort(chain.begin(), chain.end(), [&](std::size_t a, std::size_t b) {
        return delta_left(g, x, v[a].pos) < delta_left(g, x, v[b].pos);
    });
    // chain[0] is the jumper (nearest to x), chain.back() the lowest.

    int arriving_label;
    Color arriving_color;
    if (low_ref_vacated) {
        // The yellow partner at low_ref rides to x; the lowest chain
        // member backfills the vacated slot.
        auto it = std::lower_bound(
            v.begin(), v.end(), low_ref,
            [](const ColoredParticle& q, double p) { return q.pos < p; });
        if (it == v.end() || it->pos != low_ref || it->color != Color::yellow)
            throw Error("colored step: expected a yellow partner below");
        arriving_label = it->label;
        arriving_color = Color::yellow;
        ColoredParticle lowest = v[chain.back()];
        it->label = lowest.label;
        it->color = lowest.color;
    } else {
        // Coalescence: the lowest chain member overtakes the chain and
        // turns yellow at x.
        arriving_label = v[chain.back()].label;
        arriving_color = Color::yellow;
    }

    // Shift labels/colors one slot toward the low end of the chain.
    for (std::size_t j = chain.size(); j-- > 1;) {
        v[chain[j]].label = v[chain[j - 1]].label;
        v[chain[j]].color = v[chain[j - 1]].color;
    }

    // The jumper's slot disappears; x joins with the arriving identity.
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(chain[0]));
    insert_particle(v, {x, arriving_label, arriving_color});
    return arriving_label;
}

}  // namespace detail

namespace detail {

// Moves the particle at index i to x and recolors it yellow.
inline void move_and_yellow(std::vector<ColoredParticle>& v, std::size_t i,
                            double x) {
    ColoredParticle p = v[i];
    p.pos = x;
    p.color = Color::yellow;
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
    insert_particle(v, p);
}

}  // namespace detail

// One bell at x for the colored coupled pair. Both marginals perform the
// plain HAD jump; labels and colors follow the relay rules so that a
// label never loses yellow and blue/red labels never overpass.
inline ColoredStepResult colored_step(const ColoredPair& state, double x) {
    ColoredStepResult out{state, {}};
    const Geometry& g = state.geometry();
    auto& eta = out.state.side(0);
    auto& tld = out.state.side(1);

    std::size_t ib = detail::colored_jumper_index(g, eta, x);
    std::size_t ir = detail::colored_jumper_index(g, tld, x);

    const ColoredParticle jb = eta[ib];
    const ColoredParticle jr = tld[ir];

    if (jb.color == Color::yellow && jr.color == Color::yellow) {
        // shared pair jumps jointly
        if (jb.pos != jr.pos)
            throw Error("colored step: yellow partners disagree on position");
        detail::direct_move(eta, ib, x);
        detail::direct_move(tld, ir, x);
        return out;
    }

    double db = detail::delta_left(g, x, jb.pos);
    double dr = detail::delta_left(g, x, jr.pos);

    if (jb.color == Color::blue && jr.color == Color::red) {
        // blue-red coalescence; the relay chain lives on the side whose
        // jumper is nearer to x, and its lowest member meets the other
        // side's jumper at x
        if (db < dr) {
            detail::move_and_yellow(tld, ir, x);
            out.newly_yellow.push_back({1, jr.label});
            int lbl = detail::chain_relay(g, eta, x, jr.pos, false);
            out.newly_yellow.push_back({0, lbl});
        } else {
            detail::move_and_yellow(eta, ib, x);
            out.newly_yellow.push_back({0, jb.label});
            int lbl = detail::chain_relay(g, tld, x, jb.pos, false);
            out.newly_yellow.push_back({1, lbl});
        }
        return out;
    }

    // one side's jumper is yellow and sits below the other side's jumper
    if (jr.color == Color::yellow) {
        // the shared pair at jr.pos rides to x; blues relay on the first copy
        detail::direct_move(tld, ir, x);
        detail::chain_relay(g, eta, x, jr.pos, true);
    } else {
        detail::direct_move(eta, ib, x);
        detail::chain_relay(g, tld, x, jb.pos, true);
    }
    return out;
}

struct CoalescencePoint {
    double time;
    std::size_t red;
    std::size_t blue;
    std::size_t yellow;
};

struct CoalescenceRun {
    std::vector<CoalescencePoint> series;
    bool absorbed = false;
    double absorption_time = std::numeric_limits<double>::infinity();
    // first time each label turned yellow (infinity when it never did)
    std::vector<double> first_yellow_first;
    std::vector<double> first_yellow_second;
};

// Runs two independently sampled copies of `count` particles under a
// common bell stream until every particle pair has coalesced or the
// horizon is reached. The series records (time, red, blue, yellow) at the
// start and after every count change.
inline CoalescenceRun coalescence_run(std::size_t count, double cycle_length,
                                      double horizon, RngStream& rng) {
    if (count < 1)
        throw InvalidParameters("coalescence_run: need at least one particle");
    Geometry g = Geometry::cycle(cycle_length);
    Configuration eta = sample_configuration(count, g, rng);
    Configuration tld = sample_configuration(count, g, rng);
    ColoredPair state(eta, tld);

    CoalescenceRun run;
    run.first_yellow_first.assign(count,
                                  std::numeric_limits<double>::infinity());
    run.first_yellow_second.assign(count,
                                   std::numeric_limits<double>::infinity());
    for (const auto& p : state.first())
        if (p.color == Color::yellow) run.first_yellow_first[p.label] = 0.0;
    for (const auto& p : state.second())
        if (p.color == Color::yellow) run.first_yellow_second[p.label] = 0.0;

    run.series.push_back(
        {0.0, state.red_count(), state.blue_count(), state.yellow_count()});
    if (state.red_count() == 0) {
        run.absorbed = true;
        run.absorption_time = 0.0;
        return run;
    }

    double t = rng.exponential(cycle_length);
    while (t <= horizon) {
        double x = rng.uniform(0.0, cycle_length);
        ColoredStepResult step = colored_step(state, x);
        state = std::move(step.state);
        if (!step.newly_yellow.empty()) {
            for (const auto& ch : step.newly_yellow) {
                auto& log = ch.side == 0 ? run.first_yellow_first
                                         : run.first_yellow_second;
                if (std::isinf(log[ch.label])) log[ch.label] = t;
            }
            run.series.push_back({t, state.red_count(), state.blue_count(),
                                  state.yellow_count()});
            if (state.red_count() == 0) {
                run.absorbed = true;
                run.absorption_time = t;
                return run;
            }
        }
        t += rng.exponential(cycle_length);
    }
    return run;
}

}  // namespace hadq
