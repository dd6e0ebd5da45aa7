#pragma once

#include <algorithm>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "point_field.hpp"
#include "rng.hpp"

namespace hadq {

// Poisson process of the given rate restricted to the domain, built from
// cumulative exponential gaps (count is Poisson(rate * length), positions
// conditionally uniform).
inline Configuration sample_configuration(double rate, const Geometry& g,
                                          RngStream& rng) {
    if (!(rate > 0.0))
        throw InvalidParameters("sample_configuration: rate must be positive");
    std::vector<double> pos;
    double x = g.lo + rng.exponential(rate);
    while (x < g.hi()) {
        pos.push_back(x);
        x += rng.exponential(rate);
    }
    return Configuration::unchecked(g, std::move(pos));
}

// Exactly `count` particles: uniform order statistics.
inline Configuration sample_configuration(std::size_t count, const Geometry& g,
                                          RngStream& rng) {
    std::vector<double> pos;
    pos.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        pos.push_back(g.lo + g.length * rng.uniform01());
    std::sort(pos.begin(), pos.end());
    for (std::size_t i = 1; i < pos.size(); ++i)
        if (pos[i - 1] == pos[i])
            throw PositionCollision("sample_configuration: coincident draw");
    return Configuration::unchecked(g, std::move(pos));
}

// Rate-1 space-time Poisson points on domain x [0, horizon], ordered by
// time via cumulative exponential inter-event gaps.
inline PointField sample_point_field(const Geometry& g, double horizon,
                                     RngStream& rng) {
    if (horizon < 0.0)
        throw InvalidParameters("sample_point_field: negative horizon");
    std::vector<SpaceTimePoint> pts;
    double t = rng.exponential(g.length);
    while (t <= horizon) {
        pts.push_back({g.lo + g.length * rng.uniform01(), t});
        t += rng.exponential(g.length);
    }
    return PointField::unchecked(g, std::move(pts));
}

}  // namespace hadq
