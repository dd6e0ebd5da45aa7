#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace hadq {

// A finite particle configuration: strictly increasing positions inside
// the geometry's domain. Immutable after construction; every operation
// returns a new value.
class Configuration {
public:
    Configuration() = default;

    explicit Configuration(Geometry geometry) : geom_(geometry) {}

    Configuration(Geometry geometry, std::vector<double> positions)
        : geom_(geometry), pos_(std::move(positions)) {
        validate();
    }

    // Fast path for callers that preserve the invariants structurally.
    static Configuration unchecked(Geometry geometry,
                                   std::vector<double> positions) {
        Configuration c;
        c.geom_ = geometry;
        c.pos_ = std::move(positions);
        return c;
    }

    const Geometry& geometry() const { return geom_; }
    const std::vector<double>& positions() const { return pos_; }
    std::size_t size() const { return pos_.size(); }
    bool empty() const { return pos_.empty(); }

    bool contains(double x) const {
        return std::binary_search(pos_.begin(), pos_.end(), x);
    }

    // Greatest position strictly left of x. On a cycle the query wraps:
    // with no particle below x the rightmost particle is "to the left".
    // x must not coincide with a particle.
    double nearest_left(double x) const {
        if (pos_.empty())
            throw EmptyConfiguration("nearest_left: empty configuration");
        auto it = std::lower_bound(pos_.begin(), pos_.end(), x);
        if (it != pos_.end() && *it == x)
            throw PositionCollision("nearest_left: query hits a particle");
        if (it == pos_.begin()) {
            if (!geom_.is_cycle())
                throw NoLeftParticle("nearest_left: nothing left of query");
            return pos_.back();
        }
        return *(it - 1);
    }

    // Mirror query: smallest position strictly right of x, wrapping to
    // the minimum on a cycle.
    double nearest_right(double x) const {
        if (pos_.empty())
            throw EmptyConfiguration("nearest_right: empty configuration");
        auto it = std::lower_bound(pos_.begin(), pos_.end(), x);
        if (it != pos_.end() && *it == x)
            throw PositionCollision("nearest_right: query hits a particle");
        if (it == pos_.end()) {
            if (!geom_.is_cycle())
                throw NoRightParticle("nearest_right: nothing right of query");
            return pos_.front();
        }
        return *it;
    }

    // Translate by dx. Cycles rotate (positions re-wrapped into [0, N));
    // intervals shift their window along with the particles.
    Configuration translated(double dx) const {
        std::vector<double> p;
        p.reserve(pos_.size());
        if (geom_.is_cycle()) {
            double n = geom_.length;
            double shift = std::fmod(dx, n);
            if (shift < 0.0) shift += n;
            // Split at the wrap point to keep the result sorted.
            std::size_t cut = 0;
            while (cut < pos_.size() && pos_[cut] + shift < n) ++cut;
            for (std::size_t i = cut; i < pos_.size(); ++i)
                p.push_back(pos_[i] + shift - n);
            for (std::size_t i = 0; i < cut; ++i) p.push_back(pos_[i] + shift);
            return Configuration(geom_, std::move(p));
        }
        for (double x : pos_) p.push_back(x + dx);
        Geometry g = Geometry::interval(geom_.length, geom_.lo + dx);
        return Configuration(g, std::move(p));
    }

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.geom_ == b.geom_ && a.pos_ == b.pos_;
    }
    friend bool operator!=(const Configuration& a, const Configuration& b) {
        return !(a == b);
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < pos_.size(); ++i) {
            if (!geom_.contains(pos_[i]))
                throw InvalidParameters("configuration: position outside domain");
            if (i > 0 && !(pos_[i - 1] < pos_[i]))
                throw InvalidParameters(
                    "configuration: positions must be strictly increasing");
        }
    }

    Geometry geom_;
    std::vector<double> pos_;
};

namespace detail {

// In-place single HAD jump on a sorted position vector: the nearest
// particle left of x (wrapping on a cycle) moves to x. Returns the
// pre-jump position. The common non-wrapping case is a single store:
// the jumper occupies the slot directly below x's insertion point.
inline double had_jump_inplace(const Geometry& g, std::vector<double>& pos,
                               double x) {
    if (pos.empty()) throw EmptyConfiguration("had step: empty configuration");
    auto it = std::lower_bound(pos.begin(), pos.end(), x);
    if (it != pos.end() && *it == x)
        throw PositionCollision("had step: target position occupied");
    if (it == pos.begin()) {
        if (!g.is_cycle())
            throw NoLeftParticle("had step: no particle left of point");
        double u = pos.back();
        pos.pop_back();
        pos.insert(pos.begin(), x);
        return u;
    }
    double u = *(it - 1);
    *(it - 1) = x;
    return u;
}

// Mirror jump: nearest particle right of y (wrapping to the minimum on a
// cycle) moves to y.
inline double left_drift_jump_inplace(const Geometry& g,
                                      std::vector<double>& pos, double y) {
    if (pos.empty()) throw EmptyConfiguration("left step: empty configuration");
    auto it = std::lower_bound(pos.begin(), pos.end(), y);
    if (it != pos.end() && *it == y)
        throw PositionCollision("left step: target position occupied");
    if (it == pos.end()) {
        if (!g.is_cycle())
            throw NoRightParticle("left step: no particle right of point");
        double v = pos.front();
        pos.erase(pos.begin());
        pos.push_back(y);
        return v;
    }
    double v = *it;
    *it = y;
    return v;
}

}  // namespace detail

}  // namespace hadq
