#pragma once

#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace hadq {

struct SpaceTimePoint {
    double x;
    double t;

    friend bool operator==(const SpaceTimePoint& a, const SpaceTimePoint& b) {
        return a.x == b.x && a.t == b.t;
    }
};

// A finite space-time point set, strictly ordered by time. Forward runs
// use t >= 0.
class PointField {
public:
    PointField() = default;

    explicit PointField(Geometry geometry) : geom_(geometry) {}

    PointField(Geometry geometry, std::vector<SpaceTimePoint> points)
        : geom_(geometry), pts_(std::move(points)) {
        validate();
    }

    static PointField unchecked(Geometry geometry,
                                std::vector<SpaceTimePoint> points) {
        PointField f;
        f.geom_ = geometry;
        f.pts_ = std::move(points);
        return f;
    }

    const Geometry& geometry() const { return geom_; }
    const std::vector<SpaceTimePoint>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }

    // Points with time in (t0, t1], shifted so the slice starts at time 0.
    // This is the time translation that restarts a run from time t0.
    PointField sliced_and_shifted(double t0, double t1) const {
        std::vector<SpaceTimePoint> out;
        for (const auto& p : pts_)
            if (p.t > t0 && p.t <= t1) out.push_back({p.x, p.t - t0});
        return PointField::unchecked(geom_, std::move(out));
    }

    friend bool operator==(const PointField& a, const PointField& b) {
        return a.geom_ == b.geom_ && a.pts_ == b.pts_;
    }
    friend bool operator!=(const PointField& a, const PointField& b) {
        return !(a == b);
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (!geom_.contains(pts_[i].x))
                throw InvalidParameters("point field: position outside domain");
            if (pts_[i].t < 0.0)
                throw InvalidParameters("point field: negative time");
            if (i > 0 && !(pts_[i - 1].t < pts_[i].t))
                throw PositionCollision(
                    "point field: times must be strictly increasing");
        }
    }

    Geometry geom_;
    std::vector<SpaceTimePoint> pts_;
};

}  // namespace hadq
