#pragma once

#include <string>

#include "errors.hpp"

namespace hadq {

enum class GeometryKind { cycle, interval };

// Spatial substrate for configurations and point fields. A cycle of
// circumference `length` covers [0, length) with wrap-around; an interval
// covers [lo, lo + length) with hard edges. The `lo` offset exists so
// that a window can be recentred at an origin particle (shock runs);
// cycles always start at 0.
struct Geometry {
    GeometryKind kind = GeometryKind::cycle;
    double length = 1.0;
    double lo = 0.0;

    static Geometry cycle(double circumference) {
        if (!(circumference > 0.0))
            throw InvalidParameters("cycle circumference must be positive");
        return Geometry{GeometryKind::cycle, circumference, 0.0};
    }

    static Geometry interval(double length, double lo = 0.0) {
        if (!(length > 0.0))
            throw InvalidParameters("interval length must be positive");
        return Geometry{GeometryKind::interval, length, lo};
    }

    bool is_cycle() const { return kind == GeometryKind::cycle; }
    double hi() const { return lo + length; }

    bool contains(double x) const { return x >= lo && x < hi(); }

    // Rightward distance from a to b, wrapping on a cycle.
    double forward_distance(double a, double b) const {
        double d = b - a;
        if (is_cycle() && d < 0.0) d += length;
        return d;
    }

    friend bool operator==(const Geometry& a, const Geometry& b) {
        return a.kind == b.kind && a.length == b.length && a.lo == b.lo;
    }
    friend bool operator!=(const Geometry& a, const Geometry& b) {
        return !(a == b);
    }
};

inline std::string to_string(GeometryKind k) {
    return k == GeometryKind::cycle ? "cycle" : "interval";
}

inline void require_same_geometry(const Geometry& a, const Geometry& b,
                                  const char* what) {
    if (a != b)
        throw GeometryMismatch(std::string(what) +
                               ": operands live on different geometries");
}

}  // namespace hadq
