#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "configuration.hpp"
#include "coloring.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "multiline.hpp"
#include "point_field.hpp"
#include "queueing.hpp"

namespace hadq::io {

// Shortest decimal representation that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline nlohmann::json geometry_to_json(const Geometry& g) {
    nlohmann::json j;
    j["geometry"] = to_string(g.kind);
    j["length"] = g.length;
    if (!g.is_cycle() && g.lo != 0.0) j["origin"] = g.lo;
    return j;
}

inline Geometry geometry_from_json(const nlohmann::json& j) {
    std::string kind = j.at("geometry").get<std::string>();
    double length = j.at("length").get<double>();
    double lo = j.value("origin", 0.0);
    if (kind == "cycle") return Geometry::cycle(length);
    if (kind == "interval") return Geometry::interval(length, lo);
    throw InvalidParameters("unknown geometry kind: " + kind);
}

inline nlohmann::json to_json(const Configuration& c) {
    nlohmann::json j = geometry_to_json(c.geometry());
    j["positions"] = c.positions();
    return j;
}

inline Configuration configuration_from_json(const nlohmann::json& j) {
    return Configuration(geometry_from_json(j),
                         j.at("positions").get<std::vector<double>>());
}

inline nlohmann::json to_json(const PointField& f) {
    nlohmann::json j = geometry_to_json(f.geometry());
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : f.points()) pts.push_back({p.x, p.t});
    j["points"] = std::move(pts);
    return j;
}

inline PointField point_field_from_json(const nlohmann::json& j) {
    std::vector<SpaceTimePoint> pts;
    for (const auto& p : j.at("points"))
        pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return PointField(geometry_from_json(j), std::move(pts));
}

inline std::string to_csv(const Configuration& c) {
    std::string out = "position\n";
    for (double x : c.positions()) {
        out += format_double(x);
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const PointField& f) {
    std::string out = "x,t\n";
    for (const auto& p : f.points()) {
        out += format_double(p.x);
        out += ',';
        out += format_double(p.t);
        out += '\n';
    }
    return out;
}

// Stacks serialize as (line, position) rows with 1-based line indices.
inline std::string stack_to_csv(const std::vector<Configuration>& lines) {
    std::string out = "line,position\n";
    for (std::size_t k = 0; k < lines.size(); ++k)
        for (double x : lines[k].positions()) {
            out += std::to_string(k + 1);
            out += ',';
            out += format_double(x);
            out += '\n';
        }
    return out;
}

inline std::string to_csv(const FifoMatching& m) {
    std::string out = "arrival,departure,class\n";
    for (const auto& l : m.links) {
        out += format_double(l.arrival);
        out += ',';
        out += format_double(l.departure);
        out += ',';
        out += std::to_string(l.cls + 1);
        out += '\n';
    }
    return out;
}

inline std::string series_to_csv(const std::vector<CoalescencePoint>& series) {
    std::string out = "time,red_count,blue_count,yellow_count\n";
    for (const auto& p : series) {
        out += format_double(p.time);
        out += ',';
        out += std::to_string(p.red);
        out += ',';
        out += std::to_string(p.blue);
        out += ',';
        out += std::to_string(p.yellow);
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str())
        throw InvalidParameters("csv: cannot parse number '" + s + "'");
    return v;
}

}  // namespace detail

// Parses (line, position) rows into a stack with `num_lines` lines.
// Also accepts single-column position rows when num_lines is 1.
inline std::vector<Configuration> stack_from_csv(const Geometry& g,
                                                 std::size_t num_lines,
                                                 const std::string& text) {
    std::vector<std::vector<double>> lines(num_lines);
    std::stringstream ss(text);
    std::string row;
    bool first = true;
    while (std::getline(ss, row)) {
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.empty()) continue;
        if (first) {
            first = false;
            if (row.find("position") != std::string::npos) continue;  // header
        }
        auto fields = detail::split_line(row, ',');
        std::size_t k;
        double x;
        if (fields.size() == 1 && num_lines == 1) {
            k = 1;
            x = detail::parse_double(fields[0]);
        } else if (fields.size() == 2) {
            k = static_cast<std::size_t>(detail::parse_double(fields[0]));
            x = detail::parse_double(fields[1]);
        } else {
            throw InvalidParameters("csv: expected 'line,position' rows");
        }
        if (k < 1 || k > num_lines)
            throw InvalidParameters("csv: line index out of range");
        lines[k - 1].push_back(x);
    }
    std::vector<Configuration> out;
    out.reserve(num_lines);
    for (auto& v : lines) {
        std::sort(v.begin(), v.end());
        out.push_back(Configuration(g, std::move(v)));
    }
    return out;
}

template <typename State>
std::string trajectory_to_csv(const Trajectory<State>& t) {
    std::string out = "time,line,position\n";
    for (const auto& [time, state] : t.snapshots) {
        const auto& lines = state.lines();
        for (std::size_t k = 0; k < lines.size(); ++k)
            for (double x : lines[k].positions()) {
                out += format_double(time);
                out += ',';
                out += std::to_string(k + 1);
                out += ',';
                out += format_double(x);
                out += '\n';
            }
    }
    return out;
}

inline std::string trajectory_to_csv(const Trajectory<Configuration>& t) {
    std::string out = "time,line,position\n";
    for (const auto& [time, state] : t.snapshots)
        for (double x : state.positions()) {
            out += format_double(time);
            out += ",1,";
            out += format_double(x);
            out += '\n';
        }
    return out;
}

inline std::string trajectory_to_csv(const Trajectory<MulticlassConfig>& t) {
    std::string out = "time,class,position\n";
    for (const auto& [time, state] : t.snapshots)
        for (std::size_t k = 0; k < state.num_classes(); ++k)
            for (double x : state.cls(k).positions()) {
                out += format_double(time);
                out += ',';
                out += std::to_string(k + 1);
                out += ',';
                out += format_double(x);
                out += '\n';
            }
    return out;
}

}  // namespace hadq::io
