#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "geometry.hpp"

namespace hadq {

namespace detail {

inline void require_stack(const std::vector<Configuration>& lines,
                          const char* what) {
    if (lines.empty())
        throw InvalidParameters(std::string(what) + ": needs at least one line");
    for (std::size_t k = 1; k < lines.size(); ++k)
        require_same_geometry(lines[0].geometry(), lines[k].geometry(), what);
}

}  // namespace detail

// Stack of lines with no structural constraint between them. Used as the
// state of the multi-line process and as the input of the queueing maps.
class MultiLineConfig {
public:
    explicit MultiLineConfig(std::vector<Configuration> lines)
        : lines_(std::move(lines)) {
        detail::require_stack(lines_, "multi-line configuration");
    }

    const std::vector<Configuration>& lines() const { return lines_; }
    const Configuration& line(std::size_t k) const { return lines_[k]; }
    std::size_t num_lines() const { return lines_.size(); }
    const Geometry& geometry() const { return lines_[0].geometry(); }

    friend bool operator==(const MultiLineConfig& a, const MultiLineConfig& b) {
        return a.lines_ == b.lines_;
    }
    friend bool operator!=(const MultiLineConfig& a, const MultiLineConfig& b) {
        return !(a == b);
    }

private:
    std::vector<Configuration> lines_;
};

// Nested stack: line k is a subset of line k+1, with shared positions
// exactly equal.
class CoupledConfig {
public:
    explicit CoupledConfig(std::vector<Configuration> lines)
        : lines_(std::move(lines)) {
        detail::require_stack(lines_, "coupled configuration");
        for (std::size_t k = 1; k < lines_.size(); ++k) {
            const auto& lo = lines_[k - 1].positions();
            const auto& hi = lines_[k].positions();
            if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()))
                throw NotNested("coupled configuration: lines are not nested");
        }
    }

    const std::vector<Configuration>& lines() const { return lines_; }
    const Configuration& line(std::size_t k) const { return lines_[k]; }
    std::size_t num_lines() const { return lines_.size(); }
    const Geometry& geometry() const { return lines_[0].geometry(); }

    friend bool operator==(const CoupledConfig& a, const CoupledConfig& b) {
        return a.lines_ == b.lines_;
    }
    friend bool operator!=(const CoupledConfig& a, const CoupledConfig& b) {
        return !(a == b);
    }

private:
    std::vector<Configuration> lines_;
};

// Disjoint classes: class k holds the k-th priority particles.
class MulticlassConfig {
public:
    explicit MulticlassConfig(std::vector<Configuration> classes)
        : classes_(std::move(classes)) {
        detail::require_stack(classes_, "multiclass configuration");
        for (std::size_t a = 0; a < classes_.size(); ++a)
            for (std::size_t b = a + 1; b < classes_.size(); ++b) {
                const auto& pa = classes_[a].positions();
                const auto& pb = classes_[b].positions();
                std::vector<double> common;
                std::set_intersection(pa.begin(), pa.end(), pb.begin(),
                                      pb.end(), std::back_inserter(common));
                if (!common.empty())
                    throw NotDisjoint(
                        "multiclass configuration: classes share positions");
            }
    }

    const std::vector<Configuration>& classes() const { return classes_; }
    const Configuration& cls(std::size_t k) const { return classes_[k]; }
    std::size_t num_classes() const { return classes_.size(); }
    const Geometry& geometry() const { return classes_[0].geometry(); }

    friend bool operator==(const MulticlassConfig& a,
                           const MulticlassConfig& b) {
        return a.classes_ == b.classes_;
    }
    friend bool operator!=(const MulticlassConfig& a,
                           const MulticlassConfig& b) {
        return !(a == b);
    }

private:
    std::vector<Configuration> classes_;
};

}  // namespace hadq
