#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hadq {

struct TestStat {
    std::string name;
    std::size_t n = 0;
    double statistic = 0.0;
    double p = 1.0;
};

struct Verdict {
    std::string name;
    std::string threshold;
    double observed = 0.0;
    bool pass = false;
};

// Outcome of one named experiment. Identical (experiment, params, seed)
// runs produce identical reports up to the wall-clock field, which is the
// only nondeterministic entry.
struct ExperimentReport {
    std::string experiment;
    nlohmann::json params;
    std::uint64_t seed = 0;
    std::vector<TestStat> tests;
    std::vector<Verdict> verdicts;
    double runtime_s = 0.0;

    bool all_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }

    nlohmann::json to_json(bool include_runtime = true) const {
        nlohmann::json j;
        j["experiment"] = experiment;
        j["params"] = params;
        j["seed"] = seed;
        auto ts = nlohmann::json::array();
        for (const auto& t : tests)
            ts.push_back({{"name", t.name},
                          {"n", t.n},
                          {"statistic", t.statistic},
                          {"p", t.p}});
        j["tests"] = std::move(ts);
        auto vs = nlohmann::json::array();
        for (const auto& v : verdicts)
            vs.push_back({{"name", v.name},
                          {"threshold", v.threshold},
                          {"observed", v.observed},
                          {"pass", v.pass}});
        j["verdicts"] = std::move(vs);
        if (include_runtime) j["runtime_s"] = runtime_s;
        return j;
    }

    // Deterministic byte representation (wall clock stripped).
    std::string canonical_json() const { return to_json(false).dump(2); }
};

}  // namespace hadq
