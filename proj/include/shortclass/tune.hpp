#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace shortclass::tune {

struct ParamValue {
    enum class Type { real, integer, categorical };
    Type type = Type::real;
    double real = 0.0;
    long long integer = 0;
    std::string categorical;

    static ParamValue of(double v) { return {Type::real, v, 0, {}}; }
    static ParamValue of(long long v) { return {Type::integer, 0.0, v, {}}; }
    static ParamValue of(std::string v) { return {Type::categorical, 0.0, 0, std::move(v)}; }
    bool operator==(const ParamValue&) const = default;
};

using ParamMap = std::map<std::string, ParamValue>;

struct ParamSpec {
    enum class Kind { real, real_log, integer, categorical };
    Kind kind = Kind::real;
    double lo = 0.0, hi = 1.0;          // real / real_log
    long long ilo = 0, ihi = 1;         // integer
    std::vector<std::string> choices;   // categorical

    static ParamSpec uniform(double lo, double hi) { return {Kind::real, lo, hi, 0, 1, {}}; }
    static ParamSpec log_uniform(double lo, double hi) {
        return {Kind::real_log, lo, hi, 0, 1, {}};
    }
    static ParamSpec integer_range(long long lo, long long hi) {
        return {Kind::integer, 0, 1, lo, hi, {}};
    }
    static ParamSpec categorical(std::vector<std::string> choices) {
        return {Kind::categorical, 0, 1, 0, 1, std::move(choices)};
    }
};

struct SearchSpace {
    std::map<std::string, ParamSpec> params;
    bool contains(const ParamMap& config) const;
};

struct TrialOutcome {
    double objective = 0.0;  // validation F1, maximized
    double train_time_s = 0.0;
    bool failed = false;
};

struct Trial {
    ParamMap config;
    double objective = 0.0;
    double train_time_s = 0.0;
    bool failed = false;
};

using ObjectiveFn = std::function<TrialOutcome(const ParamMap&)>;

ParamMap sample_uniform(const SearchSpace& space, std::uint64_t seed, std::uint64_t draw);

Trial random_search(const SearchSpace& space, const ObjectiveFn& objective,
                    std::size_t budget, std::uint64_t seed);

// Density-ratio suggestion: history split at the gamma-quantile of objective;
// per-parameter Gaussian KDEs (Silverman bandwidth floored at 1% of range;
// smoothed frequencies for categoricals); the best of n_candidates draws from
// the good-side density wins. Degenerate histories fall back to a uniform
// draw.
ParamMap tpe_suggest(const std::vector<Trial>& history, const SearchSpace& space,
                     double gamma, std::size_t n_candidates, std::uint64_t seed);

struct TuneResult {
    Trial best;
    std::vector<Trial> history;  // length == budget
};

TuneResult tune(const SearchSpace& space, const ObjectiveFn& objective,
                std::size_t budget, std::size_t n_startup, std::uint64_t seed);

inline TuneResult tune(const SearchSpace& space, const ObjectiveFn& objective,
                       std::size_t budget, std::uint64_t seed) {
    return tune(space, objective, budget, 10, seed);
}

}  // namespace shortclass::tune
