#include "shortclass/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shortclass/common.hpp"

namespace shortclass::tune {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

ParamValue sample_param(const ParamSpec& spec, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (spec.kind) {
        case ParamSpec::Kind::real:
            return ParamValue::of(spec.lo + unit(rng) * (spec.hi - spec.lo));
        case ParamSpec::Kind::real_log: {
            double llo = std::log(spec.lo), lhi = std::log(spec.hi);
            return ParamValue::of(std::exp(llo + unit(rng) * (lhi - llo)));
        }
        case ParamSpec::Kind::integer: {
            std::uniform_int_distribution<long long> pick(spec.ilo, spec.ihi);
            return ParamValue::of(pick(rng));
        }
        case ParamSpec::Kind::categorical: {
            std::uniform_int_distribution<std::size_t> pick(0, spec.choices.size() - 1);
            return ParamValue::of(spec.choices[pick(rng)]);
        }
    }
    throw NumericError("unreachable");
}

// Numeric view of a parameter in its KDE domain (log params live in ln space).
double numeric_value(const ParamSpec& spec, const ParamValue& v) {
    switch (spec.kind) {
        case ParamSpec::Kind::real: return v.real;
        case ParamSpec::Kind::real_log: return std::log(v.real);
        case ParamSpec::Kind::integer: return static_cast<double>(v.integer);
        case ParamSpec::Kind::categorical: break;
    }
    throw NumericError("numeric_value on categorical parameter");
}

ParamValue from_numeric(const ParamSpec& spec, double x) {
    switch (spec.kind) {
        case ParamSpec::Kind::real:
            return ParamValue::of(clamp(x, spec.lo, spec.hi));
        case ParamSpec::Kind::real_log:
            return ParamValue::of(clamp(std::exp(x), spec.lo, spec.hi));
        case ParamSpec::Kind::integer: {
            auto r = static_cast<long long>(std::llround(x));
            return ParamValue::of(std::max(spec.ilo, std::min(spec.ihi, r)));
        }
        case ParamSpec::Kind::categorical: break;
    }
    throw NumericError("from_numeric on categorical parameter");
}

double domain_width(const ParamSpec& spec) {
    switch (spec.kind) {
        case ParamSpec::Kind::real: return spec.hi - spec.lo;
        case ParamSpec::Kind::real_log: return std::log(spec.hi) - std::log(spec.lo);
        case ParamSpec::Kind::integer:
            return static_cast<double>(spec.ihi - spec.ilo);
        case ParamSpec::Kind::categorical: break;
    }
    throw NumericError("domain_width on categorical parameter");
}

// Mixture of Gaussian kernels over the set's values plus one uniform prior
// component over the whole domain; the prior keeps candidate draws exploring
// and stops the ratio from diverging outside the visited region.
struct Kde {
    std::vector<double> centers;
    double bandwidth = 1.0;
    double range_width = 1.0;

    static Kde fit(std::vector<double> values, double range_width, double bandwidth) {
        Kde k;
        k.centers = std::move(values);
        k.range_width = std::max(range_width, 1e-12);
        k.bandwidth = bandwidth;
        return k;
    }

    double log_density(double x) const {
        const double comps = static_cast<double>(centers.size()) + 1.0;
        double acc = 0.0;
        for (double c : centers) {
            double z = (x - c) / bandwidth;
            acc += std::exp(-0.5 * z * z);
        }
        double p = acc / (comps * bandwidth * std::sqrt(2.0 * kPi)) +
                   1.0 / (comps * range_width);
        return std::log(p);
    }
};

struct CategoricalCounts {
    std::map<std::string, double> freq;  // smoothed

    static CategoricalCounts fit(const std::vector<std::string>& values,
                                 const std::vector<std::string>& choices) {
        CategoricalCounts c;
        const double denom =
            static_cast<double>(values.size()) + static_cast<double>(choices.size());
        for (const auto& ch : choices) c.freq[ch] = 1.0 / denom;
        for (const auto& v : values) c.freq[v] += 1.0 / denom;
        return c;
    }

    double log_density(const std::string& v) const { return std::log(freq.at(v)); }
};

}  // namespace

bool SearchSpace::contains(const ParamMap& config) const {
    for (const auto& [name, spec] : params) {
        auto it = config.find(name);
        if (it == config.end()) return false;
        const ParamValue& v = it->second;
        switch (spec.kind) {
            case ParamSpec::Kind::real:
            case ParamSpec::Kind::real_log:
                if (v.type != ParamValue::Type::real || v.real < spec.lo || v.real > spec.hi)
                    return false;
                break;
            case ParamSpec::Kind::integer:
                if (v.type != ParamValue::Type::integer || v.integer < spec.ilo ||
                    v.integer > spec.ihi)
                    return false;
                break;
            case ParamSpec::Kind::categorical:
                if (v.type != ParamValue::Type::categorical ||
                    std::find(spec.choices.begin(), spec.choices.end(), v.categorical) ==
                        spec.choices.end())
                    return false;
                break;
        }
    }
    return true;
}

ParamMap sample_uniform(const SearchSpace& space, std::uint64_t seed, std::uint64_t draw) {
    Rng rng(derive_seed(seed, 0xad0 + draw));
    ParamMap config;
    for (const auto& [name, spec] : space.params) config[name] = sample_param(spec, rng);
    return config;
}

namespace {

// Shared best-trial rule: maximize objective, ties to the cheaper trial.
bool better(const Trial& a, const Trial& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.objective != b.objective) return a.objective > b.objective;
    return a.train_time_s < b.train_time_s;
}

}  // namespace

Trial random_search(const SearchSpace& space, const ObjectiveFn& objective,
                    std::size_t budget, std::uint64_t seed) {
    if (budget == 0) throw DataError("random_search: budget must be >= 1");
    if (space.params.empty()) throw DataError("random_search: empty search space");
    Trial best;
    best.failed = true;
    best.objective = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < budget; ++i) {
        Trial t;
        t.config = sample_uniform(space, seed, i);
        TrialOutcome out = objective(t.config);
        t.objective = out.objective;
        t.train_time_s = out.train_time_s;
        t.failed = out.failed;
        if (better(t, best)) best = t;
    }
    if (best.failed) throw NumericError("random_search: all trials failed");
    return best;
}

ParamMap tpe_suggest(const std::vector<Trial>& history, const SearchSpace& space,
                     double gamma, std::size_t n_candidates, std::uint64_t seed) {
    std::vector<const Trial*> usable;
    for (const auto& t : history)
        if (!t.failed) usable.push_back(&t);

    auto uniform_fallback = [&]() { return sample_uniform(space, seed, 0x0fa11); };
    if (usable.size() < 2) return uniform_fallback();

    bool all_equal = std::all_of(usable.begin(), usable.end(), [&](const Trial* t) {
        return t->objective == usable.front()->objective;
    });
    if (all_equal) return uniform_fallback();

    std::stable_sort(usable.begin(), usable.end(),
                     [](const Trial* a, const Trial* b) { return a->objective > b->objective; });
    const std::size_t n = usable.size();
    std::size_t n_good = static_cast<std::size_t>(
        std::ceil(gamma * static_cast<double>(n)));
    n_good = std::max<std::size_t>(1, std::min(n_good, n - 1));

    struct ParamModel {
        bool is_categorical = false;
        Kde good_kde, bad_kde;
        CategoricalCounts good_cat, bad_cat;
    };
    std::map<std::string, ParamModel> models;
    for (const auto& [name, spec] : space.params) {
        ParamModel pm;
        if (spec.kind == ParamSpec::Kind::categorical) {
            pm.is_categorical = true;
            std::vector<std::string> good_vals, bad_vals;
            for (std::size_t i = 0; i < n; ++i)
                (i < n_good ? good_vals : bad_vals)
                    .push_back(usable[i]->config.at(name).categorical);
            pm.good_cat = CategoricalCounts::fit(good_vals, spec.choices);
            pm.bad_cat = CategoricalCounts::fit(bad_vals, spec.choices);
        } else {
            std::vector<double> good_vals, bad_vals, all_vals;
            for (std::size_t i = 0; i < n; ++i) {
                double v = numeric_value(spec, usable[i]->config.at(name));
                (i < n_good ? good_vals : bad_vals).push_back(v);
                all_vals.push_back(v);
            }
            // Silverman bandwidth over the whole history, floored at 1% of
            // the range; shared by both densities so the good side keeps
            // proposing outside an incumbent cluster.
            double mean = 0.0;
            for (double v : all_vals) mean += v;
            mean /= static_cast<double>(all_vals.size());
            double var = 0.0;
            for (double v : all_vals) var += (v - mean) * (v - mean);
            double sigma = std::sqrt(var / static_cast<double>(all_vals.size()));
            double width = domain_width(spec);
            double bw = 1.06 * sigma * std::pow(static_cast<double>(all_vals.size()), -0.2);
            double floor = 0.01 * std::max(width, 1e-12);
            if (!(bw > floor)) bw = floor;
            pm.good_kde = Kde::fit(std::move(good_vals), width, bw);
            pm.bad_kde = Kde::fit(std::move(bad_vals), width, bw);
        }
        models.emplace(name, std::move(pm));
    }

    Rng rng(derive_seed(seed, 0x79e5));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ParamMap best_config;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_candidates; ++c) {
        ParamMap candidate;
        double score = 0.0;
        for (const auto& [name, spec] : space.params) {
            const ParamModel& pm = models.at(name);
            if (pm.is_categorical) {
                // Draw from the smoothed good-side distribution.
                double u = unit(rng), acc = 0.0;
                std::string chosen = spec.choices.back();
                for (const auto& ch : spec.choices) {
                    acc += pm.good_cat.freq.at(ch);
                    if (u <= acc) {
                        chosen = ch;
                        break;
                    }
                }
                score += pm.good_cat.log_density(chosen) - pm.bad_cat.log_density(chosen);
                candidate[name] = ParamValue::of(chosen);
            } else {
                // components 0..n-1 are kernels, component n is the prior
                std::uniform_int_distribution<std::size_t> pick(0, pm.good_kde.centers.size());
                std::size_t comp = pick(rng);
                double x;
                if (comp == pm.good_kde.centers.size()) {
                    std::uniform_real_distribution<double> wide(0.0, 1.0);
                    double lo = spec.kind == ParamSpec::Kind::real_log ? std::log(spec.lo)
                                : spec.kind == ParamSpec::Kind::integer
                                    ? static_cast<double>(spec.ilo)
                                    : spec.lo;
                    x = lo + wide(rng) * domain_width(spec);
                } else {
                    x = pm.good_kde.centers[comp] + gauss(rng) * pm.good_kde.bandwidth;
                }
                ParamValue v = from_numeric(spec, x);
                double xv = numeric_value(spec, v);
                score += pm.good_kde.log_density(xv) - pm.bad_kde.log_density(xv);
                candidate[name] = v;
            }
        }
        if (score > best_score) {
            best_score = score;
            best_config = std::move(candidate);
        }
    }
    return best_config;
}

TuneResult tune(const SearchSpace& space, const ObjectiveFn& objective,
                std::size_t budget, std::size_t n_startup, std::uint64_t seed) {
    if (budget <= n_startup)
        throw DataError("tune: budget must exceed n_startup (budget " +
                        std::to_string(budget) + ", n_startup " + std::to_string(n_startup) +
                        ")");
    if (space.params.empty()) throw DataError("tune: empty search space");

    TuneResult result;
    result.best.failed = true;
    result.best.objective = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < budget; ++i) {
        Trial t;
        if (i < n_startup)
            t.config = sample_uniform(space, seed, i);
        else
            t.config = tpe_suggest(result.history, space, 0.25, 24, derive_seed(seed, i));
        TrialOutcome out = objective(t.config);
        t.objective = out.objective;
        t.train_time_s = out.train_time_s;
        t.failed = out.failed;
        result.history.push_back(t);
        if (better(t, result.best)) result.best = t;
    }
    if (result.best.failed) throw NumericError("tune: all trials failed");
    return result;
}

}  // namespace shortclass::tune
