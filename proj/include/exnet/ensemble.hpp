// ensemble.hpp: randomized networks in a sphere, parameter disorder, and
// ensemble statistics of the importance profile

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exnet/config.hpp"
#include "exnet/dynamics.hpp"
#include "exnet/errors.hpp"
#include "exnet/fim.hpp"
#include "exnet/geometry.hpp"
#include "exnet/parameters.hpp"
#include "exnet/rng.hpp"

namespace exnet {

struct EnsembleSpec {
    double radius{2.0}; // nm
    std::size_t sites{4};
    std::size_t samples{50}; // accepted samples to collect
    std::uint64_t seed{1};
    double disorder{0.1};
    double min_spacing{0.5};          // nm
    double completion_filter_ns{1.0}; // reject if completion time >= filter
    FigureOfMerit kind{FigureOfMerit::arrival};
    // Draws stop after samples * max_attempts_factor attempts.
    std::size_t max_attempts_factor{100};
    // Template for everything except geometry (spectral kind, mean parameter values, Gamma_inj).
    NetworkConfig base{default_network(4)};
    FimOptions fim{};

    void validate() const {
        if (sites < 2) throw ConfigError("ensemble needs at least two sites");
        if (samples < 1) throw ConfigError("ensemble sample count must be at least 1");
        if (!(radius > min_spacing / 2)) throw ConfigError("sphere radius must exceed half the minimum spacing");
        if (!(disorder >= 0.0)) throw ConfigError("disorder fraction must be non-negative");
        if (base.size() != sites) throw ConfigError("ensemble base config has the wrong number of sites");
        if (kind == FigureOfMerit::steady && !(base.gamma_inj > 0.0))
            throw ConfigError("steady ensembles need Gamma_inj > 0 in the base config");
    }
};

inline constexpr std::size_t kMaxGeometryRejections = 10000;

// Source at (-r,0,0), sink at (r,0,0), the others uniform in the ball. Any
// pair closer than min_spacing redraws every intermediate site. The result is
// translated so that site 1 is at the origin.
inline std::vector<Vec3> random_geometry(const EnsembleSpec& spec, CounterRng& rng) {
    const double r = spec.radius;
    std::uniform_real_distribution<double> coord(-r, r);
    std::vector<Vec3> pos(spec.sites, Vec3::Zero());
    pos.front() = Vec3(-r, 0.0, 0.0);
    pos.back() = Vec3(r, 0.0, 0.0);
    for (std::size_t attempt = 0; attempt < kMaxGeometryRejections; ++attempt) {
        for (std::size_t i = 1; i + 1 < spec.sites; ++i) {
            Vec3 x;
            do {
                x = Vec3(coord(rng), coord(rng), coord(rng));
            } while (x.squaredNorm() > r * r);
            pos[i] = x;
        }
        bool ok = true;
        for (std::size_t i = 0; i < spec.sites && ok; ++i)
            for (std::size_t j = i + 1; j < spec.sites && ok; ++j) ok = (pos[i] - pos[j]).norm() >= spec.min_spacing;
        if (ok) {
            const Vec3 origin = pos.front();
            for (auto& p : pos) p -= origin;
            return pos;
        }
    }
    throw ConfigError("infeasible spec: 10000 consecutive geometry rejections");
}

// theta -> theta (1 + fraction * delta), delta ~ N(0, 1), for every
// non-positional parameter; draws that would make a value non-positive are redone.
inline NetworkConfig apply_disorder(const NetworkConfig& cfg, double fraction, CounterRng& rng) {
    if (!(fraction >= 0.0)) throw ConfigError("disorder fraction must be non-negative");
    NetworkConfig out = cfg;
    if (fraction == 0.0) return out;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const auto& e : default_parameters(cfg.size())) {
        if (e.group() == ParameterGroup::position) continue;
        const double v0 = parameter_value(out, e);
        double v = 0.0;
        do {
            v = v0 * (1.0 + fraction * normal(rng));
        } while (!(v > 0.0) && v0 > 0.0);
        set_parameter(out, e, v);
    }
    return out;
}

struct EnsembleResult {
    EnsembleSpec spec;
    std::vector<std::string> labels;
    std::vector<std::size_t> sample_index; // attempt index of each accepted sample
    std::vector<Eigen::VectorXd> profiles;
    std::vector<double> completion_times_ns;
    std::vector<double> nn_coupling; // per accepted sample
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
    std::map<ParameterGroup, double> group_mean;
    std::map<ParameterGroup, double> group_variance;
    double mean_nn_coupling{0.0};     // accepted samples
    double mean_nn_coupling_all{0.0}; // every generated geometry
    std::size_t attempts{0};
    std::size_t rejected{0};
    std::size_t failed{0};
    std::vector<std::string> failures;

    std::size_t accepted() const noexcept { return profiles.size(); }

    double group_stderr(ParameterGroup g) const {
        const auto it = group_variance.find(g);
        return it == group_variance.end() || profiles.empty() ? 0.0
                                                              : std::sqrt(it->second / static_cast<double>(profiles.size()));
    }
};

struct EnsembleSample {
    NetworkConfig config;
    double nn_coupling{0.0};
};

// Geometry then disorder, both drawn from substream `index`.
inline EnsembleSample draw_sample(const EnsembleSpec& spec, std::size_t index) {
    CounterRng rng(spec.seed, index);
    NetworkConfig cfg = spec.base;
    set_positions(cfg, random_geometry(spec, rng));
    cfg = apply_disorder(cfg, spec.disorder, rng);
    cfg.validate();
    return {cfg, nn_coupling_stats(cfg).mean};
}

inline EnsembleResult run_ensemble(const EnsembleSpec& spec) {
    spec.validate();
    EnsembleResult res;
    res.spec = spec;
    const ParameterVector params = default_parameters(spec.sites);
    res.labels = parameter_labels(params);

    const std::size_t max_attempts = spec.samples * spec.max_attempts_factor;
    double nn_all = 0.0;
    while (res.accepted() < spec.samples && res.attempts < max_attempts) {
        const std::size_t index = res.attempts++;
        const EnsembleSample sample = draw_sample(spec, index);
        nn_all += sample.nn_coupling;
        try {
            const Generator gen = build_generator(sample.config, Mode::transient);
            // anything still running at the filter time is rejected, so stop there
            EvolveOptions eo = spec.fim.evolve;
            eo.positivity_checks = 0;
            eo.t_max_ns = std::min(eo.t_max_ns, spec.completion_filter_ns);
            const Trajectory tr = evolve(gen, default_initial_state(gen), eo);
            if (!tr.completed || tr.completion_time_ns >= spec.completion_filter_ns) {
                ++res.rejected;
                continue;
            }
            const FimResult fr = sensitivity(sample.config, spec.kind, spec.fim, params);
            res.profiles.push_back(fr.importance);
            res.sample_index.push_back(index);
            res.completion_times_ns.push_back(tr.completion_time_ns);
            res.nn_coupling.push_back(sample.nn_coupling);
        } catch (const std::exception& e) {
            ++res.failed;
            res.failures.push_back("sample " + std::to_string(index) + ": " + e.what());
        }
    }
    res.mean_nn_coupling_all = res.attempts ? nn_all / static_cast<double>(res.attempts) : 0.0;

    const auto p = static_cast<Eigen::Index>(params.size());
    const auto n = static_cast<double>(res.accepted());
    res.mean = Eigen::VectorXd::Zero(p);
    res.variance = Eigen::VectorXd::Zero(p);
    if (res.accepted() == 0) return res;

    for (const auto& v : res.profiles) res.mean += v;
    res.mean /= n;
    for (const auto& v : res.profiles) res.variance += (v - res.mean).cwiseAbs2();
    if (res.accepted() > 1) res.variance /= (n - 1.0);

    for (const ParameterGroup g : kAllGroups) {
        std::vector<double> totals;
        for (const auto& v : res.profiles) {
            double t = 0.0;
            for (std::size_t mu = 0; mu < params.size(); ++mu)
                if (params[mu].group() == g) t += v(static_cast<Eigen::Index>(mu));
            totals.push_back(t);
        }
        double m = 0.0;
        for (const double t : totals) m += t;
        m /= n;
        double var = 0.0;
        for (const double t : totals) var += (t - m) * (t - m);
        res.group_mean[g] = m;
        res.group_variance[g] = res.accepted() > 1 ? var / (n - 1.0) : 0.0;
    }
    for (const double v : res.nn_coupling) res.mean_nn_coupling += v;
    res.mean_nn_coupling /= n;
    return res;
}

} // namespace exnet
