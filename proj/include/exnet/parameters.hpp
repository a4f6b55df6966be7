// parameters.hpp: the ordered model parameter vector used for sensitivity analysis
//
// Default order for N sites:
//   E1..EN, t1..tN, (r1i, a1i, p1i) for i = 2..N, G_trap, lam, T
// where a1i / p1i are the polar / azimuthal angles of site i seen from
// site 1. Angles are perturbed linearly, everything else logarithmically.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "exnet/config.hpp"
#include "exnet/errors.hpp"

namespace exnet {

enum class Knob { energy, lifetime, radius, polar, azimuth, gamma_trap, lambda_ph, temperature };

enum class ParameterGroup { energy, lifetime, position, environment };

inline constexpr ParameterGroup kAllGroups[] = {ParameterGroup::energy, ParameterGroup::lifetime,
                                                ParameterGroup::position, ParameterGroup::environment};

inline std::string to_string(ParameterGroup g) {
    switch (g) {
    case ParameterGroup::energy: return "energy";
    case ParameterGroup::lifetime: return "lifetime";
    case ParameterGroup::position: return "position";
    case ParameterGroup::environment: return "environment";
    }
    return "energy";
}

struct ParameterEntry {
    Knob knob{Knob::energy};
    std::size_t site{0}; // 1-based; 0 for network-wide knobs

    bool log_scaled() const noexcept { return knob != Knob::polar && knob != Knob::azimuth; }

    ParameterGroup group() const noexcept {
        switch (knob) {
        case Knob::energy: return ParameterGroup::energy;
        case Knob::lifetime: return ParameterGroup::lifetime;
        case Knob::radius:
        case Knob::polar:
        case Knob::azimuth: return ParameterGroup::position;
        default: return ParameterGroup::environment;
        }
    }

    std::string label() const {
        const std::string i = std::to_string(site);
        switch (knob) {
        case Knob::energy: return "E" + i;
        case Knob::lifetime: return "t" + i;
        case Knob::radius: return "r1" + i;
        case Knob::polar: return "a1" + i;
        case Knob::azimuth: return "p1" + i;
        case Knob::gamma_trap: return "G_trap";
        case Knob::lambda_ph: return "lam";
        case Knob::temperature: return "T";
        }
        return {};
    }
};

using ParameterVector = std::vector<ParameterEntry>;

inline ParameterVector default_parameters(std::size_t n) {
    ParameterVector p;
    p.reserve(2 * n + 3 * (n - 1) + 3);
    for (std::size_t i = 1; i <= n; ++i) p.push_back({Knob::energy, i});
    for (std::size_t i = 1; i <= n; ++i) p.push_back({Knob::lifetime, i});
    for (std::size_t i = 2; i <= n; ++i) {
        p.push_back({Knob::radius, i});
        p.push_back({Knob::polar, i});
        p.push_back({Knob::azimuth, i});
    }
    p.push_back({Knob::gamma_trap, 0});
    p.push_back({Knob::lambda_ph, 0});
    p.push_back({Knob::temperature, 0});
    return p;
}

inline std::vector<std::string> parameter_labels(const ParameterVector& p) {
    std::vector<std::string> out;
    out.reserve(p.size());
    for (const auto& e : p) out.push_back(e.label());
    return out;
}

namespace detail {

template <typename Config>
auto& knob_ref(Config& cfg, const ParameterEntry& e) {
    auto site = [&]() -> auto& {
        if (e.site < 1 || e.site > cfg.size()) throw ConfigError("parameter " + e.label() + " refers to a missing site");
        return cfg.sites[e.site - 1];
    };
    auto moving_site = [&]() -> auto& {
        if (e.site < 2) throw ConfigError("site 1 is pinned at the origin and has no position parameters");
        return site();
    };
    switch (e.knob) {
    case Knob::energy: return site().energy;
    case Knob::lifetime: return site().lifetime;
    case Knob::radius: return moving_site().position.r;
    case Knob::polar: return moving_site().position.theta;
    case Knob::azimuth: return moving_site().position.phi;
    case Knob::gamma_trap: return cfg.gamma_trap;
    case Knob::lambda_ph: return cfg.lambda_ph;
    case Knob::temperature: return cfg.T_ph;
    }
    throw ConfigError("unknown parameter knob");
}

} // namespace detail

inline double parameter_value(const NetworkConfig& cfg, const ParameterEntry& e) {
    return detail::knob_ref(cfg, e);
}

inline void set_parameter(NetworkConfig& cfg, const ParameterEntry& e, double value) {
    detail::knob_ref(cfg, e) = value;
}

// theta -> theta exp(h) for log-scaled entries, theta + h for angles.
inline NetworkConfig perturb(const NetworkConfig& cfg, const ParameterVector& params, std::size_t mu, double h) {
    if (mu >= params.size()) throw ConfigError("parameter index out of range");
    NetworkConfig out = cfg;
    double& v = detail::knob_ref(out, params[mu]);
    v = params[mu].log_scaled() ? v * std::exp(h) : v + h;
    try {
        out.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("perturbing " + params[mu].label() + " gives an invalid config: " + e.what());
    }
    return out;
}

} // namespace exnet
