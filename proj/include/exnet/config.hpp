// config.hpp: physical description of a transport network and its JSON form

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "exnet/errors.hpp"
#include "exnet/units.hpp"

namespace exnet {

enum class SpectralKind { J1, J2, J3 };

inline std::string to_string(SpectralKind kind) {
    switch (kind) {
    case SpectralKind::J1: return "J1";
    case SpectralKind::J2: return "J2";
    case SpectralKind::J3: return "J3";
    }
    return "J1";
}

inline SpectralKind spectral_kind_from_string(const std::string& name) {
    if (name == "J1") return SpectralKind::J1;
    if (name == "J2") return SpectralKind::J2;
    if (name == "J3") return SpectralKind::J3;
    throw ConfigError("unknown spectral_kind '" + name + "' (expected J1, J2 or J3)");
}

// Spherical coordinates relative to site 1. theta is the polar angle from +z,
// phi the azimuth from +x. Distances in nm, angles in rad.
struct SphericalPosition {
    double r{0.0};
    double theta{0.0};
    double phi{0.0};
};

struct SiteSpec {
    double energy{2.0};    // energy unit
    double lifetime{10.0}; // ns
    SphericalPosition position{};
};

namespace defaults {
inline constexpr double energy = 2.0;         // eV
inline constexpr double lifetime = 10.0;      // ns
inline constexpr double J = 0.08;             // eV nm^3
inline constexpr double gamma_trap = 1.0e-3;  // eV
inline constexpr double gamma_inj = 1.0e-4;   // eV, steady-state runs only
inline constexpr double lambda_ph = 0.01;     // eV
inline constexpr double T_ph = 300.0;         // K
inline constexpr double omega_c = 0.1;        // eV
} // namespace defaults

struct NetworkConfig {
    std::vector<SiteSpec> sites;
    double J{defaults::J};
    double gamma_trap{defaults::gamma_trap};
    double gamma_inj{0.0};
    double lambda_ph{defaults::lambda_ph};
    double T_ph{defaults::T_ph};
    SpectralKind spectral_kind{SpectralKind::J1};
    double omega_c{defaults::omega_c};
    std::size_t source_index{1}; // 1-based site number
    std::size_t sink_index{0};   // 1-based; 0 means "last site"
    UnitSystem units{};

    std::size_t size() const noexcept { return sites.size(); }
    std::size_t source() const noexcept { return source_index; }
    std::size_t sink() const noexcept { return sink_index == 0 ? sites.size() : sink_index; }

    void validate() const {
        const std::size_t n = sites.size();
        if (n == 0) throw ConfigError("network needs at least one site");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = sites[i];
            const std::string tag = "site " + std::to_string(i + 1) + ": ";
            if (!(s.energy > 0.0) || !std::isfinite(s.energy))
                throw ConfigError(tag + "energy must be positive");
            if (!(s.lifetime > 0.0) || std::isnan(s.lifetime))
                throw ConfigError(tag + "lifetime must be positive");
            const auto& p = s.position;
            if (!std::isfinite(p.r) || !std::isfinite(p.theta) || !std::isfinite(p.phi))
                throw ConfigError(tag + "position must be finite");
            if (i == 0 && p.r != 0.0)
                throw ConfigError("site 1 is pinned at the origin (r must be 0)");
            if (i > 0 && !(p.r > 0.0))
                throw ConfigError(tag + "radial distance from site 1 must be positive");
        }
        auto non_negative = [](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError(std::string(name) + " must be non-negative and finite");
        };
        non_negative(J, "J");
        non_negative(gamma_trap, "Gamma_trap");
        non_negative(gamma_inj, "Gamma_inj");
        non_negative(lambda_ph, "lambda_ph");
        non_negative(T_ph, "T_ph");
        non_negative(omega_c, "omega_c");
        if (spectral_kind == SpectralKind::J1 && (!(omega_c > 0.0) || !(T_ph > 0.0)))
            throw ConfigError("spectral_kind J1 requires omega_c > 0 and T_ph > 0");
        if (source() < 1 || source() > n) throw ConfigError("source_index out of range");
        if (sink() < 1 || sink() > n) throw ConfigError("sink_index out of range");
        if (n > 1 && source() == sink()) throw ConfigError("source and sink must differ");
    }
};

// Degenerate network with default site parameters; positions left at the origin.
inline NetworkConfig default_network(std::size_t n) {
    NetworkConfig cfg;
    cfg.sites.assign(n, SiteSpec{defaults::energy, defaults::lifetime, {}});
    return cfg;
}

// Linear chain along +x with uniform nearest-neighbour spacing (nm).
inline NetworkConfig chain_network(std::size_t n, double spacing) {
    NetworkConfig cfg = default_network(n);
    for (std::size_t i = 1; i < n; ++i)
        cfg.sites[i].position = {spacing * static_cast<double>(i), std::numbers::pi / 2, 0.0};
    return cfg;
}

// Square in the xy-plane with the sink diagonally opposite the source:
// 1 at (0,0,0), 2 at (a,0,0), 3 at (0,a,0), 4 at (a,a,0).
inline NetworkConfig square_network(double side) {
    NetworkConfig cfg = default_network(4);
    const double half_pi = std::numbers::pi / 2;
    cfg.sites[1].position = {side, half_pi, 0.0};
    cfg.sites[2].position = {side, half_pi, half_pi};
    cfg.sites[3].position = {side * std::numbers::sqrt2, half_pi, std::numbers::pi / 4};
    return cfg;
}

// ---------------------------------------------------------------- JSON

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& item : j.items())
        if (!allowed.contains(item.key()))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

} // namespace detail

inline nlohmann::json to_json(const NetworkConfig& cfg) {
    nlohmann::json sites = nlohmann::json::array();
    for (const auto& s : cfg.sites) {
        sites.push_back({{"energy", s.energy},
                         {"lifetime", s.lifetime},
                         {"position", {{"r", s.position.r}, {"theta", s.position.theta}, {"phi", s.position.phi}}}});
    }
    return nlohmann::json{{"N", cfg.size()},
                          {"energy_unit", cfg.units.name()},
                          {"sites", sites},
                          {"J", cfg.J},
                          {"Gamma_trap", cfg.gamma_trap},
                          {"Gamma_inj", cfg.gamma_inj},
                          {"lambda_ph", cfg.lambda_ph},
                          {"T_ph", cfg.T_ph},
                          {"spectral_kind", to_string(cfg.spectral_kind)},
                          {"omega_c", cfg.omega_c},
                          {"source_index", cfg.source()},
                          {"sink_index", cfg.sink()}};
}

inline NetworkConfig network_from_json(const nlohmann::json& j) {
    using detail::get_or;
    detail::reject_unknown_keys(j,
                                {"N", "energy_unit", "sites", "J", "Gamma_trap", "Gamma_inj", "lambda_ph", "T_ph",
                                 "spectral_kind", "omega_c", "source_index", "sink_index"},
                                "NetworkConfig");
    if (!j.contains("sites") || !j.at("sites").is_array())
        throw ConfigError("NetworkConfig: 'sites' array is required");

    NetworkConfig cfg;
    cfg.units = UnitSystem::from_name(get_or<std::string>(j, "energy_unit", "eV"));
    const double scale = cfg.units.energy_scale;
    for (const auto& js : j.at("sites")) {
        detail::reject_unknown_keys(js, {"energy", "lifetime", "position"}, "SiteSpec");
        SiteSpec s;
        s.energy = get_or<double>(js, "energy", defaults::energy * scale);
        s.lifetime = get_or<double>(js, "lifetime", defaults::lifetime);
        if (js.contains("position")) {
            const auto& jp = js.at("position");
            detail::reject_unknown_keys(jp, {"r", "theta", "phi"}, "position");
            s.position = {get_or<double>(jp, "r", 0.0), get_or<double>(jp, "theta", 0.0),
                          get_or<double>(jp, "phi", 0.0)};
        }
        cfg.sites.push_back(s);
    }
    if (j.contains("N") && get_or<std::size_t>(j, "N", 0) != cfg.sites.size())
        throw ConfigError("NetworkConfig: N does not match the number of sites");
    cfg.J = get_or<double>(j, "J", defaults::J * scale);
    cfg.gamma_trap = get_or<double>(j, "Gamma_trap", defaults::gamma_trap * scale);
    cfg.gamma_inj = get_or<double>(j, "Gamma_inj", 0.0);
    cfg.lambda_ph = get_or<double>(j, "lambda_ph", defaults::lambda_ph * scale);
    cfg.T_ph = get_or<double>(j, "T_ph", defaults::T_ph);
    cfg.spectral_kind = spectral_kind_from_string(get_or<std::string>(j, "spectral_kind", "J1"));
    cfg.omega_c = get_or<double>(j, "omega_c", defaults::omega_c * scale);
    cfg.source_index = get_or<std::size_t>(j, "source_index", 1);
    cfg.sink_index = get_or<std::size_t>(j, "sink_index", 0);
    cfg.validate();
    return cfg;
}

// Re-express every energy-valued field in another energy unit.
inline NetworkConfig with_energy_unit(NetworkConfig cfg, const UnitSystem& units) {
    const double f = units.energy_scale / cfg.units.energy_scale;
    for (auto& s : cfg.sites) s.energy *= f;
    cfg.J *= f;
    cfg.gamma_trap *= f;
    cfg.gamma_inj *= f;
    cfg.lambda_ph *= f;
    cfg.omega_c *= f;
    cfg.units = units;
    return cfg;
}

} // namespace exnet
