// sweep.hpp: chain sweeps over spacing and site count, phonon-coupling
// sweeps, and the fixed three-geometry comparison preset

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exnet/config.hpp"
#include "exnet/errors.hpp"
#include "exnet/fim.hpp"
#include "exnet/geometry.hpp"

namespace exnet {

struct SweepPoint {
    double x{0.0};
    NetworkConfig config;
    FimResult result;
    CouplingStats nn;
    std::map<ParameterGroup, GroupImportance> groups;
};

struct SweepResult {
    std::string variable;
    FigureOfMerit kind{FigureOfMerit::arrival};
    std::vector<SweepPoint> points;
};

// Copy everything except the sites from `env` onto `cfg`.
inline NetworkConfig with_environment(NetworkConfig cfg, const NetworkConfig& env) {
    cfg.J = env.J;
    cfg.gamma_trap = env.gamma_trap;
    cfg.gamma_inj = env.gamma_inj;
    cfg.lambda_ph = env.lambda_ph;
    cfg.T_ph = env.T_ph;
    cfg.spectral_kind = env.spectral_kind;
    cfg.omega_c = env.omega_c;
    cfg.units = env.units;
    return cfg;
}

inline SweepPoint sweep_point(double x, const NetworkConfig& cfg, FigureOfMerit kind, const FimOptions& opt) {
    SweepPoint p;
    p.x = x;
    p.config = cfg;
    p.result = sensitivity(cfg, kind, opt);
    p.nn = nn_coupling_stats(cfg);
    p.groups = importance_by_group(p.result);
    return p;
}

enum class ChainMode {
    spacing,    // values are NN spacings (nm), site count fixed
    fixed_nn,   // values are site counts, NN spacing fixed
    fixed_span, // values are site counts, source-sink distance fixed
};

inline std::string to_string(ChainMode m) {
    switch (m) {
    case ChainMode::spacing: return "spacing";
    case ChainMode::fixed_nn: return "fixed_nn";
    case ChainMode::fixed_span: return "fixed_span";
    }
    return "spacing";
}

inline ChainMode chain_mode_from_string(const std::string& s) {
    if (s == "spacing") return ChainMode::spacing;
    if (s == "fixed_nn") return ChainMode::fixed_nn;
    if (s == "fixed_span") return ChainMode::fixed_span;
    throw ConfigError("unknown chain sweep mode '" + s + "' (expected spacing, fixed_nn or fixed_span)");
}

struct ChainSweepSpec {
    ChainMode mode{ChainMode::spacing};
    std::vector<double> values;
    std::size_t sites{4};  // spacing mode
    double distance{1.0};  // NN spacing (fixed_nn) or source-sink distance (fixed_span), nm
    FigureOfMerit kind{FigureOfMerit::arrival};
    NetworkConfig environment{default_network(4)};
};

inline NetworkConfig chain_for(const ChainSweepSpec& spec, double value) {
    std::size_t n = spec.sites;
    double spacing = value;
    if (spec.mode != ChainMode::spacing) {
        if (!(value >= 2.0) || value != std::floor(value)) throw ConfigError("chain site counts must be integers >= 2");
        n = static_cast<std::size_t>(value);
        spacing = spec.mode == ChainMode::fixed_nn ? spec.distance : spec.distance / static_cast<double>(n - 1);
    }
    if (!(spacing > 0.0)) throw ConfigError("chain spacing must be positive");
    NetworkConfig cfg = with_environment(chain_network(n, spacing), spec.environment);
    // degenerate chain: every site copies the template's first site
    if (!spec.environment.sites.empty())
        for (auto& s : cfg.sites) {
            s.energy = spec.environment.sites.front().energy;
            s.lifetime = spec.environment.sites.front().lifetime;
        }
    cfg.validate();
    return cfg;
}

inline SweepResult sweep_chain(const ChainSweepSpec& spec, const FimOptions& opt = {}) {
    if (spec.values.empty()) throw ConfigError("sweep needs at least one value");
    SweepResult res;
    res.variable = spec.mode == ChainMode::spacing ? "spacing_nm" : "sites";
    res.kind = spec.kind;
    for (const double v : spec.values) res.points.push_back(sweep_point(v, chain_for(spec, v), spec.kind, opt));
    return res;
}

inline SweepResult sweep_lambda(const NetworkConfig& cfg, const std::vector<double>& lambdas, FigureOfMerit kind,
                                const FimOptions& opt = {}) {
    if (lambdas.empty()) throw ConfigError("sweep needs at least one value");
    SweepResult res;
    res.variable = "lambda_ph";
    res.kind = kind;
    for (const double l : lambdas) {
        NetworkConfig c = cfg;
        c.lambda_ph = l;
        c.validate();
        res.points.push_back(sweep_point(l, c, kind, opt));
    }
    return res;
}

// ---------------------------------------------------------------- comparison preset

struct NamedGeometry {
    std::string name;
    NetworkConfig config;
};

// Irregular four-site network used as the third preset geometry (nm, Cartesian).
inline NetworkConfig irregular_network() {
    NetworkConfig cfg = default_network(4);
    set_positions(cfg, {Vec3(0.0, 0.0, 0.0), Vec3(0.9, 0.6, 0.3), Vec3(1.4, -0.5, 0.4), Vec3(2.1, 0.2, -0.3)});
    return cfg;
}

inline std::vector<NamedGeometry> preset_geometries() {
    return {{"chain", chain_network(4, 3.0)}, {"square", square_network(1.0)}, {"irregular", irregular_network()}};
}

inline constexpr double kPresetLambdas[] = {1e-3, 1e-1};
inline constexpr SpectralKind kPresetSpectra[] = {SpectralKind::J1, SpectralKind::J2, SpectralKind::J3};

struct PresetPanel {
    std::string geometry;
    SpectralKind spectral_kind{SpectralKind::J1};
    double lambda_ph{0.0};
    NetworkConfig config;
    FimResult result;
};

// Every geometry under every spectrum at both coupling strengths.
inline std::vector<PresetPanel> comparison_preset(FigureOfMerit kind = FigureOfMerit::arrival, const FimOptions& opt = {},
                                                  const NetworkConfig& environment = default_network(4)) {
    std::vector<PresetPanel> out;
    for (const auto& geo : preset_geometries())
        for (const double lam : kPresetLambdas)
            for (const SpectralKind sk : kPresetSpectra) {
                PresetPanel p;
                p.geometry = geo.name;
                p.spectral_kind = sk;
                p.lambda_ph = lam;
                p.config = with_environment(geo.config, environment);
                p.config.spectral_kind = sk;
                p.config.lambda_ph = lam;
                p.config.validate();
                p.result = sensitivity(p.config, kind, opt);
                out.push_back(std::move(p));
            }
    return out;
}

inline double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("cosine similarity of a zero vector");
    return a.dot(b) / (na * nb);
}

// Importance profiles of one spectrum stacked over every (geometry, lambda) panel, in preset order.
inline Eigen::VectorXd stacked_profile(const std::vector<PresetPanel>& panels, SpectralKind sk) {
    std::vector<double> v;
    for (const auto& p : panels)
        if (p.spectral_kind == sk) v.insert(v.end(), p.result.importance.data(), p.result.importance.data() + p.result.importance.size());
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace exnet
