// distributions.hpp: arrival- and loss-time densities from exact flux identities

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "exnet/config.hpp"
#include "exnet/dynamics.hpp"
#include "exnet/errors.hpp"
#include "exnet/generator.hpp"

namespace exnet {

enum class DistributionKind { arrival, loss };

inline std::string to_string(DistributionKind k) { return k == DistributionKind::arrival ? "arrival" : "loss"; }

struct ArrivalDistribution {
    DistributionKind kind{DistributionKind::arrival};
    std::vector<double> times_ns;
    std::vector<double> f; // 1/ns
    double total{0.0};     // P_max (arrival) or P_loss (loss)
};

inline constexpr double kTransportFloor = 1e-10;

inline std::vector<double> trapezoid_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double h = 0.5 * (t[k] - t[k - 1]);
        w[k - 1] += h;
        w[k] += h;
    }
    return w;
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
    return s;
}

// f(t) = Gamma_trap rho_sink,sink(t) / P_max: the trap is fed only by the
// extraction channel, so this is exactly d/dt P_trap / P_max.
inline ArrivalDistribution arrival_time_distribution(const Trajectory& traj, const Generator& gen) {
    const double p_max = traj.final_trap;
    if (!(gen.rates.gamma_trap > 0.0) || !(p_max > kTransportFloor))
        throw NumericError("no successful transport (P_max below 1e-10)");
    const double per_ns = gen.units.ns_to_time(1.0);
    ArrivalDistribution out{DistributionKind::arrival, traj.times_ns, {}, p_max};
    out.f.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        out.f.push_back(gen.rates.gamma_trap * per_ns * traj.site(k, gen.rates.sink) / p_max);
    return out;
}

// f(t) = sum_i rho_ii(t) / tau_i / P_loss, the recombination flux into ground.
inline ArrivalDistribution loss_time_distribution(const Trajectory& traj, const NetworkConfig& cfg) {
    const double p_loss = traj.final_ground;
    if (!(p_loss > kTransportFloor)) throw NumericError("no successful transport (P_loss below 1e-10)");
    ArrivalDistribution out{DistributionKind::loss, traj.times_ns, {}, p_loss};
    out.f.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double flux = 0.0;
        for (std::size_t i = 1; i <= cfg.size(); ++i) flux += traj.site(k, i) / cfg.sites[i - 1].lifetime;
        out.f.push_back(flux / p_loss);
    }
    return out;
}

inline ArrivalDistribution time_distribution(DistributionKind kind, const Trajectory& traj, const Generator& gen,
                                             const NetworkConfig& cfg) {
    return kind == DistributionKind::arrival ? arrival_time_distribution(traj, gen)
                                             : loss_time_distribution(traj, cfg);
}

struct Moments {
    double mean{0.0};
    double variance{0.0};
};

inline Moments arrival_moments(const ArrivalDistribution& dist) {
    const auto& t = dist.times_ns;
    const double norm = trapezoid(t, dist.f);
    std::vector<double> y(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) y[k] = t[k] * dist.f[k];
    const double mean = trapezoid(t, y) / norm;
    for (std::size_t k = 0; k < t.size(); ++k) y[k] = (t[k] - mean) * (t[k] - mean) * dist.f[k];
    return {mean, trapezoid(t, y) / norm};
}

} // namespace exnet
