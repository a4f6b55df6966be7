// spectral.hpp: phonon spectral densities and the noise kernel S(omega)

#pragma once

#include <cmath>
#include <numbers>

#include "exnet/config.hpp"
#include "exnet/errors.hpp"

namespace exnet {

// Positive omega means the system gives energy to the bath (emission).
struct SpectralDensity {
    SpectralKind kind{SpectralKind::J1};
    double lambda{0.0};  // coupling strength, energy unit
    double omega_c{0.0}; // cutoff, energy unit (J1 only)
    double kT{0.0};      // k_B T_ph, energy unit

    static SpectralDensity from_config(const NetworkConfig& cfg) {
        return {cfg.spectral_kind, cfg.lambda_ph, cfg.omega_c, cfg.units.kB() * cfg.T_ph};
    }
};

inline double bose_einstein(double omega, double kT) { return 1.0 / std::expm1(omega / kT); }

// J1: lambda (|w|/wc)^3 exp(-(w/wc)^2) [n_BE(|w|) + Theta(w)]
// J2: lambda Theta(w)
// J3: lambda
// with Theta(0) = 0. J1 obeys S(w)/S(-w) = exp(w/kT).
inline double noise_kernel(const SpectralDensity& sd, double omega) {
    if (!std::isfinite(omega)) throw ConfigError("noise kernel needs a finite frequency");
    const double step = omega > 0.0 ? 1.0 : 0.0;
    switch (sd.kind) {
    case SpectralKind::J1: {
        if (!(sd.kT > 0.0)) throw ConfigError("J1 spectral density requires T_ph > 0");
        if (!(sd.omega_c > 0.0)) throw ConfigError("J1 spectral density requires omega_c > 0");
        if (omega == 0.0) return 0.0;
        const double x = std::abs(omega) / sd.omega_c;
        return sd.lambda * x * x * x * std::exp(-x * x) * (bose_einstein(std::abs(omega), sd.kT) + step);
    }
    case SpectralKind::J2: return sd.lambda * step;
    case SpectralKind::J3: return sd.lambda;
    }
    return 0.0;
}

// Real part of the one-sided bath correlation transform; Lamb-shift parts are dropped.
inline double redfield_rate(const SpectralDensity& sd, double omega) {
    return std::numbers::pi * noise_kernel(sd, omega);
}

} // namespace exnet
