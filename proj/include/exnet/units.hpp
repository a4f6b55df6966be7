// units.hpp: energy/time unit bookkeeping
//
// Energies (and rates) live in a configurable energy unit, eV by default.
// Time inside the integrator is measured in hbar / energy-unit; everything
// user facing (lifetimes, time grids) is in nanoseconds.

#pragma once

#include <string>
#include <string_view>

#include "exnet/errors.hpp"

namespace exnet {

struct UnitSystem {
    static constexpr double hbar_eV_s = 6.582119569e-16;
    static constexpr double kB_eV_K = 8.617333262e-5;

    // Number of internal energy units per eV (1 for eV, 1000 for meV).
    double energy_scale{1.0};

    static UnitSystem from_name(std::string_view name) {
        if (name == "eV") return UnitSystem{1.0};
        if (name == "meV") return UnitSystem{1.0e3};
        throw ConfigError("unknown energy unit '" + std::string(name) + "' (expected eV or meV)");
    }

    std::string name() const { return energy_scale == 1.0e3 ? "meV" : "eV"; }

    double hbar() const { return hbar_eV_s * energy_scale; }
    double kB() const { return kB_eV_K * energy_scale; }

    // Internal time unit is hbar / (energy unit).
    double ns_to_time(double ns) const { return ns * 1.0e-9 / hbar(); }
    double time_to_ns(double t) const { return t * hbar() * 1.0e9; }

    double rate_from_lifetime(double tau_ns) const { return hbar() / (tau_ns * 1.0e-9); }
    double lifetime_from_rate(double rate) const { return hbar() / rate * 1.0e9; }
};

} // namespace exnet
