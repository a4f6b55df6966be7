// generator.hpp: assembly of the full Liouvillian acting on vec(rho)

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "exnet/config.hpp"
#include "exnet/errors.hpp"
#include "exnet/hamiltonian.hpp"
#include "exnet/redfield.hpp"
#include "exnet/spectral.hpp"
#include "exnet/superop.hpp"

namespace exnet {

// transient: one exciton starts in the network and leaves through the trap
//            (sink -> trap) or recombination (site -> ground).
// steady:    the source is re-populated from ground at Gamma_inj and the
//            extracted exciton is recycled (sink -> ground).
enum class Mode { transient, steady };

struct ChannelSet {
    bool coherent{true};
    bool redfield{true};
    bool trap{true};
    bool decay{true};
    bool injection{false};
};

// Rates in the internal energy unit, kept alongside the generator so that
// flux-based observables do not need the config again.
struct RateSummary {
    double gamma_trap{0.0};
    double gamma_inj{0.0};
    std::vector<double> decay; // per site, index 0 = site 1
    std::size_t source{1};
    std::size_t sink{1};
};

struct Generator {
    SuperOperator matrix;
    HilbertIndex index{};
    Mode mode{Mode::transient};
    ChannelSet channels{};
    RateSummary rates{};
    UnitSystem units{};
    double spectral_width{0.0}; // max - min eigenvalue of the site Hamiltonian

    std::size_t dim() const noexcept { return index.dim(); }
};

// Channel switches on top of the physical config, used to isolate parts of
// the dynamics (e.g. purely coherent evolution).
struct GeneratorOptions {
    bool redfield{true};
    bool trap{true};
    bool decay{true};
};

inline Generator build_generator(const NetworkConfig& cfg, Mode mode, const GeneratorOptions& opt = {}) {
    cfg.validate();
    const HilbertIndex idx{cfg.size()};
    const std::size_t d = idx.dim();
    const std::size_t g = HilbertIndex::ground();
    const std::size_t source = idx.site(cfg.source());
    const std::size_t sink = idx.site(cfg.sink());

    Generator gen;
    gen.index = idx;
    gen.mode = mode;
    gen.units = cfg.units;
    gen.rates.source = cfg.source();
    gen.rates.sink = cfg.sink();

    const Operator H = build_hamiltonian(cfg);
    gen.matrix = commutator_superop(H);
    {
        const Eigen::Index n = static_cast<Eigen::Index>(cfg.size());
        Eigen::SelfAdjointEigenSolver<Operator> site_solver(H.block(1, 1, n, n), Eigen::EigenvaluesOnly);
        const auto& ev = site_solver.eigenvalues();
        gen.spectral_width = ev(n - 1) - ev(0);
    }

    gen.channels.redfield = opt.redfield && cfg.lambda_ph > 0.0;
    if (gen.channels.redfield)
        gen.matrix += redfield_tensor(H, coupling_operators(cfg), SpectralDensity::from_config(cfg));

    gen.channels.trap = opt.trap && cfg.gamma_trap > 0.0;
    gen.rates.gamma_trap = gen.channels.trap ? cfg.gamma_trap : 0.0;
    if (gen.channels.trap) {
        const std::size_t target = mode == Mode::steady ? g : idx.trap();
        gen.matrix += lindblad_dissipator(std::sqrt(cfg.gamma_trap) * transition(d, target, sink));
    }

    gen.channels.decay = opt.decay;
    gen.rates.decay.assign(cfg.size(), 0.0);
    if (opt.decay) {
        for (std::size_t i = 1; i <= cfg.size(); ++i) {
            const double rate = cfg.units.rate_from_lifetime(cfg.sites[i - 1].lifetime);
            gen.rates.decay[i - 1] = rate;
            if (rate > 0.0) gen.matrix += lindblad_dissipator(std::sqrt(rate) * transition(d, g, idx.site(i)));
        }
    }

    if (mode == Mode::steady) {
        gen.channels.injection = cfg.gamma_inj > 0.0;
        gen.rates.gamma_inj = cfg.gamma_inj;
        if (gen.channels.injection)
            gen.matrix += lindblad_dissipator(std::sqrt(cfg.gamma_inj) * transition(d, source, g));
    }

    if (!gen.matrix.allFinite()) throw NumericError("generator has non-finite entries");
    return gen;
}

} // namespace exnet
