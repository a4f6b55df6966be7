// hamiltonian.hpp: Hilbert-space layout and the single-excitation system Hamiltonian

#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "exnet/config.hpp"
#include "exnet/geometry.hpp"

namespace exnet {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

// Basis layout: ground = 0, sites 1..N, trap = N+1.
struct HilbertIndex {
    std::size_t sites{0};

    static constexpr std::size_t ground() noexcept { return 0; }
    static constexpr std::size_t site(std::size_t i) noexcept { return i; }
    std::size_t trap() const noexcept { return sites + 1; }
    std::size_t dim() const noexcept { return sites + 2; }
};

// |a><b| in a space of dimension d.
inline Operator transition(std::size_t d, std::size_t a, std::size_t b) {
    Operator op = Operator::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1.0;
    return op;
}

// Site energies on the diagonal, J/r^3 hopping between every pair of sites.
// Ground and trap rows stay zero.
inline Operator build_hamiltonian(const NetworkConfig& cfg) {
    cfg.validate();
    const HilbertIndex idx{cfg.size()};
    const auto pos = site_positions(cfg);
    const auto d = static_cast<Eigen::Index>(idx.dim());
    Operator H = Operator::Zero(d, d);
    for (std::size_t i = 1; i <= cfg.size(); ++i) {
        const auto a = static_cast<Eigen::Index>(idx.site(i));
        H(a, a) = cfg.sites[i - 1].energy;
        for (std::size_t j = i + 1; j <= cfg.size(); ++j) {
            const auto b = static_cast<Eigen::Index>(idx.site(j));
            const double v = dipole_coupling(pos[i - 1], pos[j - 1], cfg.J);
            H(a, b) = v;
            H(b, a) = v;
        }
    }
    return H;
}

} // namespace exnet
