// steady_state.hpp: stationary state of the driven network and its trap current

#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "exnet/dynamics.hpp"
#include "exnet/errors.hpp"
#include "exnet/generator.hpp"

namespace exnet {

struct SteadyState {
    Operator rho;
    double current{0.0};        // Gamma_trap <sink|rho|sink>, energy unit
    double current_per_ns{0.0}; // same flux in 1/ns
    double residual{0.0};       // ||G vec(rho)||
};

// Solves G rho = 0, tr rho = 1 on the part of state space reachable from the
// ground state (the trap level is disconnected in steady mode). One redundant
// population row is replaced by the trace constraint.
inline SteadyState steady_state(const Generator& gen) {
    if (gen.mode != Mode::steady) throw ConfigError("steady_state needs a steady-mode generator");
    const std::size_t d = gen.dim();
    const std::size_t g = HilbertIndex::ground();
    const Operator ground = transition(d, g, g);

    const RealCoordinates coords(gen.matrix, ground);
    const Eigen::MatrixXd M = coords.restrict(gen.matrix);
    const auto m = static_cast<Eigen::Index>(coords.size());

    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-12);
    if (m > 0 && lu.rank() < m - 1) throw NumericError("non-unique steady state");

    Eigen::MatrixXd A = M;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    const auto replace = static_cast<Eigen::Index>(coords.diagonal(g));
    A.row(replace).setZero();
    for (std::size_t c = 0; c < coords.size(); ++c)
        if (coords.coords()[c].part == RealCoordinates::Coord::diagonal) A(replace, static_cast<Eigen::Index>(c)) = 1.0;
    b(replace) = 1.0;

    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    SteadyState ss;
    ss.rho = coords.to_operator(x);
    ss.residual = (gen.matrix * vectorize(ss.rho)).norm();
    const auto sink = static_cast<Eigen::Index>(gen.index.site(gen.rates.sink));
    ss.current = gen.rates.gamma_trap * ss.rho(sink, sink).real();
    ss.current_per_ns = ss.current * gen.units.ns_to_time(1.0);
    if (!std::isfinite(ss.current)) throw NumericError("steady state solve produced non-finite values");
    return ss;
}

} // namespace exnet
