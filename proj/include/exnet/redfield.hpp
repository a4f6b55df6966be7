// redfield.hpp: non-secular Bloch-Redfield tensor for site-local phonon baths

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "exnet/config.hpp"
#include "exnet/errors.hpp"
#include "exnet/hamiltonian.hpp"
#include "exnet/spectral.hpp"
#include "exnet/superop.hpp"

namespace exnet {

struct Eigensystem {
    Eigen::VectorXd values; // ascending
    Operator vectors;       // columns, phase fixed
};

// Hermitian eigendecomposition with a reproducible basis: ascending
// eigenvalues, ties broken lexicographically on the (phase-fixed) components,
// each eigenvector rotated so that its largest component is real positive.
inline Eigensystem hermitian_eigensystem(const Operator& H) {
    if (H.rows() != H.cols() || H.rows() == 0) throw ConfigError("Hamiltonian must be square and non-empty");
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ConfigError("Hamiltonian is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Operator> solver(H);
    if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");

    const Eigen::Index n = H.rows();
    Operator vecs = solver.eigenvectors();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index arg = 0;
        vecs.col(k).cwiseAbs().maxCoeff(&arg);
        const Complex c = vecs(arg, k);
        vecs.col(k) *= std::conj(c) / std::abs(c);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Eigen::VectorXd& vals = solver.eigenvalues();
    const double tie = 1e-12 * scale;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (std::abs(vals(a) - vals(b)) > tie) return vals(a) < vals(b);
        for (Eigen::Index r = 0; r < n; ++r) {
            const double x = vecs(r, a).real();
            const double y = vecs(r, b).real();
            if (std::abs(x - y) > 1e-12) return x < y;
        }
        return false;
    });

    Eigensystem es{Eigen::VectorXd(n), Operator(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        es.values(k) = vals(order[static_cast<std::size_t>(k)]);
        es.vectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }
    return es;
}

// One projector |i><i| per site; ground and trap are untouched by the bath.
inline std::vector<Operator> coupling_operators(const NetworkConfig& cfg) {
    const HilbertIndex idx{cfg.size()};
    std::vector<Operator> ops;
    ops.reserve(cfg.size());
    for (std::size_t i = 1; i <= cfg.size(); ++i) ops.push_back(transition(idx.dim(), idx.site(i), idx.site(i)));
    return ops;
}

// For each coupling operator A the dissipator is
//   rho -> -[A, Lambda rho - rho Lambda^dag],
// Lambda_ab = A_ab * gamma(e_b - e_a) in the eigenbasis of H, where
// gamma(w) = pi S(w). Eigenbasis transition b -> a then happens at rate
// 2 |A_ab|^2 gamma(e_b - e_a).
inline SuperOperator redfield_tensor(const Operator& H, const std::vector<Operator>& coupling_ops,
                                     const SpectralDensity& sd) {
    const Eigen::Index d = H.rows();
    SuperOperator R = SuperOperator::Zero(d * d, d * d);
    if (sd.lambda == 0.0 || coupling_ops.empty()) return R;

    const Eigensystem es = hermitian_eigensystem(H);
    Eigen::MatrixXd rates(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) rates(a, b) = redfield_rate(sd, es.values(b) - es.values(a));

    const Operator& U = es.vectors;
    for (const auto& A : coupling_ops) {
        const Operator A_eig = U.adjoint() * A * U;
        const Operator Lambda = U * A_eig.cwiseProduct(rates.cast<Complex>()) * U.adjoint();
        const Operator Lambda_dag = Lambda.adjoint();
        R += sandwich(A, Lambda_dag) + sandwich(Lambda, A) - left_multiply(A * Lambda) - right_multiply(Lambda_dag * A);
    }
    return R;
}

} // namespace exnet
