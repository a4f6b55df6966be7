// superop.hpp: column-stacked vectorization and superoperator builders
//
// vec(rho)[i + d*j] = rho(i, j), so vec(X rho Y) = (Y^T (x) X) vec(rho).

#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "exnet/hamiltonian.hpp"

namespace exnet {

using SuperOperator = Eigen::MatrixXcd;

inline Eigen::VectorXcd vectorize(const Operator& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

inline Operator unvectorize(const Eigen::VectorXcd& v, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return Eigen::Map<const Operator>(v.data(), n, n);
}

inline constexpr std::size_t vec_index(std::size_t row, std::size_t col, std::size_t d) noexcept {
    return row + d * col;
}

// rho -> X rho Y
inline SuperOperator sandwich(const Operator& X, const Operator& Y) {
    return Eigen::kroneckerProduct(Y.transpose(), X).eval();
}

// rho -> X rho
inline SuperOperator left_multiply(const Operator& X) {
    return sandwich(X, Operator::Identity(X.rows(), X.cols()));
}

// rho -> rho Y
inline SuperOperator right_multiply(const Operator& Y) {
    return sandwich(Operator::Identity(Y.rows(), Y.cols()), Y);
}

// rho -> -i [H, rho]
inline SuperOperator commutator_superop(const Operator& H) {
    return Complex(0.0, -1.0) * (left_multiply(H) - right_multiply(H));
}

// rho -> L rho L^dag - 1/2 {L^dag L, rho}
inline SuperOperator lindblad_dissipator(const Operator& L) {
    const Operator LdL = L.adjoint() * L;
    return sandwich(L, L.adjoint()) - 0.5 * (left_multiply(LdL) + right_multiply(LdL));
}

inline Operator apply_superop(const SuperOperator& G, const Operator& rho) {
    return unvectorize(G * vectorize(rho), static_cast<std::size_t>(rho.rows()));
}

} // namespace exnet
