// pauli.hpp: Pauli operators on the bare two-level basis {|0>, |1>}.
//
// Sign convention: |0> is the lower (ground) level and carries Z = -1, so
// Z = diag(-1, +1), X = [[0, 1], [1, 0]], Y = [[0, i], [-i, 0]] (XY = iZ).
// With this choice (Delta/2) Z puts the excited level at +Delta/2 and the
// flip-flop term g/2 (XX + YY) mediates exchange with the usual SWPT signs.

#pragma once

#include "effham/types.hpp"

#include <array>

namespace effham {

const Mat2& pauli_matrix(Pauli p);

// Kronecker product, first argument is the more significant factor.
template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    constexpr int R = (A::RowsAtCompileTime == Eigen::Dynamic || B::RowsAtCompileTime == Eigen::Dynamic)
                          ? Eigen::Dynamic
                          : int(A::RowsAtCompileTime) * int(B::RowsAtCompileTime);
    constexpr int C = (A::ColsAtCompileTime == Eigen::Dynamic || B::ColsAtCompileTime == Eigen::Dynamic)
                          ? Eigen::Dynamic
                          : int(A::ColsAtCompileTime) * int(B::ColsAtCompileTime);
    Eigen::Matrix<cplx, R, C> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Two-qubit Pauli string with q1 as the more significant factor.
Mat4 pauli_string(Pauli q1, Pauli q2);
Mat4 pauli_string(const std::array<Pauli, 2>& ops);

// ZI, IZ, XX, YY, ZZ in Term order.
const std::array<Mat4, kNumTerms>& coefficient_basis();

// Normalized +1/-1 eigenvector of the corresponding Pauli matrix.
Vec2c pauli_eigenstate(PauliState s);
Vec4c product_state(PauliState q1, PauliState q2);

// H_eff in rad/ns built from MHz coefficients.
Mat4 effective_hamiltonian(const CoefficientVector& c);

}  // namespace effham
