#include "effham/pauli.hpp"

#include <cmath>

namespace effham {

namespace {

std::array<Mat2, 4> make_paulis() {
    const cplx i{0.0, 1.0};
    std::array<Mat2, 4> p;
    p[0] = Mat2::Identity();
    p[1] << 0.0, 1.0, 1.0, 0.0;
    p[2] << 0.0, i, -i, 0.0;
    p[3] << -1.0, 0.0, 0.0, 1.0;
    return p;
}

std::array<Mat4, kNumTerms> make_basis() {
    return {pauli_string(Pauli::Z, Pauli::I), pauli_string(Pauli::I, Pauli::Z),
            pauli_string(Pauli::X, Pauli::X), pauli_string(Pauli::Y, Pauli::Y),
            pauli_string(Pauli::Z, Pauli::Z)};
}

}  // namespace

const Mat2& pauli_matrix(Pauli p) {
    static const std::array<Mat2, 4> paulis = make_paulis();
    return paulis[static_cast<std::size_t>(p)];
}

Mat4 pauli_string(Pauli q1, Pauli q2) { return kron(pauli_matrix(q1), pauli_matrix(q2)); }

Mat4 pauli_string(const std::array<Pauli, 2>& ops) { return pauli_string(ops[0], ops[1]); }

const std::array<Mat4, kNumTerms>& coefficient_basis() {
    static const std::array<Mat4, kNumTerms> basis = make_basis();
    return basis;
}

Vec2c pauli_eigenstate(PauliState s) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    Vec2c v;
    switch (s) {
        case PauliState::Zp: v << 0.0, 1.0; break;
        case PauliState::Zm: v << 1.0, 0.0; break;
        case PauliState::Xp: v << r, r; break;
        case PauliState::Xm: v << r, -r; break;
        // Y|v> = +|v> for Y = [[0, i], [-i, 0]]
        case PauliState::Yp: v << r, -i * r; break;
        case PauliState::Ym: v << r, i * r; break;
    }
    return v;
}

Vec4c product_state(PauliState q1, PauliState q2) { return kron(pauli_eigenstate(q1), pauli_eigenstate(q2)); }

Mat4 effective_hamiltonian(const CoefficientVector& c) {
    const auto& basis = coefficient_basis();
    Mat4 h = Mat4::Zero();
    for (std::size_t k = 0; k < kNumTerms; ++k) h += (kRadPerNsPerMHz * c[k]) * basis[k];
    return h;
}

}  // namespace effham
