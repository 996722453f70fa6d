// Independent reference implementations used only by the tests. Nothing here
// calls into the library's linear algebra.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <complex>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;

inline MatC pauli(char p) {
    MatC m(2, 2);
    switch (p) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cd(0, 1), cd(0, -1), 0; break;
        default: m << -1, 0, 0, 1; break;  // Z, ground state at -1
    }
    return m;
}

inline MatC kron(const MatC& a, const MatC& b) {
    MatC out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline MatC op3(char a, char b, char c) { return kron(kron(pauli(a), pauli(b)), pauli(c)); }

// Padé scaling-and-squaring exponential of -i h t.
inline MatC expm(const MatC& h, double t) {
    const MatC a = cd(0, -t) * h;
    return a.exp();
}

// Eigenvalues from the general (non-Hermitian) solver, real parts sorted.
inline std::vector<double> eigenvalues(const MatC& h) {
    Eigen::ComplexEigenSolver<MatC> s(h);
    std::vector<double> v;
    for (Eigen::Index i = 0; i < s.eigenvalues().size(); ++i) v.push_back(s.eigenvalues()(i).real());
    std::sort(v.begin(), v.end());
    return v;
}

// Single-qubit Pauli eigenstate from a label such as "X+".
inline Eigen::VectorXcd state(const char* label) {
    Eigen::VectorXcd v(2);
    const double r = 1.0 / std::sqrt(2.0);
    const bool plus = label[1] == '+';
    switch (label[0]) {
        case 'Z': v << (plus ? 0.0 : 1.0), (plus ? 1.0 : 0.0); break;  // Z = diag(-1, 1): Z+ is |1>
        case 'X': v << r, (plus ? r : -r); break;
        default: v << r, (plus ? cd(0, -r) : cd(0, r)); break;  // Y = [[0, i], [-i, 0]]
    }
    return v;
}

// Two-qubit effective Hamiltonian (rad/ns) from MHz coefficients, assembled term by term.
inline MatC effective_h(const std::array<double, 5>& c) {
    const double s = 2.0 * 3.14159265358979323846 * 1e-3;
    return s * (c[0] * kron(pauli('Z'), pauli('I')) + c[1] * kron(pauli('I'), pauli('Z')) +
                c[2] * kron(pauli('X'), pauli('X')) + c[3] * kron(pauli('Y'), pauli('Y')) +
                c[4] * kron(pauli('Z'), pauli('Z')));
}

// <psi0| U^dagger O U |psi0> for the 4x4 effective evolution.
inline double effective_expectation(const std::array<double, 5>& c, const char* s1, const char* s2, char o1, char o2,
                                    double t) {
    const MatC u = expm(effective_h(c), t);
    const Eigen::VectorXcd psi = u * kron(state(s1), state(s2));
    return (psi.adjoint() * kron(pauli(o1), pauli(o2)) * psi)(0, 0).real();
}

// Greedy residual-variance selection by explicit least squares on the
// centred columns: each step solves a fresh regression for every candidate.
inline std::vector<Eigen::Index> brute_force_greedy(const Eigen::MatrixXd& values, std::size_t k) {
    const Eigen::MatrixXd x = values.rowwise() - values.colwise().mean();
    std::vector<Eigen::Index> picked;
    for (std::size_t step = 0; step < k; ++step) {
        Eigen::Index best = -1;
        double best_value = -1.0;
        Eigen::MatrixXd basis(x.rows(), static_cast<Eigen::Index>(picked.size()));
        for (std::size_t i = 0; i < picked.size(); ++i) basis.col(static_cast<Eigen::Index>(i)) = x.col(picked[i]);
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
            Eigen::VectorXd r = x.col(j);
            if (!picked.empty()) r -= basis * basis.colPivHouseholderQr().solve(r);
            const double v = r.squaredNorm();
            if (v > best_value) {
                best_value = v;
                best = j;
            }
        }
        picked.push_back(best);
    }
    return picked;
}

}  // namespace oracle
