// linalg.hpp: Hermitian eigensystems, exponentials and their derivatives.

#pragma once

#include "effham/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace effham {

// Eigendecomposition H = V diag(lambda) V^dagger of a Hermitian matrix, with
// exp(i tau H) and its Frechet derivative (Daleckii-Krein divided differences).
template <int N>
struct HermitianSpectrum {
    using Matrix = Eigen::Matrix<cplx, N, N>;
    using RealVector = Eigen::Matrix<double, N, 1>;

    RealVector values;  // ascending
    Matrix vectors;     // columns

    HermitianSpectrum() = default;
    explicit HermitianSpectrum(const Matrix& h) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        if (solver.info() != Eigen::Success) throw Error("Hermitian eigendecomposition failed");
        values = solver.eigenvalues();
        vectors = solver.eigenvectors();
    }

    // exp(i tau H)
    Matrix exp_i(double tau) const {
        Eigen::Matrix<cplx, N, 1> phases(values.size());
        for (Eigen::Index a = 0; a < values.size(); ++a) phases(a) = std::polar(1.0, tau * values(a));
        return vectors * phases.asDiagonal() * vectors.adjoint();
    }

    // G_ab = (e^{i tau l_a} - e^{i tau l_b}) / (l_a - l_b), evaluated in the
    // sinc form so that (near-)degenerate pairs need no special casing.
    Matrix divided_differences(double tau) const {
        Matrix g(values.size(), values.size());
        for (Eigen::Index a = 0; a < values.size(); ++a) {
            for (Eigen::Index b = 0; b < values.size(); ++b) {
                const double half = 0.5 * tau * (values(a) - values(b));
                const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
                g(a, b) = std::polar(1.0, 0.5 * tau * (values(a) + values(b))) * cplx(0.0, tau * sinc);
            }
        }
        return g;
    }

    // B such that d/de Tr(A exp(i tau (H + e dH))) = Tr(B dH) for every Hermitian dH.
    Matrix trace_sensitivity(const Matrix& a, double tau) const {
        const Matrix y = vectors.adjoint() * a * vectors;
        const Matrix g = divided_differences(tau);
        return vectors * g.cwiseProduct(y) * vectors.adjoint();
    }

    // Directional derivative d/de exp(i tau (H + e dH)).
    Matrix exp_i_derivative(const Matrix& dh, double tau) const {
        const Matrix x = vectors.adjoint() * dh * vectors;
        return vectors * divided_differences(tau).cwiseProduct(x) * vectors.adjoint();
    }
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

}  // namespace effham
