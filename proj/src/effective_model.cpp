#include "effham/effective_model.hpp"

#include "effham/linalg.hpp"
#include "effham/pauli.hpp"

namespace effham {

Mat4 effective_propagator(const CoefficientVector& c, double t) {
    return HermitianSpectrum<4>(effective_hamiltonian(c)).exp_i(-t);
}

double expectation(const Mat4& u, const MeasurementPair& pair) {
    const Vec4c psi = u * product_state(pair.state_q1, pair.state_q2);
    return (psi.adjoint() * pauli_string(pair.observable) * psi)(0, 0).real();
}

Eigen::VectorXd effective_expectations(const CoefficientVector& c, std::span<const MeasurementPair> pairs, double t) {
    const Mat4 u = effective_propagator(c, t);
    Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t p = 0; p < pairs.size(); ++p) out(static_cast<Eigen::Index>(p)) = expectation(u, pairs[p]);
    return out;
}

namespace {

// <O> = Tr(A U) with A = psi (O U psi)^dagger, so d<O> = 2 Re Tr(A dU).
Mat4 expectation_adjoint(const Mat4& u, const MeasurementPair& pair, double& value) {
    const Vec4c psi0 = product_state(pair.state_q1, pair.state_q2);
    const Vec4c psi = u * psi0;
    const Vec4c opsi = pauli_string(pair.observable) * psi;
    value = psi.dot(opsi).real();
    return psi0 * opsi.adjoint();
}

Vec5 gradient_from_sensitivity(const Mat4& b) {
    const auto& basis = coefficient_basis();
    Vec5 g;
    for (std::size_t k = 0; k < kNumTerms; ++k)
        g(static_cast<Eigen::Index>(k)) = 2.0 * kRadPerNsPerMHz * (b * basis[k]).trace().real();
    return g;
}

}  // namespace

ExpectationsWithJacobian effective_expectations_jacobian(const CoefficientVector& c,
                                                         std::span<const MeasurementPair> pairs, double t) {
    const HermitianSpectrum<4> spec(effective_hamiltonian(c));
    const Mat4 u = spec.exp_i(-t);
    ExpectationsWithJacobian out;
    out.values.resize(static_cast<Eigen::Index>(pairs.size()));
    out.jacobian.resize(static_cast<Eigen::Index>(pairs.size()), 5);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        double v = 0.0;
        const Mat4 a = expectation_adjoint(u, pairs[p], v);
        const auto row = static_cast<Eigen::Index>(p);
        out.values(row) = v;
        out.jacobian.row(row) = gradient_from_sensitivity(spec.trace_sensitivity(a, -t)).transpose();
    }
    return out;
}

WeightedGradient effective_expectations_weighted_gradient(const CoefficientVector& c,
                                                          std::span<const MeasurementPair> pairs,
                                                          const Eigen::VectorXd& weights, double t) {
    if (weights.size() != static_cast<Eigen::Index>(pairs.size()))
        throw std::invalid_argument("weights must have one entry per pair");
    const HermitianSpectrum<4> spec(effective_hamiltonian(c));
    const Mat4 u = spec.exp_i(-t);
    WeightedGradient out;
    out.values.resize(static_cast<Eigen::Index>(pairs.size()));
    Mat4 a_total = Mat4::Zero();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        double v = 0.0;
        const Mat4 a = expectation_adjoint(u, pairs[p], v);
        out.values(static_cast<Eigen::Index>(p)) = v;
        a_total += weights(static_cast<Eigen::Index>(p)) * a;
    }
    out.gradient = gradient_from_sensitivity(spec.trace_sensitivity(a_total, -t));
    return out;
}

}  // namespace effham
