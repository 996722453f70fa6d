// effective_model.hpp: two-qubit effective dynamics generated by Pauli coefficients.

#pragma once

#include "effham/types.hpp"

#include <span>
#include <vector>

namespace effham {

// exp(-i H_eff(c) t)
Mat4 effective_propagator(const CoefficientVector& c, double t);

// <psi| U^dagger O U |psi> for the pair's product state.
double expectation(const Mat4& u, const MeasurementPair& pair);

// Expectations of every pair after evolving for t under H_eff(c).
Eigen::VectorXd effective_expectations(const CoefficientVector& c, std::span<const MeasurementPair> pairs, double t);

struct ExpectationsWithJacobian {
    Eigen::VectorXd values;    // one per pair
    Eigen::MatrixXd jacobian;  // pairs x 5, d<O_p>/dc_k per MHz
};

ExpectationsWithJacobian effective_expectations_jacobian(const CoefficientVector& c,
                                                         std::span<const MeasurementPair> pairs, double t);

// Values, and the gradient (per MHz) of sum_p weights_p <O_p>.
struct WeightedGradient {
    Eigen::VectorXd values;
    Vec5 gradient;
};
WeightedGradient effective_expectations_weighted_gradient(const CoefficientVector& c,
                                                          std::span<const MeasurementPair> pairs,
                                                          const Eigen::VectorXd& weights, double t);

}  // namespace effham
