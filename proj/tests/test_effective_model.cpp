#include "effham/design.hpp"
#include "effham/effective_model.hpp"
#include "effham/pauli.hpp"
#include "effham/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace effham;

namespace {

std::array<double, 5> arr(const CoefficientVector& c) { return c.values; }

CoefficientVector random_coefficients(Rng& rng) {
    CoefficientVector c;
    for (auto& v : c.values) v = rng.uniform(-60.0, 60.0);
    return c;
}

}  // namespace

TEST_SUITE("effective_model") {

TEST_CASE("Pauli conventions") {
    CHECK(pauli_matrix(Pauli::Z)(0, 0) == cplx(-1.0));
    CHECK((pauli_matrix(Pauli::X) * pauli_matrix(Pauli::Y) - cplx(0, 1) * pauli_matrix(Pauli::Z)).norm() < 1e-15);
    for (const char* label : {"Z+", "Z-", "X+", "X-", "Y+", "Y-"}) {
        const Vec2c v = pauli_eigenstate(parse_pauli_state(label));
        const Eigen::VectorXcd ref = oracle::state(label);
        CHECK(std::abs(std::abs(v.dot(ref)) - 1.0) < 1e-14);
        const Pauli p = parse_pauli(label[0]);
        const double sign = label[1] == '+' ? 1.0 : -1.0;
        CHECK((pauli_matrix(p) * v - sign * v).norm() < 1e-14);
    }
    CHECK_THROWS(parse_pauli_state("Q+"));
    const MeasurementPair p = MeasurementPair::parse("(X+,Z-)|XY");
    CHECK(p.label() == "(X+,Z-)|XY");
    CHECK(p.state_q1 == PauliState::Xp);
    CHECK(p.observable[1] == Pauli::Y);
}

TEST_CASE("Hamiltonian and expectations match the dense reference") {
    Rng rng(5);
    const auto candidates = build_candidates();
    for (int trial = 0; trial < 10; ++trial) {
        const CoefficientVector c = random_coefficients(rng);
        CHECK((effective_hamiltonian(c) - oracle::effective_h(arr(c))).cwiseAbs().maxCoeff() < 1e-14);
        const double t = rng.uniform(0.1, 3.0);
        CHECK((effective_propagator(c, t) - oracle::expm(oracle::effective_h(arr(c)), t)).cwiseAbs().maxCoeff() < 1e-10);
        const Eigen::VectorXd v = effective_expectations(c, candidates, t);
        for (std::size_t j = 0; j < candidates.size(); j += 7) {
            const MeasurementPair& p = candidates[j];
            const std::string s1(to_string(p.state_q1)), s2(to_string(p.state_q2));
            const double ref = oracle::effective_expectation(arr(c), s1.c_str(), s2.c_str(), to_char(p.observable[0]),
                                                             to_char(p.observable[1]), t);
            CHECK(std::abs(v(static_cast<Eigen::Index>(j)) - ref) < 1e-10);
        }
    }
}

TEST_CASE("zero time gives the initial-state expectation") {
    Rng rng(9);
    const CoefficientVector c = random_coefficients(rng);
    const std::vector<MeasurementPair> pairs = {MeasurementPair(PauliState::Zp, PauliState::Zm, "ZZ"),
                                                MeasurementPair(PauliState::Xp, PauliState::Yp, "XY"),
                                                MeasurementPair(PauliState::Xp, PauliState::Yp, "ZI")};
    const Eigen::VectorXd v = effective_expectations(c, pairs, 0.0);
    CHECK(v(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(v(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(v(2)) < 1e-14);
}

TEST_CASE("single-qubit precession") {
    // Only c_ZI: X on q1 precesses at 2 * 2 pi c_ZI.
    CoefficientVector c;
    c[Term::ZI] = 40.0;
    const std::vector<MeasurementPair> pairs = {MeasurementPair(PauliState::Xp, PauliState::Zp, "XI")};
    for (double t : {0.3, 1.0, 2.2}) {
        const double v = effective_expectations(c, pairs, t)(0);
        CHECK(v == doctest::Approx(std::cos(2.0 * kRadPerNsPerMHz * 40.0 * t)).epsilon(1e-12));
    }
}

TEST_CASE("Jacobian and weighted gradient against central differences") {
    Rng rng(12);
    const auto all = build_candidates();
    std::vector<MeasurementPair> pairs;
    for (std::size_t j = 0; j < all.size(); j += 37) pairs.push_back(all[j]);
    for (int trial = 0; trial < 5; ++trial) {
        const CoefficientVector c = random_coefficients(rng);
        const double t = 1.0;
        const ExpectationsWithJacobian ej = effective_expectations_jacobian(c, pairs, t);
        CHECK((ej.values - effective_expectations(c, pairs, t)).cwiseAbs().maxCoeff() < 1e-14);
        for (std::size_t k = 0; k < kNumTerms; ++k) {
            CoefficientVector a = c, b = c;
            const double h = 1e-4;
            a[k] += h;
            b[k] -= h;
            const Eigen::VectorXd fd =
                (effective_expectations(a, pairs, t) - effective_expectations(b, pairs, t)) / (2 * h);
            CHECK((ej.jacobian.col(static_cast<Eigen::Index>(k)) - fd).cwiseAbs().maxCoeff() < 1e-7);
        }
        Eigen::VectorXd w(static_cast<Eigen::Index>(pairs.size()));
        for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.normal();
        const WeightedGradient wg = effective_expectations_weighted_gradient(c, pairs, w, t);
        CHECK((wg.gradient - ej.jacobian.transpose() * w).cwiseAbs().maxCoeff() < 1e-10);
    }
}

}  // TEST_SUITE
