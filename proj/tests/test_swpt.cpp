#include "effham/dataset.hpp"
#include "effham/physics.hpp"
#include "effham/reduction.hpp"
#include "effham/swpt.hpp"

#include <doctest.h>

#include <cmath>

using namespace effham;

namespace {

const QubitConstants kQ;
const FrameConfig kFrame = FrameConfig::standard();

// Second-order formulas written out from scratch in GHz.
CoefficientVector reference_swpt(const DeviceParams& eta, const ControlFlux& phi, double omega0) {
    auto ej = [](double e0, double p) { return e0 * std::abs(std::cos(p / 2)); };
    auto w = [&](double e0, double ec, double p) { return std::sqrt(8 * ej(e0, p) * ec) - ec; };
    auto g = [](double a, double ca, double b, double cb, double cab) {
        return cab / std::sqrt(2.0) * std::pow(a * b / (ca * cb), 0.25);
    };
    const double e1 = ej(20, phi.phi_q1), e2 = ej(20, phi.phi_q2), ec_ = ej(eta.ej0_c1, phi.phi_c1);
    const double w1 = w(20, 0.25, phi.phi_q1), w2 = w(20, 0.25, phi.phi_q2), wc = w(eta.ej0_c1, eta.ec_c1, phi.phi_c1);
    const double g1 = g(e1, 0.25, ec_, eta.ec_c1, eta.ec_q1c1);
    const double g2 = g(e2, 0.25, ec_, eta.ec_c1, eta.ec_q2c1);
    const double g12 = g(e1, 0.25, e2, 0.25, eta.ec_q1q2);
    const double d1 = w1 - wc, d2 = w2 - wc;
    const double geff = 0.5 * g1 * g2 * (1 / d1 + 1 / d2) + g12;
    CoefficientVector c;
    c[Term::ZI] = 500.0 * (w1 + g1 * g1 / d1 - omega0);
    c[Term::IZ] = 500.0 * (w2 + g2 * g2 / d2 - omega0);
    c[Term::XX] = c[Term::YY] = 500.0 * geff;
    return c;
}

}  // namespace

TEST_SUITE("swpt") {

TEST_CASE("matches the second-order formulas") {
    const EnsembleSpec box;
    const auto devices = sample_ensemble(box, 5, 8);
    for (std::size_t d = 0; d < devices.size(); ++d)
        for (const auto& phi : sample_pulses(box, 20, d)) {
            const CoefficientVector c = swpt_coefficients(kQ, devices[d], phi, kFrame);
            const CoefficientVector r = reference_swpt(devices[d], phi, kFrame.omega0);
            CHECK(c[Term::ZZ] == 0.0);
            CHECK(c[Term::XX] == c[Term::YY]);
            for (std::size_t k = 0; k < kNumTerms; ++k) CHECK(c[k] == doctest::Approx(r[k]).epsilon(1e-11).scale(1.0));
        }
}

TEST_CASE("decoupled device gives bare detunings") {
    const DeviceParams eta{25.0, 0.3, 0.0, 0.0, 0.0};
    const ControlFlux phi{0.3, 0.1, 0.7};
    const CoefficientVector c = swpt_coefficients(kQ, eta, phi, kFrame);
    CHECK(c[Term::ZI] == doctest::Approx(500.0 * (mode_frequency(20, 0.25, 0.3) - kFrame.omega0)).epsilon(1e-13));
    CHECK(c[Term::XX] == 0.0);
    const HybridizationReport h = hybridization_ratios(kQ, eta, phi);
    CHECK(h.ratio_q1 == 0.0);
    CHECK(h.ratio_q2 == 0.0);
}

TEST_CASE("frame shift moves only the single-qubit terms") {
    const DeviceParams eta{25.5, 0.3, 0.02, 0.02, 0.003};
    const ControlFlux phi{0.2, 0.3, 0.5};
    FrameConfig shifted = kFrame;
    shifted.omega0 += 0.01;
    const CoefficientVector a = swpt_coefficients(kQ, eta, phi, kFrame);
    const CoefficientVector b = swpt_coefficients(kQ, eta, phi, shifted);
    CHECK(a[Term::ZI] - b[Term::ZI] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(a[Term::IZ] - b[Term::IZ] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(a[Term::XX] == b[Term::XX]);
}

TEST_CASE("hybridization ratios") {
    const EnsembleSpec box;
    const DeviceParams mid = DeviceParams::from_array({box.eta[0].mid(), box.eta[1].mid(), box.eta[2].mid(),
                                                       box.eta[3].mid(), box.eta[4].mid()});
    const ControlFlux phi{0.25, 0.25, 0.1};
    const HybridizationReport h = hybridization_ratios(kQ, mid, phi);
    CHECK(h.max() < 0.12);
    CHECK(h.ratio_q1 == doctest::Approx(h.ratio_q2).epsilon(1e-14));
    const ModeParameters m = mode_parameters(kQ, mid, phi);
    CHECK(h.ratio_q1 == doctest::Approx(std::abs(m.g_q1c1 / (m.omega_q1 - m.omega_c1))).epsilon(1e-14));
    // Deep dispersive point: SWPT and the spectral reduction agree closely.
    const CoefficientVector s = swpt_coefficients(kQ, mid, phi, kFrame);
    const CoefficientVector d = coefficients_from_hamiltonian(dressed_projection(build_full_hamiltonian(kQ, mid, phi, kFrame)).h_dress);
    for (std::size_t k = 0; k < kNumTerms; ++k) CHECK(std::abs(s[k] - d[k]) < 0.5);
}

TEST_CASE("exact resonance is rejected") {
    // Tune the coupler onto q1: same E_J0 and E_C at the same flux.
    const DeviceParams eta{20.0, 0.25, 0.02, 0.02, 0.003};
    const ControlFlux phi{0.3, 0.1, 0.3};
    CHECK_THROWS_AS(swpt_coefficients(kQ, eta, phi, kFrame), ResonanceError);
    CHECK_THROWS_AS(hybridization_ratios(kQ, eta, phi), ResonanceError);
}

}  // TEST_SUITE
