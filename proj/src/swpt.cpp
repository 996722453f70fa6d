#include "effham/swpt.hpp"

#include "effham/physics.hpp"

#include <fmt/format.h>

#include <cmath>

namespace effham {

namespace {

void require_off_resonance(double detuning, const char* which) {
    if (std::abs(detuning) < kResonanceTolerance)
        throw ResonanceError(fmt::format("{} is on resonance with the coupler (detuning {:.3e} GHz)", which, detuning));
}

}  // namespace

CoefficientVector swpt_coefficients(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                                    const FrameConfig& frame) {
    frame.validate();
    const ModeParameters m = mode_parameters(q, eta, phi);
    const double d1 = m.omega_q1 - m.omega_c1;
    const double d2 = m.omega_q2 - m.omega_c1;
    require_off_resonance(d1, "q1");
    require_off_resonance(d2, "q2");

    const double omega1 = m.omega_q1 + m.g_q1c1 * m.g_q1c1 / d1;
    const double omega2 = m.omega_q2 + m.g_q2c1 * m.g_q2c1 / d2;
    const double inv_delta = 0.5 * (1.0 / d1 + 1.0 / d2);
    const double g_eff = m.g_q1c1 * m.g_q2c1 * inv_delta + m.g_q1q2;

    CoefficientVector c;
    c[Term::ZI] = 0.5 * (omega1 - frame.omega0) * 1e3;
    c[Term::IZ] = 0.5 * (omega2 - frame.omega0) * 1e3;
    c[Term::XX] = 0.5 * g_eff * 1e3;
    c[Term::YY] = c[Term::XX];
    c[Term::ZZ] = 0.0;
    return c;
}

HybridizationReport hybridization_ratios(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi) {
    const ModeParameters m = mode_parameters(q, eta, phi);
    const double d1 = m.omega_q1 - m.omega_c1;
    const double d2 = m.omega_q2 - m.omega_c1;
    require_off_resonance(d1, "q1");
    require_off_resonance(d2, "q2");
    return {std::abs(m.g_q1c1 / d1), std::abs(m.g_q2c1 / d2)};
}

}  // namespace effham
