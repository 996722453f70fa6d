// swpt.hpp: second-order Schrieffer-Wolff baseline and hybridization ratios.

#pragma once

#include "effham/types.hpp"

namespace effham {

// Detunings below this (GHz) are treated as exact resonance.
inline constexpr double kResonanceTolerance = 1e-6;

// Second order: omega~_j = omega_j + g_jc^2 / Delta_jc,
// g_eff = g_1c g_2c / Delta + g_12 with 1/Delta = (1/Delta_1c + 1/Delta_2c) / 2,
// c_ZI = (omega~_1 - omega0)/2, c_XX = c_YY = g_eff/2, c_ZZ = 0 (all in MHz).
CoefficientVector swpt_coefficients(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                                    const FrameConfig& frame);

struct HybridizationReport {
    double ratio_q1 = 0.0;  // |g_q1c1 / (omega_q1 - omega_c1)|
    double ratio_q2 = 0.0;
    double max() const { return ratio_q1 > ratio_q2 ? ratio_q1 : ratio_q2; }
};

HybridizationReport hybridization_ratios(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi);

}  // namespace effham
