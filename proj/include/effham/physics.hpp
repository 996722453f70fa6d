// physics.hpp: flux-tunable transmon-coupler-transmon model.
//
// Three two-level modes ordered |q1 q2 c1>, q1 most significant, so the basis
// index of |b_q1 b_q2 b_c1> is 4 b_q1 + 2 b_q2 + b_c1. The qubit subspace with
// the coupler in its ground state sits at indices {0, 2, 4, 6}.

#pragma once

#include "effham/types.hpp"

#include <array>

namespace effham {

inline constexpr std::array<int, 4> kQubitSubspace = {0, 2, 4, 6};

// E_J = E_J0 |cos(phi / 2)| (symmetric SQUID).
double josephson_energy(double ej0, double phi);

// sqrt(8 E_J E_C) - E_C in GHz. Throws DomainError when the result is <= 0.
double mode_frequency(double ej0, double ec, double phi);

// (E_C^jk / sqrt 2) (E_J^j E_J^k / (E_C^j E_C^k))^{1/4} in GHz; the E_J inputs
// are flux-dependent Josephson energies.
double coupling_rate(double ej_j, double ec_j, double ej_k, double ec_k, double ec_jk);

// Bare mode frequencies and couplings at one operating point (GHz).
struct ModeParameters {
    double omega_q1 = 0.0;
    double omega_q2 = 0.0;
    double omega_c1 = 0.0;
    double g_q1c1 = 0.0;
    double g_q2c1 = 0.0;
    double g_q1q2 = 0.0;
};

ModeParameters mode_parameters(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi);

// H/hbar = sum_i (Delta_i / 2) Z_i + sum_{j<k} (g_jk / 2)(X_j X_k + Y_j Y_k) in rad/ns,
// Delta_i = 2 pi (omega_i - omega0).
Mat8 build_full_hamiltonian(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                            const FrameConfig& frame);

// exp(-i h t) through the Hermitian eigendecomposition of h.
Mat8 propagator(const Mat8& h, double t);

// Single-mode operator embedded in the three-mode space (mode 0 = q1, 1 = q2, 2 = c1).
Mat8 mode_operator(int mode, Pauli p);

// Prepares rho_p (x) |0><0|_c1, evolves under the full propagator for t and
// returns Tr[(O_p (x) I_c1) rho(t)].
double simulate_measurement(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                            const FrameConfig& frame, const MeasurementPair& pair, double t);

// Same, for an already computed full propagator.
double measure_with_propagator(const Mat8& u, const MeasurementPair& pair);

}  // namespace effham
