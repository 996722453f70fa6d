#include "effham/physics.hpp"

#include "effham/linalg.hpp"
#include "effham/pauli.hpp"

#include <fmt/format.h>

#include <cmath>

namespace effham {

double josephson_energy(double ej0, double phi) { return ej0 * std::abs(std::cos(0.5 * phi)); }

double mode_frequency(double ej0, double ec, double phi) {
    if (!(ej0 > 0.0) || !(ec > 0.0)) throw std::invalid_argument("mode_frequency: E_J0 and E_C must be positive");
    const double omega = std::sqrt(8.0 * josephson_energy(ej0, phi) * ec) - ec;
    if (!(omega > 0.0))
        throw DomainError(fmt::format("mode_frequency: non-positive frequency at phi = {} (E_J0 = {}, E_C = {})",
                                      phi, ej0, ec));
    return omega;
}

double coupling_rate(double ej_j, double ec_j, double ej_k, double ec_k, double ec_jk) {
    if (!(ej_j > 0.0) || !(ec_j > 0.0) || !(ej_k > 0.0) || !(ec_k > 0.0) || !(ec_jk >= 0.0))
        throw std::invalid_argument("coupling_rate: energies must be positive (coupling energy non-negative)");
    return ec_jk / std::sqrt(2.0) * std::pow(ej_j * ej_k / (ec_j * ec_k), 0.25);
}

ModeParameters mode_parameters(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi) {
    q.validate();
    eta.validate();
    ModeParameters m;
    m.omega_q1 = mode_frequency(q.ej0_q1, q.ec_q1, phi.phi_q1);
    m.omega_q2 = mode_frequency(q.ej0_q2, q.ec_q2, phi.phi_q2);
    m.omega_c1 = mode_frequency(eta.ej0_c1, eta.ec_c1, phi.phi_c1);
    const double ej_q1 = josephson_energy(q.ej0_q1, phi.phi_q1);
    const double ej_q2 = josephson_energy(q.ej0_q2, phi.phi_q2);
    const double ej_c1 = josephson_energy(eta.ej0_c1, phi.phi_c1);
    m.g_q1c1 = coupling_rate(ej_q1, q.ec_q1, ej_c1, eta.ec_c1, eta.ec_q1c1);
    m.g_q2c1 = coupling_rate(ej_q2, q.ec_q2, ej_c1, eta.ec_c1, eta.ec_q2c1);
    m.g_q1q2 = coupling_rate(ej_q1, q.ec_q1, ej_q2, q.ec_q2, eta.ec_q1q2);
    return m;
}

Mat8 mode_operator(int mode, Pauli p) {
    const Mat2 id = Mat2::Identity();
    const Mat2& op = pauli_matrix(p);
    switch (mode) {
        case 0: return kron(kron(op, id), id);
        case 1: return kron(kron(id, op), id);
        case 2: return kron(kron(id, id), op);
        default: throw std::out_of_range("mode_operator: mode index must be 0, 1 or 2");
    }
}

namespace {

Mat8 flip_flop(int j, int k) {
    return mode_operator(j, Pauli::X) * mode_operator(k, Pauli::X) +
           mode_operator(j, Pauli::Y) * mode_operator(k, Pauli::Y);
}

}  // namespace

Mat8 build_full_hamiltonian(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                            const FrameConfig& frame) {
    frame.validate();
    const ModeParameters m = mode_parameters(q, eta, phi);
    const std::array<double, 3> detuning = {kTwoPi * (m.omega_q1 - frame.omega0), kTwoPi * (m.omega_q2 - frame.omega0),
                                            kTwoPi * (m.omega_c1 - frame.omega0)};
    Mat8 h = Mat8::Zero();
    for (int i = 0; i < 3; ++i) h += 0.5 * detuning[i] * mode_operator(i, Pauli::Z);
    h += 0.5 * kTwoPi * m.g_q1c1 * flip_flop(0, 2);
    h += 0.5 * kTwoPi * m.g_q2c1 * flip_flop(1, 2);
    h += 0.5 * kTwoPi * m.g_q1q2 * flip_flop(0, 1);
    return h;
}

Mat8 propagator(const Mat8& h, double t) { return HermitianSpectrum<8>(h).exp_i(-t); }

double measure_with_propagator(const Mat8& u, const MeasurementPair& pair) {
    Vec2c coupler_ground;
    coupler_ground << 1.0, 0.0;
    const Vec8c psi0 = kron(product_state(pair.state_q1, pair.state_q2), coupler_ground);
    const Vec8c psi = u * psi0;
    const Mat8 obs = kron(pauli_string(pair.observable), Mat2::Identity());
    return (psi.adjoint() * obs * psi)(0, 0).real();
}

double simulate_measurement(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                            const FrameConfig& frame, const MeasurementPair& pair, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("simulate_measurement: t must be non-negative");
    return measure_with_propagator(propagator(build_full_hamiltonian(q, eta, phi, frame), t), pair);
}

}  // namespace effham
