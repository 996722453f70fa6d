#include "effham/types.hpp"

#include <fmt/format.h>

#include <cmath>

namespace effham {

namespace {

constexpr std::array<std::string_view, kNumPauliStates> kStateLabels = {"Z+", "Z-", "X+", "X-", "Y+", "Y-"};

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void QubitConstants::validate() const {
    if (!positive(ej0_q1) || !positive(ej0_q2) || !positive(ec_q1) || !positive(ec_q2))
        throw std::invalid_argument("QubitConstants: all energies must be strictly positive");
}

void DeviceParams::validate() const {
    if (!positive(ej0_c1) || !positive(ec_c1))
        throw std::invalid_argument("DeviceParams: coupler E_J0 and E_C must be strictly positive");
    if (!nonnegative(ec_q1c1) || !nonnegative(ec_q2c1) || !nonnegative(ec_q1q2))
        throw std::invalid_argument("DeviceParams: coupling energies must be non-negative");
}

FrameConfig FrameConfig::standard() {
    // sqrt(8 * 20 cos(0.25) * 0.25) - 0.25
    const double ej = 20.0 * std::abs(std::cos(0.25));
    return FrameConfig{std::sqrt(8.0 * ej * 0.25) - 0.25};
}

void FrameConfig::validate() const {
    if (!positive(omega0)) throw std::invalid_argument("FrameConfig: omega0 must be strictly positive");
}

bool CoefficientVector::is_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string_view to_string(PauliState s) { return kStateLabels[static_cast<std::size_t>(s)]; }

PauliState parse_pauli_state(std::string_view label) {
    for (std::size_t i = 0; i < kStateLabels.size(); ++i)
        if (kStateLabels[i] == label) return static_cast<PauliState>(i);
    throw std::invalid_argument(fmt::format("unknown single-qubit state label '{}'", label));
}

char to_char(Pauli p) { return "IXYZ"[static_cast<std::size_t>(p)]; }

Pauli parse_pauli(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw std::invalid_argument(fmt::format("unknown Pauli '{}'", c));
    }
}

MeasurementPair::MeasurementPair(PauliState a, PauliState b, std::string_view obs) : state_q1(a), state_q2(b) {
    if (obs.size() != 2) throw std::invalid_argument("observable must be a two-character Pauli string");
    observable = {parse_pauli(obs[0]), parse_pauli(obs[1])};
    if (observable[0] == Pauli::I && observable[1] == Pauli::I)
        throw std::invalid_argument("observable II carries no information");
}

std::string MeasurementPair::observable_string() const {
    return {to_char(observable[0]), to_char(observable[1])};
}

std::string MeasurementPair::label() const {
    return fmt::format("({},{})|{}", to_string(state_q1), to_string(state_q2), observable_string());
}

MeasurementPair MeasurementPair::parse(std::string_view label) {
    // (A,B)|OO
    if (label.size() != 10 || label[0] != '(' || label[3] != ',' || label[6] != ')' || label[7] != '|')
        throw std::invalid_argument(fmt::format("malformed measurement pair '{}'", label));
    return MeasurementPair(parse_pauli_state(label.substr(1, 2)), parse_pauli_state(label.substr(4, 2)),
                           label.substr(8, 2));
}

}  // namespace effham
