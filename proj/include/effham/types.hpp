// types.hpp: domain value types shared by every stage of the pipeline.
//
// Units: device energies and mode frequencies in GHz, fluxes in radians,
// Hamiltonian matrix entries in rad/ns, effective Pauli coefficients in MHz.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace effham {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec2c = Eigen::Matrix<cplx, 2, 1>;
using Vec4c = Eigen::Matrix<cplx, 4, 1>;
using Vec8c = Eigen::Matrix<cplx, 8, 1>;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
// rad/ns per MHz of ordinary frequency.
inline constexpr double kRadPerNsPerMHz = kTwoPi * 1e-3;

// ---------------------------------------------------------------- errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Flux too close to pi: a mode frequency would be non-positive.
struct DomainError : Error { using Error::Error; };
// Qubit and coupler exactly on resonance; perturbative quantities diverge.
struct ResonanceError : Error { using Error::Error; };
// Qubit-like eigenstates cannot be told apart from coupler-like ones.
struct DegenerateSelectionError : Error { using Error::Error; };
struct RankDeficiencyError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct MetadataMismatchError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct NonFiniteLossError : Error { using Error::Error; };
struct AdaptationFailedError : Error { using Error::Error; };

// ---------------------------------------------------------------- device

struct QubitConstants {
    double ej0_q1 = 20.0;
    double ej0_q2 = 20.0;
    double ec_q1 = 0.25;
    double ec_q2 = 0.25;

    void validate() const;
    bool operator==(const QubitConstants&) const = default;
};

// The five coupler-related energies that differ between devices (GHz).
struct DeviceParams {
    static constexpr std::size_t kSize = 5;
    static constexpr std::array<std::string_view, kSize> kNames = {
        "ej0_c1", "ec_c1", "ec_q1c1", "ec_q2c1", "ec_q1q2"};

    double ej0_c1 = 0.0;
    double ec_c1 = 0.0;
    double ec_q1c1 = 0.0;
    double ec_q2c1 = 0.0;
    double ec_q1q2 = 0.0;

    std::array<double, kSize> to_array() const { return {ej0_c1, ec_c1, ec_q1c1, ec_q2c1, ec_q1q2}; }
    static DeviceParams from_array(const std::array<double, kSize>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
    Vec5 to_vector() const { return Vec5(ej0_c1, ec_c1, ec_q1c1, ec_q2c1, ec_q1q2); }
    static DeviceParams from_vector(const Vec5& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

    // ej0_c1 and ec_c1 strictly positive, coupling energies non-negative.
    void validate() const;
    bool operator==(const DeviceParams&) const = default;
};

// Reduced external fluxes (rad).
struct ControlFlux {
    static constexpr std::size_t kSize = 3;
    static constexpr std::array<std::string_view, kSize> kNames = {"phi_q1", "phi_q2", "phi_c1"};

    double phi_q1 = 0.0;
    double phi_q2 = 0.0;
    double phi_c1 = 0.0;

    std::array<double, kSize> to_array() const { return {phi_q1, phi_q2, phi_c1}; }
    static ControlFlux from_array(const std::array<double, kSize>& a) { return {a[0], a[1], a[2]}; }
    bool operator==(const ControlFlux&) const = default;
};

// Single rotating-frame frequency shared by all three modes (GHz).
struct FrameConfig {
    double omega0 = 0.0;

    // Qubit frequency at the largest control flux (E_J0 = 20, E_C = 0.25, phi = 0.5).
    static FrameConfig standard();
    void validate() const;
    bool operator==(const FrameConfig&) const = default;
};

// ---------------------------------------------------------------- coefficients

enum class Term : std::size_t { ZI = 0, IZ = 1, XX = 2, YY = 3, ZZ = 4 };
inline constexpr std::size_t kNumTerms = 5;
inline constexpr std::array<std::string_view, kNumTerms> kTermNames = {"ZI", "IZ", "XX", "YY", "ZZ"};

// Effective two-qubit Pauli coefficients in MHz. H_eff = 2*pi*1e-3 * sum_k c_k P_k (rad/ns).
struct CoefficientVector {
    std::array<double, kNumTerms> values{};

    double& operator[](Term t) { return values[static_cast<std::size_t>(t)]; }
    double operator[](Term t) const { return values[static_cast<std::size_t>(t)]; }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    Vec5 to_vector() const { return Vec5(values[0], values[1], values[2], values[3], values[4]); }
    static CoefficientVector from_vector(const Vec5& v) {
        return CoefficientVector{{v(0), v(1), v(2), v(3), v(4)}};
    }
    bool is_finite() const;
    bool operator==(const CoefficientVector&) const = default;
};

// ---------------------------------------------------------------- measurements

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };
enum class PauliState : std::uint8_t { Zp = 0, Zm = 1, Xp = 2, Xm = 3, Yp = 4, Ym = 5 };
inline constexpr std::size_t kNumPauliStates = 6;

std::string_view to_string(PauliState s);
PauliState parse_pauli_state(std::string_view label);
char to_char(Pauli p);
Pauli parse_pauli(char c);

// (initial product state, two-qubit Pauli observable) probe.
struct MeasurementPair {
    PauliState state_q1 = PauliState::Zp;
    PauliState state_q2 = PauliState::Zp;
    std::array<Pauli, 2> observable{Pauli::Z, Pauli::Z};

    MeasurementPair() = default;
    MeasurementPair(PauliState a, PauliState b, std::string_view obs);

    std::string observable_string() const;
    // "(X+,Z-)|XY"
    std::string label() const;
    static MeasurementPair parse(std::string_view label);
    bool operator==(const MeasurementPair&) const = default;
};

}  // namespace effham
