// evaluation.hpp: coefficient errors, infidelities and flux sweeps for held-out devices.

#pragma once

#include "effham/coefficient_map.hpp"
#include "effham/dataset.hpp"
#include "effham/swpt.hpp"
#include "effham/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace effham {

// Fixed inputs shared by every evaluation routine.
struct EvaluationContext {
    QubitConstants qubits;
    FrameConfig frame = FrameConfig::standard();
    double t = 1.0;
    ReductionOptions reduction;
};

struct TermErrors {
    std::array<double, kNumTerms> mae{};             // MHz
    std::array<double, kNumTerms> relative_pct{};    // MAE / dynamic range * 100
    double mae_all = 0.0;                           // mean over terms
    double relative_all_pct = 0.0;
};

struct CoefficientPoint {
    std::size_t device = 0;
    ControlFlux phi;
    CoefficientVector truth;
    CoefficientVector model;
    CoefficientVector swpt;
};

struct CoefficientErrorReport {
    TermErrors model;
    TermErrors swpt;
    std::array<double, kNumTerms> dynamic_range{};  // max - min of the truth over all points
    std::vector<CoefficientPoint> points;
    std::size_t skipped = 0;  // flux points whose reduction failed
};

// Per-term MAE against c_true at n_points uniform fluxes per device. The
// model is evaluated at the adapted eta, SWPT at the true eta. Points where
// the reduction or SWPT fails are skipped and counted.
CoefficientErrorReport coefficient_error_report(const CoefficientMap& model, const std::vector<DeviceParams>& eta_pred,
                                                const std::vector<DeviceParams>& eta_true, std::size_t n_points,
                                                const EnsembleSpec& flux_box, std::uint64_t seed,
                                                const EvaluationContext& ctx);

// Summary over the points only (dynamic range taken from the same points).
TermErrors term_errors(const std::vector<CoefficientVector>& truth, const std::vector<CoefficientVector>& pred,
                       const std::array<double, kNumTerms>& dynamic_range);

struct InfidelityPoint {
    std::size_t device = 0;
    ControlFlux phi;
    double g_eff = 0.0;  // 2 c_XX of the truth, MHz
    double floor = 0.0;
    double model = 0.0;
    double swpt = 0.0;
    std::optional<double> ratio;  // (I_swpt - I_floor) / (I_model - I_floor)
};

struct InfidelityReport {
    std::vector<InfidelityPoint> points;
    std::vector<double> device_excess_model;  // per-device mean of I_model - I_floor
    std::vector<double> device_excess_swpt;
    double mean_excess_model = 0.0;  // over all devices and points
    double mean_excess_swpt = 0.0;
    std::size_t skipped = 0;
};

inline constexpr double kRatioGuard = 1e-14;

// Uniform phi_c1 grid of `grid_points` over the flux box with the qubit fluxes fixed.
std::vector<ControlFlux> coupler_grid(const EnsembleSpec& flux_box, std::size_t grid_points, double phi_q1 = 0.25,
                                      double phi_q2 = 0.25);

InfidelityReport infidelity_report(const CoefficientMap& model, const std::vector<DeviceParams>& eta_pred,
                                   const std::vector<DeviceParams>& eta_true, const std::vector<ControlFlux>& grid,
                                   const EvaluationContext& ctx);

struct SweepCurves {
    std::vector<double> phi_c1;
    std::vector<CoefficientVector> truth;
    std::vector<CoefficientVector> model;
    std::vector<CoefficientVector> swpt;
    std::vector<bool> valid;  // false where the reduction failed
};

SweepCurves flux_sweep(const CoefficientMap& model, const DeviceParams& eta_pred, const DeviceParams& eta_true,
                       const std::vector<ControlFlux>& grid, const EvaluationContext& ctx);

// Largest |c_k(i+1) - c_k(i)| over adjacent valid points and all terms.
double max_adjacent_jump(const std::vector<CoefficientVector>& curve, const std::vector<bool>& valid = {});

struct HybridizationEntry {
    std::size_t device = 0;
    HybridizationReport ratios;
};

std::vector<HybridizationEntry> hybridization_survey(const QubitConstants& q, const std::vector<DeviceParams>& devices,
                                                     const ControlFlux& phi);

}  // namespace effham
