// adaptation.hpp: recovering a device's eta from qubit-subspace measurements.

#pragma once

#include "effham/coefficient_map.hpp"
#include "effham/dataset.hpp"
#include "effham/optim.hpp"
#include "effham/types.hpp"

#include <cstdint>
#include <vector>

namespace effham {

// Expectation values for every (flux, pair), row = flux, column = pair.
struct MeasurementTable {
    std::vector<ControlFlux> fluxes;
    std::vector<MeasurementPair> pairs;
    Eigen::MatrixXd values;
    double t = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

// Noiseless measurements from the full three-mode simulator.
MeasurementTable synthesize_measurements(const QubitConstants& q, const DeviceParams& eta_true,
                                         const std::vector<ControlFlux>& fluxes,
                                         const std::vector<MeasurementPair>& pairs, const FrameConfig& frame,
                                         double t);

// Same layout, predicted through H_eff(map(eta, phi)).
Eigen::MatrixXd predict_expectations(const CoefficientMap& map, const DeviceParams& eta,
                                     const std::vector<ControlFlux>& fluxes,
                                     const std::vector<MeasurementPair>& pairs, double t);

// L(eta) = sum over (flux, pair) of (predicted - measured)^2, with its gradient
// in GHz^-1 when requested.
double adaptation_loss(const CoefficientMap& map, const MeasurementTable& table, const DeviceParams& eta,
                       Vec5* gradient = nullptr);

struct AdaptConfig {
    std::array<Interval, DeviceParams::kSize> bounds = EnsembleSpec{}.eta;
    int restarts = 5;
    int max_iterations = 100;
    double gradient_tolerance = 1e-12;  // projected gradient in normalized coordinates
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

struct RestartTrace {
    DeviceParams eta_init;
    DeviceParams eta_final;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int iterations = 0;
    int evaluations = 0;
    std::string status;
    std::vector<double> trace;  // loss after every accepted step
};

struct AdaptResult {
    DeviceParams eta_pred;
    double best_loss = 0.0;
    std::size_t best_restart = 0;
    std::vector<RestartTrace> restarts;
    double wall_seconds = 0.0;
};

// Bounded L-BFGS in u = (eta - lower) / (upper - lower) in [0, 1]^5, one run
// per restart from a uniform draw; the lowest final loss wins (ties to the
// lower restart index). Throws AdaptationFailedError if no restart improved.
AdaptResult adapt(const CoefficientMap& map, const MeasurementTable& table, const AdaptConfig& cfg);

}  // namespace effham
