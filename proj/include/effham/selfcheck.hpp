// selfcheck.hpp: invariant suite run by `effham selfcheck`.

#pragma once

#include "effham/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace effham {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // the measured quantity
    double threshold = 0.0;  // the bound it is compared against
    std::string detail;
    double seconds = 0.0;
};

struct SelfcheckOptions {
    std::uint64_t seed = 11;
    QubitConstants qubits;
    FrameConfig frame = FrameConfig::standard();
    double t = 1.0;
    bool include_oracle_adaptation = true;
    int workers = 1;
    // Called after each check completes.
    std::function<void(const CheckResult&)> on_result;
};

struct SelfcheckReport {
    std::vector<CheckResult> checks;
    double seconds = 0.0;
    bool passed() const;
    const CheckResult* find(const std::string& name) const;
};

// Individual checks, also used by the acceptance suite.
CheckResult check_phase_invariance(const SelfcheckOptions& o);
CheckResult check_spectrum_preservation(const SelfcheckOptions& o);
CheckResult check_refinement_monotone(const SelfcheckOptions& o);
CheckResult check_contraction(const SelfcheckOptions& o);
CheckResult check_sweep_continuity(const SelfcheckOptions& o);
CheckResult check_network_gradient(const SelfcheckOptions& o);
CheckResult check_adaptation_gradient(const SelfcheckOptions& o);
CheckResult check_dispersive_agreement(const SelfcheckOptions& o);
CheckResult check_oracle_adaptation(const SelfcheckOptions& o);

SelfcheckReport run_selfcheck(const SelfcheckOptions& o);

// Adaptation with the exact coefficient map on noiseless full-simulator data.
struct OracleAdaptationOutcome {
    std::vector<double> device_mae;  // MHz, over n_points fluxes and all terms
    std::vector<double> device_seconds;
    std::vector<double> device_loss;
    // Loss of the true parameters; above device_loss when the measurements
    // are not reproducible by the effective model.
    std::vector<double> device_truth_loss;
    std::vector<std::string> pair_labels;
    double mae = 0.0;  // mean over devices
};

struct OracleAdaptationSetup {
    std::size_t devices = 1;
    std::uint64_t device_seed = 7;
    std::size_t pairs = 7;
    std::size_t fluxes = 20;
    std::size_t pool = 1000;
    std::size_t draws = 500;
    std::size_t points = 300;
    std::uint64_t seed = 0;
    int workers = 1;
    // Replace the full-simulator measurements by the exact map's own
    // effective-model predictions at the true eta (diagnostic only).
    bool effective_measurements = false;
};

OracleAdaptationOutcome oracle_adaptation_trial(const SelfcheckOptions& o, const OracleAdaptationSetup& setup);

}  // namespace effham
