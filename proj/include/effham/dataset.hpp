// dataset.hpp: device ensembles, pulse libraries and supervised records.

#pragma once

#include "effham/reduction.hpp"
#include "effham/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace effham {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
    double mid() const { return 0.5 * (lower + upper); }
    bool contains(double x) const { return x >= lower && x <= upper; }
    bool operator==(const Interval&) const = default;
};

// Uniform sampling box over device parameters and control fluxes.
struct EnsembleSpec {
    // ej0_c1, ec_c1, ec_q1c1, ec_q2c1, ec_q1q2 (GHz)
    std::array<Interval, DeviceParams::kSize> eta{{{23.0, 28.0}, {0.28, 0.32}, {0.015, 0.025}, {0.015, 0.025},
                                                   {0.002, 0.004}}};
    // phi_q1, phi_q2, phi_c1 (rad)
    std::array<Interval, ControlFlux::kSize> flux{{{0.0, 0.5}, {0.0, 0.5}, {0.1, 1.35}}};
    std::uint64_t seed = 0;

    DeviceParams eta_lower() const;
    DeviceParams eta_upper() const;
    bool contains(const DeviceParams& d) const;
    bool contains(const ControlFlux& p) const;
    // Rejects lower > upper and non-finite bounds; lower == upper is a point.
    void validate() const;
    bool operator==(const EnsembleSpec&) const = default;
};

// Deterministic in (spec.seed, stream).
std::vector<DeviceParams> sample_ensemble(const EnsembleSpec& spec, std::size_t n, std::uint64_t stream = 0);
std::vector<ControlFlux> sample_pulses(const EnsembleSpec& spec, std::size_t m, std::uint64_t stream = 0);

namespace record_flag {
inline constexpr std::string_view kDegenerateSelection = "degenerate_selection";
inline constexpr std::string_view kRefineNotConverged = "refine_not_converged";
inline constexpr std::string_view kRefineNoImprovement = "refine_no_improvement";
inline constexpr std::string_view kPipelineError = "pipeline_error";
}  // namespace record_flag

struct DatasetRecord {
    std::size_t device = 0;
    std::size_t pulse = 0;
    DeviceParams eta;
    ControlFlux phi;
    CoefficientVector c_true;
    CoefficientVector c_dress;
    double fidelity_true = 0.0;
    double fidelity_dress = 0.0;
    double residual_norm = 0.0;
    double weight_gap = 0.0;
    double min_weight = 0.0;
    int refine_iterations = 0;
    std::vector<std::string> flags;
    std::string message;

    // Records with a degenerate selection or a pipeline error carry no target.
    bool excluded() const;
    bool has_flag(std::string_view f) const;
    bool operator==(const DatasetRecord&) const = default;
};

struct GenerateOptions {
    EnsembleSpec spec;  // flux box and seed for the pulse library
    double t = 1.0;
    ReductionOptions reduction;
    int workers = 1;
};

// One record for (device, pulse); never throws for pipeline failures.
DatasetRecord make_record(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                          const FrameConfig& frame, double t, const ReductionOptions& options = {});

struct Dataset {
    QubitConstants qubits;
    FrameConfig frame;
    EnsembleSpec spec;
    double t = 1.0;
    std::size_t devices = 0;
    std::size_t pulses_per_device = 0;
    int snapshots = 1;
    std::string config_hash;
    std::vector<DatasetRecord> records;

    std::vector<const DatasetRecord*> usable() const;
    bool operator==(const Dataset&) const = default;
};

// Pulses for device i come from sample_pulses(spec, pulses_per_device, i + 1);
// records are ordered device-major, pulse-minor regardless of worker count.
Dataset generate_dataset(const QubitConstants& q, const std::vector<DeviceParams>& devices,
                         std::size_t pulses_per_device, const FrameConfig& frame, const GenerateOptions& options);

// Newline-delimited JSON: a header line, then one record per line.
void persist_dataset(const Dataset& data, const std::filesystem::path& path);
std::string dataset_to_string(const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);
Dataset dataset_from_string(const std::string& text);

}  // namespace effham
