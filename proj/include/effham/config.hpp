// config.hpp: run configuration for the command-line pipeline.

#pragma once

#include "effham/adaptation.hpp"
#include "effham/dataset.hpp"
#include "effham/surrogate.hpp"
#include "effham/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace effham {

struct PathsConfig {
    std::string results_dir = "results";
    // Relative paths resolve against results_dir.
    std::string dataset = "dataset.jsonl";
    std::string checkpoint = "checkpoint.json";
    std::string selection = "selection.json";
    std::string adaptation = "adaptation.json";
};

struct DataConfig {
    std::size_t devices = 50;
    std::size_t pulses_per_device = 100;
    double t = 1.0;
    int snapshots = 1;
    int workers = 1;
};

struct TrainSection {
    TrainConfig train;
    std::uint64_t init_seed = 1;
};

struct DesignConfig {
    std::size_t draws = 500;
    std::size_t pairs = 7;
    std::size_t fluxes = 20;
    std::size_t pool = 1000;
    std::uint64_t seed = 2;
};

struct EvaluationConfig {
    std::size_t held_out_devices = 10;
    std::uint64_t held_out_seed = 7;
    std::size_t points = 300;
    std::size_t sweep_points = 100;
    std::uint64_t seed = 4;
    ControlFlux hybridization_flux{0.25, 0.25, 1.35};
};

struct RunConfig {
    PathsConfig paths;
    QubitConstants qubits;
    FrameConfig frame = FrameConfig::standard();
    EnsembleSpec ensemble;
    DataConfig data;
    TrainSection train;
    DesignConfig design;
    AdaptConfig adapt;  // bounds follow ensemble.eta unless given explicitly
    EvaluationConfig evaluation;

    std::filesystem::path resolve(const std::string& p) const;
    void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);
// Starts from defaults; unknown keys are a ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json yaml_file_to_json(const std::filesystem::path& path);
nlohmann::json yaml_scalar_to_json(const std::string& text);

// Applies "section.key=value" overrides (value parsed as YAML) to a config document.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// FNV-1a of the canonical JSON form, leaving out paths and worker counts.
std::string config_hash(const RunConfig& cfg);

}  // namespace effham
