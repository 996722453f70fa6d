#include "effham/config.hpp"

#include "effham/io.hpp"
#include "effham/serialize.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <initializer_list>

namespace effham {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::string_view section, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) throw ConfigError(fmt::format("config section '{}' must be a mapping", section));
    for (const auto& [key, value] : obj.items())
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(fmt::format("unknown config key '{}{}{}'", section, section.empty() ? "" : ".", key));
}

template <typename T>
void get_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) obj.at(key).get_to(out);
}

json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined: return nullptr;
        case YAML::NodeType::Sequence: {
            json arr = json::array();
            for (const auto& item : node) arr.push_back(yaml_to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            json obj = json::object();
            for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return obj;
        }
        case YAML::NodeType::Scalar: {
            const std::string text = node.Scalar();
            if (node.Tag() == "!") return text;  // quoted
            long long i = 0;
            if (YAML::convert<long long>::decode(node, i)) return i;
            double d = 0.0;
            if (YAML::convert<double>::decode(node, d)) return d;
            bool b = false;
            if (YAML::convert<bool>::decode(node, b)) return b;
            return text;
        }
    }
    return nullptr;
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : std::filesystem::path(paths.results_dir) / path;
}

void RunConfig::validate() const {
    try {
        qubits.validate();
        frame.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    ensemble.validate();
    train.train.validate();
    adapt.validate();
    if (data.devices < 1 || data.pulses_per_device < 1) throw ConfigError("data.devices and pulses must be >= 1");
    if (!(data.t > 0.0)) throw ConfigError("data.t must be positive");
    if (data.snapshots < 1) throw ConfigError("data.snapshots must be >= 1");
    if (design.pairs < 1 || design.fluxes < 1 || design.draws < 1) throw ConfigError("design sizes must be >= 1");
    if (design.pool < design.fluxes) throw ConfigError("design.pool must be at least design.fluxes");
    if (evaluation.held_out_devices < 1 || evaluation.points < 1 || evaluation.sweep_points < 2)
        throw ConfigError("evaluation sizes are too small");
}

json to_json(const RunConfig& c) {
    const TrainConfig& tr = c.train.train;
    json eta_bounds = json::object();
    for (std::size_t k = 0; k < c.adapt.bounds.size(); ++k)
        eta_bounds[std::string(DeviceParams::kNames[k])] = c.adapt.bounds[k];
    return {
        {"paths",
         {{"results_dir", c.paths.results_dir},
          {"dataset", c.paths.dataset},
          {"checkpoint", c.paths.checkpoint},
          {"selection", c.paths.selection},
          {"adaptation", c.paths.adaptation}}},
        {"qubits", c.qubits},
        {"frame", c.frame},
        {"ensemble", c.ensemble},
        {"data",
         {{"devices", c.data.devices},
          {"pulses_per_device", c.data.pulses_per_device},
          {"t", c.data.t},
          {"snapshots", c.data.snapshots},
          {"workers", c.data.workers}}},
        {"train",
         {{"learning_rate", tr.learning_rate},
          {"beta1", tr.beta1},
          {"beta2", tr.beta2},
          {"epsilon", tr.epsilon},
          {"plateau_patience", tr.plateau_patience},
          {"decay_factor", tr.decay_factor},
          {"min_learning_rate", tr.min_learning_rate},
          {"plateau_threshold", tr.plateau_threshold},
          {"early_stop_patience", tr.early_stop_patience},
          {"max_epochs", tr.max_epochs},
          {"seed", tr.seed},
          {"init_seed", c.train.init_seed}}},
        {"design",
         {{"draws", c.design.draws},
          {"pairs", c.design.pairs},
          {"fluxes", c.design.fluxes},
          {"pool", c.design.pool},
          {"seed", c.design.seed}}},
        {"adapt",
         {{"bounds", eta_bounds},
          {"restarts", c.adapt.restarts},
          {"max_iterations", c.adapt.max_iterations},
          {"gradient_tolerance", c.adapt.gradient_tolerance},
          {"seed", c.adapt.seed},
          {"workers", c.adapt.workers}}},
        {"evaluation",
         {{"held_out_devices", c.evaluation.held_out_devices},
          {"held_out_seed", c.evaluation.held_out_seed},
          {"points", c.evaluation.points},
          {"sweep_points", c.evaluation.sweep_points},
          {"seed", c.evaluation.seed},
          {"hybridization_flux", c.evaluation.hybridization_flux}}},
    };
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    try {
        if (j.is_null()) return c;
        check_keys(j, "", {"paths", "qubits", "frame", "ensemble", "data", "train", "design", "adapt", "evaluation"});
        if (j.contains("paths")) {
            const json& s = j.at("paths");
            check_keys(s, "paths", {"results_dir", "dataset", "checkpoint", "selection", "adaptation"});
            get_opt(s, "results_dir", c.paths.results_dir);
            get_opt(s, "dataset", c.paths.dataset);
            get_opt(s, "checkpoint", c.paths.checkpoint);
            get_opt(s, "selection", c.paths.selection);
            get_opt(s, "adaptation", c.paths.adaptation);
        }
        if (j.contains("qubits")) {
            const json& s = j.at("qubits");
            check_keys(s, "qubits", {"ej0_q1", "ej0_q2", "ec_q1", "ec_q2"});
            get_opt(s, "ej0_q1", c.qubits.ej0_q1);
            get_opt(s, "ej0_q2", c.qubits.ej0_q2);
            get_opt(s, "ec_q1", c.qubits.ec_q1);
            get_opt(s, "ec_q2", c.qubits.ec_q2);
        }
        if (j.contains("frame")) {
            const json& s = j.at("frame");
            check_keys(s, "frame", {"omega0"});
            get_opt(s, "omega0", c.frame.omega0);
        }
        if (j.contains("ensemble")) {
            const json& s = j.at("ensemble");
            check_keys(s, "ensemble", {"eta", "flux", "seed"});
            if (s.contains("eta")) {
                const json& e = s.at("eta");
                check_keys(e, "ensemble.eta", {"ej0_c1", "ec_c1", "ec_q1c1", "ec_q2c1", "ec_q1q2"});
                for (std::size_t k = 0; k < DeviceParams::kSize; ++k)
                    get_opt(e, DeviceParams::kNames[k].data(), c.ensemble.eta[k]);
            }
            if (s.contains("flux")) {
                const json& f = s.at("flux");
                check_keys(f, "ensemble.flux", {"phi_q1", "phi_q2", "phi_c1"});
                for (std::size_t k = 0; k < ControlFlux::kSize; ++k)
                    get_opt(f, ControlFlux::kNames[k].data(), c.ensemble.flux[k]);
            }
            get_opt(s, "seed", c.ensemble.seed);
        }
        c.adapt.bounds = c.ensemble.eta;
        if (j.contains("data")) {
            const json& s = j.at("data");
            check_keys(s, "data", {"devices", "pulses_per_device", "t", "snapshots", "workers"});
            get_opt(s, "devices", c.data.devices);
            get_opt(s, "pulses_per_device", c.data.pulses_per_device);
            get_opt(s, "t", c.data.t);
            get_opt(s, "snapshots", c.data.snapshots);
            get_opt(s, "workers", c.data.workers);
        }
        if (j.contains("train")) {
            const json& s = j.at("train");
            TrainConfig& t = c.train.train;
            check_keys(s, "train",
                       {"learning_rate", "beta1", "beta2", "epsilon", "plateau_patience", "decay_factor",
                        "min_learning_rate", "plateau_threshold", "early_stop_patience", "max_epochs", "seed",
                        "init_seed"});
            get_opt(s, "learning_rate", t.learning_rate);
            get_opt(s, "beta1", t.beta1);
            get_opt(s, "beta2", t.beta2);
            get_opt(s, "epsilon", t.epsilon);
            get_opt(s, "plateau_patience", t.plateau_patience);
            get_opt(s, "decay_factor", t.decay_factor);
            get_opt(s, "min_learning_rate", t.min_learning_rate);
            get_opt(s, "plateau_threshold", t.plateau_threshold);
            get_opt(s, "early_stop_patience", t.early_stop_patience);
            get_opt(s, "max_epochs", t.max_epochs);
            get_opt(s, "seed", t.seed);
            get_opt(s, "init_seed", c.train.init_seed);
        }
        if (j.contains("design")) {
            const json& s = j.at("design");
            check_keys(s, "design", {"draws", "pairs", "fluxes", "pool", "seed"});
            get_opt(s, "draws", c.design.draws);
            get_opt(s, "pairs", c.design.pairs);
            get_opt(s, "fluxes", c.design.fluxes);
            get_opt(s, "pool", c.design.pool);
            get_opt(s, "seed", c.design.seed);
        }
        if (j.contains("adapt")) {
            const json& s = j.at("adapt");
            check_keys(s, "adapt", {"bounds", "restarts", "max_iterations", "gradient_tolerance", "seed", "workers"});
            if (s.contains("bounds")) {
                const json& e = s.at("bounds");
                check_keys(e, "adapt.bounds", {"ej0_c1", "ec_c1", "ec_q1c1", "ec_q2c1", "ec_q1q2"});
                for (std::size_t k = 0; k < DeviceParams::kSize; ++k)
                    get_opt(e, DeviceParams::kNames[k].data(), c.adapt.bounds[k]);
            }
            get_opt(s, "restarts", c.adapt.restarts);
            get_opt(s, "max_iterations", c.adapt.max_iterations);
            get_opt(s, "gradient_tolerance", c.adapt.gradient_tolerance);
            get_opt(s, "seed", c.adapt.seed);
            get_opt(s, "workers", c.adapt.workers);
        }
        if (j.contains("evaluation")) {
            const json& s = j.at("evaluation");
            check_keys(s, "evaluation",
                       {"held_out_devices", "held_out_seed", "points", "sweep_points", "seed", "hybridization_flux"});
            get_opt(s, "held_out_devices", c.evaluation.held_out_devices);
            get_opt(s, "held_out_seed", c.evaluation.held_out_seed);
            get_opt(s, "points", c.evaluation.points);
            get_opt(s, "sweep_points", c.evaluation.sweep_points);
            get_opt(s, "seed", c.evaluation.seed);
            get_opt(s, "hybridization_flux", c.evaluation.hybridization_flux);
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid config value: {}", e.what()));
    }
    c.validate();
    return c;
}

json yaml_file_to_json(const std::filesystem::path& path) {
    try {
        return yaml_to_json(YAML::LoadFile(path.string()));
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("cannot read config '{}': {}", path.string(), e.what()));
    }
}

json yaml_scalar_to_json(const std::string& text) {
    try {
        return yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("cannot parse value '{}': {}", text, e.what()));
    }
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(yaml_file_to_json(path)); }

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", assignment));
    const std::string key = assignment.substr(0, eq);
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        if (node->is_null()) *node = json::object();
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(fmt::format("override key '{}' is malformed", key));
        if (dot == std::string::npos) {
            (*node)[part] = yaml_scalar_to_json(assignment.substr(eq + 1));
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

std::string config_hash(const RunConfig& cfg) {
    // Thread counts and file locations never change results, so they stay out of the hash.
    json j = to_json(cfg);
    j.erase("paths");
    j["data"].erase("workers");
    j["adapt"].erase("workers");
    return content_hash(j);
}

}  // namespace effham
