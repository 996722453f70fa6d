#include "effham/dataset.hpp"

#include "effham/io.hpp"
#include "effham/parallel.hpp"
#include "effham/random.hpp"
#include "effham/serialize.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace effham {

using nlohmann::json;

namespace {

constexpr std::string_view kDatasetKind = "effham.dataset";

bool valid_interval(const Interval& iv) {
    return std::isfinite(iv.lower) && std::isfinite(iv.upper) && iv.lower <= iv.upper;
}

json record_to_json(const DatasetRecord& r) {
    return {{"device", r.device},
            {"pulse", r.pulse},
            {"eta", r.eta},
            {"phi", r.phi},
            {"c_true", r.c_true},
            {"c_dress", r.c_dress},
            {"fidelity_true", r.fidelity_true},
            {"fidelity_dress", r.fidelity_dress},
            {"residual_norm", r.residual_norm},
            {"weight_gap", r.weight_gap},
            {"min_weight", r.min_weight},
            {"refine_iterations", r.refine_iterations},
            {"flags", r.flags},
            {"message", r.message}};
}

DatasetRecord record_from_json(const json& j) {
    DatasetRecord r;
    j.at("device").get_to(r.device);
    j.at("pulse").get_to(r.pulse);
    j.at("eta").get_to(r.eta);
    j.at("phi").get_to(r.phi);
    j.at("c_true").get_to(r.c_true);
    j.at("c_dress").get_to(r.c_dress);
    j.at("fidelity_true").get_to(r.fidelity_true);
    j.at("fidelity_dress").get_to(r.fidelity_dress);
    j.at("residual_norm").get_to(r.residual_norm);
    j.at("weight_gap").get_to(r.weight_gap);
    j.at("min_weight").get_to(r.min_weight);
    j.at("refine_iterations").get_to(r.refine_iterations);
    j.at("flags").get_to(r.flags);
    j.at("message").get_to(r.message);
    return r;
}

}  // namespace

DeviceParams EnsembleSpec::eta_lower() const {
    std::array<double, DeviceParams::kSize> a{};
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = eta[k].lower;
    return DeviceParams::from_array(a);
}

DeviceParams EnsembleSpec::eta_upper() const {
    std::array<double, DeviceParams::kSize> a{};
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = eta[k].upper;
    return DeviceParams::from_array(a);
}

bool EnsembleSpec::contains(const DeviceParams& d) const {
    const auto a = d.to_array();
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!eta[k].contains(a[k])) return false;
    return true;
}

bool EnsembleSpec::contains(const ControlFlux& p) const {
    const auto a = p.to_array();
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!flux[k].contains(a[k])) return false;
    return true;
}

void EnsembleSpec::validate() const {
    for (std::size_t k = 0; k < eta.size(); ++k)
        if (!valid_interval(eta[k]))
            throw ConfigError(fmt::format("ensemble bounds for {} are invalid: [{}, {}]", DeviceParams::kNames[k],
                                          eta[k].lower, eta[k].upper));
    for (std::size_t k = 0; k < flux.size(); ++k)
        if (!valid_interval(flux[k]))
            throw ConfigError(fmt::format("flux bounds for {} are invalid: [{}, {}]", ControlFlux::kNames[k],
                                          flux[k].lower, flux[k].upper));
    if (eta[0].lower <= 0.0 || eta[1].lower <= 0.0)
        throw ConfigError("coupler E_J0 and E_C bounds must be strictly positive");
    for (std::size_t k = 2; k < eta.size(); ++k)
        if (eta[k].lower < 0.0) throw ConfigError("coupling-energy bounds must be non-negative");
}

std::vector<DeviceParams> sample_ensemble(const EnsembleSpec& spec, std::size_t n, std::uint64_t stream) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, "ensemble", stream));
    std::vector<DeviceParams> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, DeviceParams::kSize> a{};
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = rng.uniform(spec.eta[k].lower, spec.eta[k].upper);
        out.push_back(DeviceParams::from_array(a));
    }
    return out;
}

std::vector<ControlFlux> sample_pulses(const EnsembleSpec& spec, std::size_t m, std::uint64_t stream) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, "pulses", stream));
    std::vector<ControlFlux> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::array<double, ControlFlux::kSize> a{};
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = rng.uniform(spec.flux[k].lower, spec.flux[k].upper);
        out.push_back(ControlFlux::from_array(a));
    }
    return out;
}

bool DatasetRecord::has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

bool DatasetRecord::excluded() const {
    return has_flag(record_flag::kDegenerateSelection) || has_flag(record_flag::kPipelineError);
}

DatasetRecord make_record(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                          const FrameConfig& frame, double t, const ReductionOptions& options) {
    DatasetRecord r;
    r.eta = eta;
    r.phi = phi;
    try {
        const ReductionResult red = reduce(q, eta, phi, frame, t, options);
        r.c_true = red.c_true;
        r.c_dress = red.c_dress;
        r.fidelity_true = red.fidelity_true;
        r.fidelity_dress = red.fidelity_dress;
        r.residual_norm = red.residual_norm;
        r.weight_gap = red.frame.weight_gap;
        r.min_weight = *std::min_element(red.frame.weights.begin(), red.frame.weights.end());
        r.refine_iterations = red.refine.iterations;
        if (!red.refine.converged) r.flags.emplace_back(record_flag::kRefineNotConverged);
        if (!red.refine.improved) r.flags.emplace_back(record_flag::kRefineNoImprovement);
        r.message = red.refine.status;
    } catch (const DegenerateSelectionError& e) {
        r.flags.emplace_back(record_flag::kDegenerateSelection);
        r.message = e.what();
    } catch (const std::exception& e) {
        r.flags.emplace_back(record_flag::kPipelineError);
        r.message = e.what();
    }
    return r;
}

std::vector<const DatasetRecord*> Dataset::usable() const {
    std::vector<const DatasetRecord*> out;
    for (const auto& r : records)
        if (!r.excluded()) out.push_back(&r);
    return out;
}

Dataset generate_dataset(const QubitConstants& q, const std::vector<DeviceParams>& devices,
                         std::size_t pulses_per_device, const FrameConfig& frame, const GenerateOptions& options) {
    q.validate();
    frame.validate();
    options.spec.validate();
    if (!(options.t > 0.0)) throw std::invalid_argument("generate_dataset: t must be positive");

    Dataset data;
    data.qubits = q;
    data.frame = frame;
    data.spec = options.spec;
    data.t = options.t;
    data.devices = devices.size();
    data.pulses_per_device = pulses_per_device;
    data.snapshots = options.reduction.snapshots;
    data.records.resize(devices.size() * pulses_per_device);

    parallel_for(devices.size(), options.workers, [&](std::size_t i) {
        const auto pulses = sample_pulses(options.spec, pulses_per_device, i + 1);
        for (std::size_t j = 0; j < pulses_per_device; ++j) {
            DatasetRecord r = make_record(q, devices[i], pulses[j], frame, options.t, options.reduction);
            r.device = i;
            r.pulse = j;
            data.records[i * pulses_per_device + j] = std::move(r);
        }
    });
    return data;
}

std::string dataset_to_string(const Dataset& data) {
    json header = artifact_header(kDatasetKind, data.config_hash);
    header["qubits"] = data.qubits;
    header["frame"] = data.frame;
    header["spec"] = data.spec;
    header["t"] = data.t;
    header["devices"] = data.devices;
    header["pulses_per_device"] = data.pulses_per_device;
    header["snapshots"] = data.snapshots;
    header["records"] = data.records.size();
    std::string out = header.dump();
    out += '\n';
    for (const auto& r : data.records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

void persist_dataset(const Dataset& data, const std::filesystem::path& path) {
    atomic_write(path, dataset_to_string(data));
}

Dataset dataset_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("dataset is empty");
    Dataset data;
    std::size_t expected = 0;
    try {
        const json header = json::parse(line);
        check_artifact_header(header, kDatasetKind);
        header.at("config_hash").get_to(data.config_hash);
        header.at("qubits").get_to(data.qubits);
        header.at("frame").get_to(data.frame);
        header.at("spec").get_to(data.spec);
        header.at("t").get_to(data.t);
        header.at("devices").get_to(data.devices);
        header.at("pulses_per_device").get_to(data.pulses_per_device);
        header.at("snapshots").get_to(data.snapshots);
        header.at("records").get_to(expected);
        data.records.reserve(expected);
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                data.records.push_back(record_from_json(json::parse(line)));
            } catch (const json::exception& e) {
                throw SchemaError(fmt::format("dataset line {}: {}", lineno, e.what()));
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("dataset header: {}", e.what()));
    }
    if (data.records.size() != expected)
        throw SchemaError(fmt::format("dataset is truncated: header announces {} records, found {}", expected,
                                      data.records.size()));
    return data;
}

Dataset load_dataset(const std::filesystem::path& path) { return dataset_from_string(read_text(path)); }

}  // namespace effham
