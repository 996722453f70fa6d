#include "effham/serialize.hpp"

namespace effham {

using nlohmann::json;

void to_json(json& j, const QubitConstants& v) {
    j = {{"ej0_q1", v.ej0_q1}, {"ej0_q2", v.ej0_q2}, {"ec_q1", v.ec_q1}, {"ec_q2", v.ec_q2}};
}
void from_json(const json& j, QubitConstants& v) {
    j.at("ej0_q1").get_to(v.ej0_q1);
    j.at("ej0_q2").get_to(v.ej0_q2);
    j.at("ec_q1").get_to(v.ec_q1);
    j.at("ec_q2").get_to(v.ec_q2);
}

void to_json(json& j, const DeviceParams& v) {
    j = json::object();
    const auto a = v.to_array();
    for (std::size_t k = 0; k < a.size(); ++k) j[std::string(DeviceParams::kNames[k])] = a[k];
}
void from_json(const json& j, DeviceParams& v) {
    std::array<double, DeviceParams::kSize> a{};
    for (std::size_t k = 0; k < a.size(); ++k) j.at(std::string(DeviceParams::kNames[k])).get_to(a[k]);
    v = DeviceParams::from_array(a);
}

void to_json(json& j, const ControlFlux& v) {
    j = {{"phi_q1", v.phi_q1}, {"phi_q2", v.phi_q2}, {"phi_c1", v.phi_c1}};
}
void from_json(const json& j, ControlFlux& v) {
    j.at("phi_q1").get_to(v.phi_q1);
    j.at("phi_q2").get_to(v.phi_q2);
    j.at("phi_c1").get_to(v.phi_c1);
}

void to_json(json& j, const FrameConfig& v) { j = {{"omega0", v.omega0}}; }
void from_json(const json& j, FrameConfig& v) { j.at("omega0").get_to(v.omega0); }

void to_json(json& j, const CoefficientVector& v) {
    j = json::object();
    for (std::size_t k = 0; k < kNumTerms; ++k) j[std::string(kTermNames[k])] = v[k];
}
void from_json(const json& j, CoefficientVector& v) {
    for (std::size_t k = 0; k < kNumTerms; ++k) j.at(std::string(kTermNames[k])).get_to(v[k]);
}

void to_json(json& j, const MeasurementPair& v) { j = v.label(); }
void from_json(const json& j, MeasurementPair& v) { v = MeasurementPair::parse(j.get<std::string>()); }

void to_json(json& j, const Interval& v) { j = json::array({v.lower, v.upper}); }
void from_json(const json& j, Interval& v) {
    if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "interval must be [lower, upper]", &j);
    j.at(0).get_to(v.lower);
    j.at(1).get_to(v.upper);
}

void to_json(json& j, const EnsembleSpec& v) {
    json eta = json::object();
    for (std::size_t k = 0; k < v.eta.size(); ++k) eta[std::string(DeviceParams::kNames[k])] = v.eta[k];
    json flux = json::object();
    for (std::size_t k = 0; k < v.flux.size(); ++k) flux[std::string(ControlFlux::kNames[k])] = v.flux[k];
    j = {{"eta", eta}, {"flux", flux}, {"seed", v.seed}};
}
void from_json(const json& j, EnsembleSpec& v) {
    for (std::size_t k = 0; k < v.eta.size(); ++k) j.at("eta").at(std::string(DeviceParams::kNames[k])).get_to(v.eta[k]);
    for (std::size_t k = 0; k < v.flux.size(); ++k)
        j.at("flux").at(std::string(ControlFlux::kNames[k])).get_to(v.flux[k]);
    j.at("seed").get_to(v.seed);
}

}  // namespace effham
