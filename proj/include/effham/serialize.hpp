// serialize.hpp: JSON forms of the domain value types.

#pragma once

#include "effham/dataset.hpp"
#include "effham/types.hpp"

#include <json.hpp>

namespace effham {

void to_json(nlohmann::json& j, const QubitConstants& v);
void from_json(const nlohmann::json& j, QubitConstants& v);
void to_json(nlohmann::json& j, const DeviceParams& v);
void from_json(const nlohmann::json& j, DeviceParams& v);
void to_json(nlohmann::json& j, const ControlFlux& v);
void from_json(const nlohmann::json& j, ControlFlux& v);
void to_json(nlohmann::json& j, const FrameConfig& v);
void from_json(const nlohmann::json& j, FrameConfig& v);
void to_json(nlohmann::json& j, const CoefficientVector& v);
void from_json(const nlohmann::json& j, CoefficientVector& v);
void to_json(nlohmann::json& j, const MeasurementPair& v);
void from_json(const nlohmann::json& j, MeasurementPair& v);
void to_json(nlohmann::json& j, const Interval& v);
void from_json(const nlohmann::json& j, Interval& v);
void to_json(nlohmann::json& j, const EnsembleSpec& v);
void from_json(const nlohmann::json& j, EnsembleSpec& v);

}  // namespace effham
