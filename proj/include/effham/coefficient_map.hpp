// coefficient_map.hpp: (eta, phi) -> c with a Jacobian in eta.
//
// The adaptation and design stages only need this interface, so the trained
// surrogate and the exact reduction pipeline are interchangeable there.

#pragma once

#include "effham/reduction.hpp"
#include "effham/surrogate.hpp"
#include "effham/types.hpp"

namespace effham {

class CoefficientMap {
public:
    virtual ~CoefficientMap() = default;
    virtual CoefficientVector coefficients(const DeviceParams& eta, const ControlFlux& phi) const = 0;
    // d c / d eta in MHz per GHz.
    virtual CoefficientVector coefficients_with_jacobian(const DeviceParams& eta, const ControlFlux& phi,
                                                         Mat5& jacobian) const = 0;
};

class SurrogateMap final : public CoefficientMap {
public:
    explicit SurrogateMap(const SurrogateModel& model) : model_(model) {}
    CoefficientVector coefficients(const DeviceParams& eta, const ControlFlux& phi) const override;
    CoefficientVector coefficients_with_jacobian(const DeviceParams& eta, const ControlFlux& phi,
                                                 Mat5& jacobian) const override;

private:
    const SurrogateModel& model_;
};

// The data-generation pipeline itself: c_true from reduce(). The Jacobian is
// a central difference with per-parameter step `relative_step * scale_k`.
class OracleMap final : public CoefficientMap {
public:
    OracleMap(QubitConstants q, FrameConfig frame, double t, Vec5 scales, double relative_step = 1e-5,
              ReductionOptions options = {});
    CoefficientVector coefficients(const DeviceParams& eta, const ControlFlux& phi) const override;
    CoefficientVector coefficients_with_jacobian(const DeviceParams& eta, const ControlFlux& phi,
                                                 Mat5& jacobian) const override;

private:
    QubitConstants q_;
    FrameConfig frame_;
    double t_;
    Vec5 steps_;
    ReductionOptions options_;
};

}  // namespace effham
