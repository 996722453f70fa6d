#include "effham/coefficient_map.hpp"

namespace effham {

CoefficientVector SurrogateMap::coefficients(const DeviceParams& eta, const ControlFlux& phi) const {
    return forward(model_, eta, phi);
}

CoefficientVector SurrogateMap::coefficients_with_jacobian(const DeviceParams& eta, const ControlFlux& phi,
                                                           Mat5& jacobian) const {
    return forward_with_eta_jacobian(model_, eta, phi, jacobian);
}

OracleMap::OracleMap(QubitConstants q, FrameConfig frame, double t, Vec5 scales, double relative_step,
                     ReductionOptions options)
    : q_(q), frame_(frame), t_(t), steps_(relative_step * scales.cwiseAbs()), options_(options) {
    for (Eigen::Index k = 0; k < 5; ++k)
        if (!(steps_(k) > 0.0)) throw std::invalid_argument("OracleMap: difference steps must be positive");
}

CoefficientVector OracleMap::coefficients(const DeviceParams& eta, const ControlFlux& phi) const {
    return reduce(q_, eta, phi, frame_, t_, options_).c_true;
}

CoefficientVector OracleMap::coefficients_with_jacobian(const DeviceParams& eta, const ControlFlux& phi,
                                                        Mat5& jacobian) const {
    const CoefficientVector c = coefficients(eta, phi);
    const Vec5 x = eta.to_vector();
    for (Eigen::Index k = 0; k < 5; ++k) {
        Vec5 up = x, down = x;
        up(k) += steps_(k);
        down(k) -= steps_(k);
        const Vec5 cu = coefficients(DeviceParams::from_vector(up), phi).to_vector();
        const Vec5 cd = coefficients(DeviceParams::from_vector(down), phi).to_vector();
        jacobian.col(k) = (cu - cd) / (2.0 * steps_(k));
    }
    return c;
}

}  // namespace effham
