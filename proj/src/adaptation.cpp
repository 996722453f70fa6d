#include "effham/adaptation.hpp"

#include "effham/effective_model.hpp"
#include "effham/parallel.hpp"
#include "effham/physics.hpp"
#include "effham/random.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>

namespace effham {

MeasurementTable synthesize_measurements(const QubitConstants& q, const DeviceParams& eta_true,
                                         const std::vector<ControlFlux>& fluxes,
                                         const std::vector<MeasurementPair>& pairs, const FrameConfig& frame,
                                         double t) {
    if (t < 0.0) throw std::invalid_argument("synthesize_measurements: t must be >= 0");
    MeasurementTable table;
    table.fluxes = fluxes;
    table.pairs = pairs;
    table.t = t;
    table.values.resize(static_cast<Eigen::Index>(fluxes.size()), static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t f = 0; f < fluxes.size(); ++f) {
        const Mat8 u = propagator(build_full_hamiltonian(q, eta_true, fluxes[f], frame), t);
        for (std::size_t p = 0; p < pairs.size(); ++p)
            table.values(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(p)) =
                measure_with_propagator(u, pairs[p]);
    }
    return table;
}

Eigen::MatrixXd predict_expectations(const CoefficientMap& map, const DeviceParams& eta,
                                     const std::vector<ControlFlux>& fluxes,
                                     const std::vector<MeasurementPair>& pairs, double t) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(fluxes.size()), static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t f = 0; f < fluxes.size(); ++f)
        out.row(static_cast<Eigen::Index>(f)) =
            effective_expectations(map.coefficients(eta, fluxes[f]), pairs, t).transpose();
    return out;
}

double adaptation_loss(const CoefficientMap& map, const MeasurementTable& table, const DeviceParams& eta,
                       Vec5* gradient) {
    double loss = 0.0;
    if (gradient) gradient->setZero();
    for (std::size_t f = 0; f < table.fluxes.size(); ++f) {
        const Eigen::VectorXd measured = table.values.row(static_cast<Eigen::Index>(f)).transpose();
        if (!gradient) {
            const Eigen::VectorXd pred =
                effective_expectations(map.coefficients(eta, table.fluxes[f]), table.pairs, table.t);
            loss += (pred - measured).squaredNorm();
            continue;
        }
        Mat5 jac;
        const CoefficientVector c = map.coefficients_with_jacobian(eta, table.fluxes[f], jac);
        // Value pass first for the residual weights, then one weighted adjoint pass.
        const Eigen::VectorXd pred = effective_expectations(c, table.pairs, table.t);
        const Eigen::VectorXd residual = pred - measured;
        loss += residual.squaredNorm();
        const WeightedGradient wg =
            effective_expectations_weighted_gradient(c, table.pairs, 2.0 * residual, table.t);
        *gradient += jac.transpose() * wg.gradient;
    }
    return loss;
}

void AdaptConfig::validate() const {
    if (restarts < 1) throw ConfigError("adaptation needs at least one restart");
    if (max_iterations < 1) throw ConfigError("adaptation max_iterations must be >= 1");
    for (std::size_t k = 0; k < bounds.size(); ++k)
        if (!(std::isfinite(bounds[k].lower) && std::isfinite(bounds[k].upper) && bounds[k].lower <= bounds[k].upper))
            throw ConfigError(fmt::format("adaptation bounds for {} are invalid", DeviceParams::kNames[k]));
}

AdaptResult adapt(const CoefficientMap& map, const MeasurementTable& table, const AdaptConfig& cfg) {
    cfg.validate();
    if (table.values.rows() != static_cast<Eigen::Index>(table.fluxes.size()) ||
        table.values.cols() != static_cast<Eigen::Index>(table.pairs.size()))
        throw std::invalid_argument("adapt: measurement table is not aligned with its flux and pair lists");
    const auto start = std::chrono::steady_clock::now();

    Vec5 lower, width;
    for (std::size_t k = 0; k < cfg.bounds.size(); ++k) {
        lower(static_cast<Eigen::Index>(k)) = cfg.bounds[k].lower;
        width(static_cast<Eigen::Index>(k)) = cfg.bounds[k].width();
    }
    auto to_eta = [&](const Eigen::VectorXd& u) { return DeviceParams::from_vector(lower + width.cwiseProduct(u)); };

    auto objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
        Vec5 g;
        const double loss = adaptation_loss(map, table, to_eta(u), &g);
        grad = g.cwiseProduct(width);
        return loss;
    };

    optim::LbfgsOptions lopts;
    lopts.max_iterations = cfg.max_iterations;
    lopts.gradient_tolerance = cfg.gradient_tolerance;
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(5), hi = Eigen::VectorXd::Ones(5);

    AdaptResult out;
    out.restarts.resize(static_cast<std::size_t>(cfg.restarts));
    parallel_for(out.restarts.size(), cfg.workers, [&](std::size_t r) {
        Rng rng(derive_seed(cfg.seed, "adapt_restart", r));
        Eigen::VectorXd u0(5);
        for (Eigen::Index k = 0; k < 5; ++k) u0(k) = rng.uniform();
        const optim::LbfgsResult res = optim::minimize_bounded(objective, u0, lo, hi, lopts);
        RestartTrace& tr = out.restarts[r];
        tr.eta_init = to_eta(u0);
        tr.eta_final = to_eta(res.x);
        tr.initial_loss = res.trace.front();
        tr.final_loss = res.f;
        tr.iterations = res.iterations;
        tr.evaluations = res.evaluations;
        tr.status = optim::to_string(res.status);
        tr.trace = res.trace;
    });

    bool any_improved = false;
    for (std::size_t r = 0; r < out.restarts.size(); ++r) {
        const RestartTrace& tr = out.restarts[r];
        if (tr.final_loss <= tr.initial_loss && std::isfinite(tr.final_loss)) any_improved = true;
        if (r == 0 || tr.final_loss < out.best_loss) {
            out.best_loss = tr.final_loss;
            out.best_restart = r;
            out.eta_pred = tr.eta_final;
        }
    }
    if (!any_improved) throw AdaptationFailedError("every adaptation restart ended above its initial loss");
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace effham
