#include "effham/design.hpp"

#include "effham/effective_model.hpp"
#include "effham/parallel.hpp"
#include "effham/random.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace effham {

std::vector<MeasurementPair> build_candidates() {
    static constexpr std::string_view kPaulis = "IXYZ";
    std::vector<MeasurementPair> out;
    out.reserve(kNumCandidates);
    for (std::size_t s1 = 0; s1 < kNumPauliStates; ++s1)
        for (std::size_t s2 = 0; s2 < kNumPauliStates; ++s2)
            for (char a : kPaulis)
                for (char b : kPaulis) {
                    if (a == 'I' && b == 'I') continue;
                    const char obs[2] = {a, b};
                    out.emplace_back(static_cast<PauliState>(s1), static_cast<PauliState>(s2),
                                     std::string_view(obs, 2));
                }
    return out;
}

Eigen::VectorXd SignalMatrix::variances() const {
    const Eigen::RowVectorXd mean = values.colwise().mean();
    return (values.rowwise() - mean).colwise().squaredNorm().transpose() / static_cast<double>(values.rows());
}

SignalMatrix informativeness_signals(const CoefficientMap& map, const EnsembleSpec& spec, std::size_t n_draws,
                                     double t, std::uint64_t seed, int workers) {
    spec.validate();
    SignalMatrix sig;
    sig.columns = build_candidates();
    EnsembleSpec draws = spec;
    draws.seed = derive_seed(seed, "signals");
    sig.draw_eta = sample_ensemble(draws, n_draws);
    sig.draw_phi = sample_pulses(draws, n_draws);
    sig.values.resize(static_cast<Eigen::Index>(n_draws), static_cast<Eigen::Index>(sig.columns.size()));
    parallel_for(n_draws, workers, [&](std::size_t i) {
        const CoefficientVector c = map.coefficients(sig.draw_eta[i], sig.draw_phi[i]);
        sig.values.row(static_cast<Eigen::Index>(i)) = effective_expectations(c, sig.columns, t).transpose();
    });
    return sig;
}

SelectionResult greedy_select(const SignalMatrix& sig, std::size_t k) {
    SelectionResult out = greedy_select(sig.values, k);
    for (std::size_t i : out.indices) out.pairs.push_back(sig.columns.at(i));
    return out;
}

SelectionResult greedy_select(const Eigen::MatrixXd& values, std::size_t k) {
    const Eigen::Index n = values.rows();
    const Eigen::Index p = values.cols();
    if (k < 1 || static_cast<Eigen::Index>(k) > p)
        throw std::invalid_argument(fmt::format("greedy_select: k = {} outside [1, {}]", k, p));
    const double rows = static_cast<double>(n);
    Eigen::MatrixXd residual = values.rowwise() - values.colwise().mean();
    const Eigen::VectorXd raw = residual.colwise().squaredNorm().transpose() / rows;
    const double tolerance = kRankTolerance * std::sqrt(raw.maxCoeff() * rows);

    SelectionResult out;
    std::vector<bool> taken(static_cast<std::size_t>(p), false);
    for (std::size_t pick = 0; pick < k; ++pick) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            const double norm = residual.col(j).squaredNorm();
            if (norm > best_norm) {
                best_norm = norm;
                best = j;
            }
        }
        if (best < 0 || !(std::sqrt(best_norm) > tolerance))
            throw RankDeficiencyError(fmt::format(
                "requested {} pairs but the centred signal matrix has numerical rank {}", k, pick));
        taken[static_cast<std::size_t>(best)] = true;
        out.indices.push_back(static_cast<std::size_t>(best));
        out.raw.push_back(raw(best));
        out.marginal.push_back(best_norm / rows);

        // Modified Gram-Schmidt, applied twice to keep the basis orthogonal.
        const Eigen::VectorXd q = residual.col(best) / std::sqrt(best_norm);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::RowVectorXd proj = q.transpose() * residual;
            residual.noalias() -= q * proj;
        }
        residual.col(best).setZero();
    }
    return out;
}

FpsResult fps_select(const std::vector<ControlFlux>& pool, std::size_t n) {
    if (pool.empty()) throw std::invalid_argument("fps_select: empty pool");
    if (n > pool.size())
        throw std::invalid_argument(fmt::format("fps_select: {} points requested from a pool of {}", n, pool.size()));
    const auto m = static_cast<Eigen::Index>(pool.size());
    Eigen::MatrixXd x(3, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto a = pool[static_cast<std::size_t>(i)].to_array();
        x.col(i) << a[0], a[1], a[2];
    }
    const Eigen::Vector3d mean = x.rowwise().mean();
    x.colwise() -= mean;
    for (int d = 0; d < 3; ++d) {
        const double sd = std::sqrt(x.row(d).squaredNorm() / static_cast<double>(m));
        if (sd > 0.0) x.row(d) /= sd;
    }

    FpsResult out;
    if (n == 0) return out;
    // After centring, the centroid is the origin.
    Eigen::Index first = 0;
    x.colwise().squaredNorm().minCoeff(&first);
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    Eigen::Index current = first;
    double current_distance = 0.0;
    for (std::size_t pick = 0; pick < n; ++pick) {
        out.indices.push_back(static_cast<std::size_t>(current));
        out.fluxes.push_back(pool[static_cast<std::size_t>(current)]);
        out.min_distance.push_back(current_distance);
        dist = dist.cwiseMin((x.colwise() - x.col(current)).colwise().norm().transpose());
        // minCoeff/maxCoeff return the first extremum, so ties go to the lowest index.
        current_distance = dist.maxCoeff(&current);
    }
    return out;
}

}  // namespace effham
