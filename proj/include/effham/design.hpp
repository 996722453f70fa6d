// design.hpp: choosing which probes to measure and at which fluxes.

#pragma once

#include "effham/coefficient_map.hpp"
#include "effham/dataset.hpp"
#include "effham/types.hpp"

#include <cstdint>
#include <vector>

namespace effham {

inline constexpr std::size_t kNumCandidateObservables = 15;
inline constexpr std::size_t kNumCandidates = kNumPauliStates * kNumPauliStates * kNumCandidateObservables;

// State-major: (s1, s2) over Z+,Z-,X+,X-,Y+,Y- for each qubit, then the 15
// observables in IXYZ lexicographic order without II.
std::vector<MeasurementPair> build_candidates();

struct SignalMatrix {
    Eigen::MatrixXd values;  // draws x candidates
    std::vector<MeasurementPair> columns;
    std::vector<DeviceParams> draw_eta;
    std::vector<ControlFlux> draw_phi;

    // Population variance of each column.
    Eigen::VectorXd variances() const;
};

// Expectations of every candidate after time t under H_eff(map(eta, phi)) for
// n_draws uniform draws of (eta, phi) from the ensemble box.
SignalMatrix informativeness_signals(const CoefficientMap& map, const EnsembleSpec& spec, std::size_t n_draws,
                                     double t, std::uint64_t seed, int workers = 1);

struct SelectionResult {
    std::vector<std::size_t> indices;      // into the signal columns
    std::vector<MeasurementPair> pairs;
    std::vector<double> raw;               // column variance of each pick
    std::vector<double> marginal;          // residual variance when picked
};

inline constexpr double kRankTolerance = 1e-10;

// Greedy residual-variance selection on mean-centred columns (the pivot order
// of QR with column pivoting). Ties go to the lowest column index. Throws
// RankDeficiencyError when fewer than k columns have residual norm above
// kRankTolerance times the largest column norm.
SelectionResult greedy_select(const SignalMatrix& sig, std::size_t k);
SelectionResult greedy_select(const Eigen::MatrixXd& values, std::size_t k);

struct FpsResult {
    std::vector<std::size_t> indices;  // into the pool
    std::vector<ControlFlux> fluxes;
    std::vector<double> min_distance;  // rescaled distance to the earlier picks (0 for the first)
};

// Farthest-point sampling with every axis rescaled to unit standard deviation
// over the pool, started at the point nearest the pool centroid.
FpsResult fps_select(const std::vector<ControlFlux>& pool, std::size_t n);

}  // namespace effham
