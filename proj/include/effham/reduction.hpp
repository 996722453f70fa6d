// reduction.hpp: full three-mode Hamiltonian -> effective two-qubit coefficients.
//
// Two stages: a dressed-state projection (symmetric orthogonalization of the
// four eigenstates with the largest weight on the coupler-ground qubit
// subspace) gives spectral coefficients c_dress; maximizing the process
// fidelity against the projected sub-unitary, seeded at c_dress, gives c_true.

#pragma once

#include "effham/linalg.hpp"
#include "effham/optim.hpp"
#include "effham/types.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace effham {

struct DressedFrame {
    std::array<int, 4> selected_indices{};  // into the ascending eigenvalue list of H_full
    std::array<double, 4> energies{};        // rad/ns, ascending
    std::array<double, 4> weights{};         // qubit-subspace weight of each selected state
    std::array<double, 8> all_weights{};     // weight of every eigenstate
    double weight_gap = 0.0;                 // 4th-largest minus 5th-largest weight
    Mat4 overlap;                            // M
    Mat4 orthonormalized;                    // M S^{-1/2}
};

struct DressedProjection {
    DressedFrame frame;
    Mat4 h_dress;
};

inline constexpr double kSelectionTieTolerance = 1e-9;
inline constexpr double kGramEigenvalueFloor = 1e-14;

// Throws DegenerateSelectionError when the 4th and 5th weights tie within
// kSelectionTieTolerance or the Gram matrix has an eigenvalue below the floor.
DressedProjection dressed_projection(const Mat8& h);
DressedProjection dressed_projection(const HermitianSpectrum<8>& spectrum);

// Same, but with the eigenvector columns multiplied by the given phases first.
DressedProjection dressed_projection_with_phases(const HermitianSpectrum<8>& spectrum,
                                                 const std::array<cplx, 8>& phases);

// c_k = Tr(P_k h4) / 4 converted to MHz; the identity component is dropped.
CoefficientVector coefficients_from_hamiltonian(const Mat4& h4);

// Frobenius norm (rad/ns) of the part of h4 outside span{II, ZI, IZ, XX, YY, ZZ}.
double pauli_residual_norm(const Mat4& h4);

// 4x4 block of exp(-i h t) on the coupler-ground qubit subspace.
Mat4 projected_subunitary(const Mat8& h, double t);
Mat4 projected_block(const Mat8& u);

// |Tr(exp(+i H_eff(c) t) U_proj)|^2 / 16
double process_fidelity(const CoefficientVector& c, const Mat4& u_proj, double t);

// Fidelity and its gradient with respect to c in MHz.
double process_fidelity_gradient(const CoefficientVector& c, const Mat4& u_proj, double t, Vec5& gradient);

struct FidelitySnapshot {
    double t = 0.0;
    Mat4 u_proj;
};

struct RefineOptions {
    int max_iterations = 200;
    // Max-norm of the fidelity gradient in fidelity per rad/ns.
    double gradient_tolerance = 1e-10;
};

struct RefineResult {
    CoefficientVector coefficients;
    double fidelity = 0.0;
    double seed_fidelity = 0.0;
    int iterations = 0;
    bool converged = false;
    // False when the very first line search failed; coefficients == seed then.
    bool improved = true;
    std::string status;
};

// Locally maximizes process_fidelity starting from the seed.
RefineResult refine_coefficients(const CoefficientVector& seed, const Mat4& u_proj, double t,
                                 const RefineOptions& options = {});

// Maximizes the mean fidelity over several time snapshots.
RefineResult refine_coefficients_multi(const CoefficientVector& seed, std::span<const FidelitySnapshot> snapshots,
                                       const RefineOptions& options = {});

// Snapshot times t*s/n for s = 1..n.
std::vector<FidelitySnapshot> fidelity_snapshots(const Mat8& h, double t, int count);

// Everything the data pipeline derives from one full Hamiltonian.
struct ReductionResult {
    DressedFrame frame;
    Mat4 h_dress;
    Mat4 u_proj;
    CoefficientVector c_dress;
    CoefficientVector c_true;
    double fidelity_dress = 0.0;
    double fidelity_true = 0.0;
    double residual_norm = 0.0;
    RefineResult refine;
};

struct ReductionOptions {
    RefineOptions refine;
    // >1 enables the multi-snapshot refinement objective.
    int snapshots = 1;
};

// Full pipeline with a single eigendecomposition of h. Throws DegenerateSelectionError.
ReductionResult reduce(const Mat8& h, double t, const ReductionOptions& options = {});

// Exact coefficient map (phi, eta) -> c_true.
ReductionResult reduce(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                       const FrameConfig& frame, double t, const ReductionOptions& options = {});

}  // namespace effham
