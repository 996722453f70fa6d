#include "effham/reduction.hpp"

#include "effham/pauli.hpp"
#include "effham/physics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace effham {

namespace {

DressedProjection project_spectrum(const Eigen::Matrix<double, 8, 1>& energies, const Mat8& vectors) {
    DressedProjection out;
    DressedFrame& f = out.frame;
    for (int k = 0; k < 8; ++k) {
        double w = 0.0;
        for (int l : kQubitSubspace) w += std::norm(vectors(l, k));
        f.all_weights[static_cast<std::size_t>(k)] = w;
    }
    std::array<int, 8> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return f.all_weights[static_cast<std::size_t>(a)] >
                                                f.all_weights[static_cast<std::size_t>(b)]; });
    f.weight_gap = f.all_weights[static_cast<std::size_t>(order[3])] - f.all_weights[static_cast<std::size_t>(order[4])];
    if (f.weight_gap < kSelectionTieTolerance)
        throw DegenerateSelectionError(
            fmt::format("qubit-like eigenstates not separable: 4th/5th weights differ by {:.3e}", f.weight_gap));

    std::array<int, 4> selected = {order[0], order[1], order[2], order[3]};
    std::sort(selected.begin(), selected.end(), [&](int a, int b) {
        return energies(a) < energies(b) || (energies(a) == energies(b) && a < b);
    });
    f.selected_indices = selected;

    Eigen::Matrix<double, 4, 1> e;
    for (int a = 0; a < 4; ++a) {
        const int k = selected[static_cast<std::size_t>(a)];
        f.energies[static_cast<std::size_t>(a)] = energies(k);
        f.weights[static_cast<std::size_t>(a)] = f.all_weights[static_cast<std::size_t>(k)];
        e(a) = energies(k);
        for (int r = 0; r < 4; ++r) f.overlap(r, a) = vectors(kQubitSubspace[static_cast<std::size_t>(r)], k);
    }

    const Mat4 gram = f.overlap.adjoint() * f.overlap;
    Eigen::SelfAdjointEigenSolver<Mat4> gram_solver(gram);
    const Eigen::Vector4d lambda = gram_solver.eigenvalues();
    if (lambda.minCoeff() < kGramEigenvalueFloor)
        throw DegenerateSelectionError(
            fmt::format("overlap Gram matrix is singular (smallest eigenvalue {:.3e})", lambda.minCoeff()));
    const Mat4 inv_sqrt = gram_solver.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
                          gram_solver.eigenvectors().adjoint();
    f.orthonormalized = f.overlap * inv_sqrt;
    out.h_dress = f.orthonormalized * e.cast<cplx>().asDiagonal() * f.orthonormalized.adjoint();
    out.h_dress = 0.5 * (out.h_dress + out.h_dress.adjoint()).eval();
    return out;
}

}  // namespace

DressedProjection dressed_projection(const HermitianSpectrum<8>& spectrum) {
    return project_spectrum(spectrum.values, spectrum.vectors);
}

DressedProjection dressed_projection(const Mat8& h) { return dressed_projection(HermitianSpectrum<8>(h)); }

DressedProjection dressed_projection_with_phases(const HermitianSpectrum<8>& spectrum,
                                                 const std::array<cplx, 8>& phases) {
    Mat8 v = spectrum.vectors;
    for (int k = 0; k < 8; ++k) v.col(k) *= phases[static_cast<std::size_t>(k)];
    return project_spectrum(spectrum.values, v);
}

CoefficientVector coefficients_from_hamiltonian(const Mat4& h4) {
    const auto& basis = coefficient_basis();
    CoefficientVector c;
    for (std::size_t k = 0; k < kNumTerms; ++k) c[k] = (basis[k] * h4).trace().real() / 4.0 / kRadPerNsPerMHz;
    return c;
}

double pauli_residual_norm(const Mat4& h4) {
    const Mat4 trace_part = (h4.trace() / 4.0) * Mat4::Identity();
    return (h4 - trace_part - effective_hamiltonian(coefficients_from_hamiltonian(h4))).norm();
}

Mat4 projected_block(const Mat8& u) {
    Mat4 block;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            block(r, c) = u(kQubitSubspace[static_cast<std::size_t>(r)], kQubitSubspace[static_cast<std::size_t>(c)]);
    return block;
}

Mat4 projected_subunitary(const Mat8& h, double t) { return projected_block(propagator(h, t)); }

double process_fidelity(const CoefficientVector& c, const Mat4& u_proj, double t) {
    const Mat4 forward = HermitianSpectrum<4>(effective_hamiltonian(c)).exp_i(t);
    return std::norm((forward * u_proj).trace()) / 16.0;
}

double process_fidelity_gradient(const CoefficientVector& c, const Mat4& u_proj, double t, Vec5& gradient) {
    const HermitianSpectrum<4> spec(effective_hamiltonian(c));
    const cplx z = (spec.exp_i(t) * u_proj).trace();
    const Mat4 b = spec.trace_sensitivity(u_proj, t);
    const auto& basis = coefficient_basis();
    for (std::size_t k = 0; k < kNumTerms; ++k) {
        const cplx dz = kRadPerNsPerMHz * (b * basis[k]).trace();
        gradient(static_cast<Eigen::Index>(k)) = 2.0 * (std::conj(z) * dz).real() / 16.0;
    }
    return std::norm(z) / 16.0;
}

RefineResult refine_coefficients_multi(const CoefficientVector& seed, std::span<const FidelitySnapshot> snapshots,
                                       const RefineOptions& options) {
    if (!seed.is_finite()) throw std::invalid_argument("refine_coefficients: seed must be finite");
    if (snapshots.empty()) throw std::invalid_argument("refine_coefficients: need at least one snapshot");
    const double inv_count = 1.0 / static_cast<double>(snapshots.size());

    // Optimize in rad/ns so the gradient tolerance is in fidelity per rad/ns.
    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const CoefficientVector c = CoefficientVector::from_vector(x / kRadPerNsPerMHz);
        double f = 0.0;
        Vec5 total = Vec5::Zero();
        Vec5 g;
        for (const auto& snap : snapshots) {
            f += process_fidelity_gradient(c, snap.u_proj, snap.t, g);
            total += g;
        }
        grad = -(inv_count / kRadPerNsPerMHz) * total;
        return -inv_count * f;
    };

    optim::LbfgsOptions lopts;
    lopts.max_iterations = options.max_iterations;
    lopts.gradient_tolerance = options.gradient_tolerance;
    const auto res = optim::minimize(objective, kRadPerNsPerMHz * seed.to_vector(), lopts);

    RefineResult out;
    out.seed_fidelity = -res.trace.front();
    out.coefficients = CoefficientVector::from_vector(res.x / kRadPerNsPerMHz);
    out.fidelity = -res.f;
    out.iterations = res.iterations;
    out.converged = res.converged();
    out.status = optim::to_string(res.status);
    out.improved = !(res.status == optim::LbfgsStatus::LineSearchFailed && res.trace.size() == 1);
    if (!out.improved) out.coefficients = seed;
    return out;
}

RefineResult refine_coefficients(const CoefficientVector& seed, const Mat4& u_proj, double t,
                                 const RefineOptions& options) {
    if (!(t > 0.0)) throw std::invalid_argument("refine_coefficients: t must be positive");
    const FidelitySnapshot snap{t, u_proj};
    return refine_coefficients_multi(seed, std::span<const FidelitySnapshot>(&snap, 1), options);
}

std::vector<FidelitySnapshot> fidelity_snapshots(const Mat8& h, double t, int count) {
    if (count < 1) throw std::invalid_argument("fidelity_snapshots: count must be >= 1");
    const HermitianSpectrum<8> spec(h);
    std::vector<FidelitySnapshot> out;
    for (int s = 1; s <= count; ++s) {
        const double ts = t * s / count;
        out.push_back({ts, projected_block(spec.exp_i(-ts))});
    }
    return out;
}

ReductionResult reduce(const Mat8& h, double t, const ReductionOptions& options) {
    if (!(t > 0.0)) throw std::invalid_argument("reduce: t must be positive");
    const HermitianSpectrum<8> spec(h);
    const DressedProjection dp = dressed_projection(spec);

    ReductionResult out;
    out.frame = dp.frame;
    out.h_dress = dp.h_dress;
    out.c_dress = coefficients_from_hamiltonian(dp.h_dress);
    out.residual_norm = pauli_residual_norm(dp.h_dress);
    out.u_proj = projected_block(spec.exp_i(-t));
    out.fidelity_dress = process_fidelity(out.c_dress, out.u_proj, t);

    if (options.snapshots > 1) {
        std::vector<FidelitySnapshot> snaps;
        for (int s = 1; s <= options.snapshots; ++s) {
            const double ts = t * s / options.snapshots;
            snaps.push_back({ts, projected_block(spec.exp_i(-ts))});
        }
        out.refine = refine_coefficients_multi(out.c_dress, snaps, options.refine);
    } else {
        out.refine = refine_coefficients(out.c_dress, out.u_proj, t, options.refine);
    }
    out.c_true = out.refine.coefficients;
    out.fidelity_true = process_fidelity(out.c_true, out.u_proj, t);
    return out;
}

ReductionResult reduce(const QubitConstants& q, const DeviceParams& eta, const ControlFlux& phi,
                       const FrameConfig& frame, double t, const ReductionOptions& options) {
    return reduce(build_full_hamiltonian(q, eta, phi, frame), t, options);
}

}  // namespace effham
