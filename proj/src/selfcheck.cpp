#include "effham/selfcheck.hpp"

#include "effham/adaptation.hpp"
#include "effham/coefficient_map.hpp"
#include "effham/design.hpp"
#include "effham/effective_model.hpp"
#include "effham/evaluation.hpp"
#include "effham/physics.hpp"
#include "effham/random.hpp"
#include "effham/reduction.hpp"
#include "effham/surrogate.hpp"
#include "effham/swpt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace effham {

namespace {

using Clock = std::chrono::steady_clock;

// Random (device, flux) operating points from the standard box.
struct Points {
    std::vector<DeviceParams> eta;
    std::vector<ControlFlux> phi;
};

Points random_points(std::uint64_t seed, std::string_view tag, std::size_t devices, std::size_t per_device,
                     const EnsembleSpec& box = {}) {
    EnsembleSpec spec = box;
    spec.seed = derive_seed(seed, tag);
    Points p;
    const auto eta = sample_ensemble(spec, devices);
    for (std::size_t d = 0; d < devices; ++d)
        for (const auto& phi : sample_pulses(spec, per_device, d + 1)) {
            p.eta.push_back(eta[d]);
            p.phi.push_back(phi);
        }
    return p;
}

CheckResult finish(CheckResult r, Clock::time_point start, bool below = true) {
    r.passed = below ? (r.value < r.threshold) : (r.value >= r.threshold);
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

double relative_error(double a, double n, double floor) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

}  // namespace

bool SelfcheckReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* SelfcheckReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

CheckResult check_phase_invariance(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"phase_invariance", false, 0.0, 1e-12, "", 0.0};
    const Points pts = random_points(o.seed, "phase", 10, 5);
    Rng rng(derive_seed(o.seed, "phase_draws"));
    std::size_t used = 0;
    for (std::size_t i = 0; i < pts.eta.size(); ++i) {
        const HermitianSpectrum<8> spec(build_full_hamiltonian(o.qubits, pts.eta[i], pts.phi[i], o.frame));
        try {
            const Mat4 base = dressed_projection(spec).h_dress;
            std::array<cplx, 8> phases{};
            for (auto& ph : phases) ph = std::polar(1.0, kTwoPi * rng.uniform());
            r.value = std::max(r.value, max_abs(dressed_projection_with_phases(spec, phases).h_dress - base));
            ++used;
        } catch (const DegenerateSelectionError&) {
        }
    }
    r.detail = fmt::format("max |dH_dress| = {:.3e} rad/ns over {} operating points", r.value, used);
    return finish(r, start);
}

CheckResult check_spectrum_preservation(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"spectrum_preservation", false, 0.0, 1e-10, "", 0.0};
    const Points pts = random_points(o.seed, "spectrum", 10, 5);
    std::size_t used = 0;
    for (std::size_t i = 0; i < pts.eta.size(); ++i) {
        const Mat8 h = build_full_hamiltonian(o.qubits, pts.eta[i], pts.phi[i], o.frame);
        try {
            const DressedProjection dp = dressed_projection(h);
            Eigen::SelfAdjointEigenSolver<Mat4> es(dp.h_dress);
            for (int a = 0; a < 4; ++a)
                r.value = std::max(r.value, std::abs(es.eigenvalues()(a) - dp.frame.energies[static_cast<std::size_t>(a)]));
            ++used;
        } catch (const DegenerateSelectionError&) {
        }
    }
    r.detail = fmt::format("max eigenvalue mismatch {:.3e} rad/ns over {} points", r.value, used);
    return finish(r, start);
}

CheckResult check_refinement_monotone(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"refinement_monotone", false, 0.0, 1e-12, "", 0.0};
    const Points pts = random_points(o.seed, "monotone", 20, 25);
    std::size_t used = 0;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < pts.eta.size(); ++i) {
        try {
            const ReductionResult red = reduce(o.qubits, pts.eta[i], pts.phi[i], o.frame, o.t);
            worst = std::max(worst, red.fidelity_dress - red.fidelity_true);
            ++used;
        } catch (const DegenerateSelectionError&) {
        }
    }
    r.value = std::max(0.0, worst);
    r.detail = fmt::format("max F(c_dress) - F(c_true) = {:.3e} over {} points", worst, used);
    return finish(r, start);
}

CheckResult check_contraction(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"subunitary_contraction", false, 0.0, 1e-10, "", 0.0};
    const Points pts = random_points(o.seed, "contraction", 20, 10);
    double sigma_max = 0.0;
    for (std::size_t i = 0; i < pts.eta.size(); ++i) {
        const Mat4 u = projected_subunitary(build_full_hamiltonian(o.qubits, pts.eta[i], pts.phi[i], o.frame), o.t);
        sigma_max = std::max(sigma_max, Eigen::JacobiSVD<Mat4>(u).singularValues()(0));
    }
    r.value = std::max(0.0, sigma_max - 1.0);
    r.detail = fmt::format("largest singular value {:.15f}", sigma_max);
    return finish(r, start);
}

CheckResult check_sweep_continuity(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"sweep_continuity", false, 0.0, 5.0, "", 0.0};
    EnsembleSpec spec;
    spec.seed = derive_seed(o.seed, "sweep");
    auto devices = sample_ensemble(spec, 4);
    devices.push_back(DeviceParams::from_array({28.0, 0.28, 0.025, 0.025, 0.004}));
    const auto grid = coupler_grid(spec, 100);
    std::size_t invalid = 0;
    for (const auto& eta : devices) {
        std::vector<CoefficientVector> curve;
        std::vector<bool> valid;
        for (const auto& phi : grid) {
            try {
                curve.push_back(reduce(o.qubits, eta, phi, o.frame, o.t).c_true);
                valid.push_back(true);
            } catch (const DegenerateSelectionError&) {
                curve.emplace_back();
                valid.push_back(false);
                ++invalid;
            }
        }
        r.value = std::max(r.value, max_adjacent_jump(curve, valid));
    }
    r.detail = fmt::format("max adjacent jump {:.4f} MHz on a 100-point phi_c1 grid, {} devices, {} degenerate points",
                           r.value, devices.size(), invalid);
    return finish(r, start);
}

CheckResult check_network_gradient(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"network_gradient", false, 0.0, 1e-5, "", 0.0};
    const Points pts = random_points(o.seed, "netgrad", 10, 1);
    Rng rng(derive_seed(o.seed, "netgrad_targets"));
    for (std::size_t i = 0; i < 10; ++i) {
        SurrogateModel m = init_model(derive_seed(o.seed, "netgrad_init", i));
        const EnsembleSpec box;
        for (std::size_t k = 0; k < 3; ++k) {
            m.input_mean(static_cast<Eigen::Index>(k)) = box.flux[k].mid();
            m.input_std(static_cast<Eigen::Index>(k)) = box.flux[k].width() / std::sqrt(12.0);
        }
        for (std::size_t k = 0; k < 5; ++k) {
            m.input_mean(static_cast<Eigen::Index>(k + 3)) = box.eta[k].mid();
            m.input_std(static_cast<Eigen::Index>(k + 3)) = box.eta[k].width() / std::sqrt(12.0);
        }
        DatasetRecord rec;
        rec.eta = pts.eta[i];
        rec.phi = pts.phi[i];
        for (auto& v : rec.c_true.values) v = rng.uniform(-30.0, 30.0);
        r.value = std::max(r.value, gradient_check(m, rec, derive_seed(o.seed, "netgrad_check", i)).max_relative_error);
    }
    r.detail = fmt::format("max relative error {:.3e} over 10 initializations", r.value);
    return finish(r, start);
}

CheckResult check_adaptation_gradient(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"adaptation_gradient", false, 0.0, 1e-5, "", 0.0};
    const EnsembleSpec box;
    SurrogateModel m = init_model(derive_seed(o.seed, "adaptgrad_init"));
    for (std::size_t k = 0; k < 3; ++k) {
        m.input_mean(static_cast<Eigen::Index>(k)) = box.flux[k].mid();
        m.input_std(static_cast<Eigen::Index>(k)) = box.flux[k].width() / std::sqrt(12.0);
    }
    for (std::size_t k = 0; k < 5; ++k) {
        m.input_mean(static_cast<Eigen::Index>(k + 3)) = box.eta[k].mid();
        m.input_std(static_cast<Eigen::Index>(k + 3)) = box.eta[k].width() / std::sqrt(12.0);
    }
    // Give the untrained network coefficients of realistic size.
    m.output_scale = 20.0;
    const SurrogateMap map(m);
    const auto candidates = build_candidates();
    Rng rng(derive_seed(o.seed, "adaptgrad"));
    const Points pts = random_points(o.seed, "adaptgrad_points", 10, 4);
    for (std::size_t i = 0; i < 10; ++i) {
        std::vector<MeasurementPair> pairs;
        for (int p = 0; p < 7; ++p) pairs.push_back(candidates[rng.below(candidates.size())]);
        const std::vector<ControlFlux> fluxes(pts.phi.begin() + static_cast<long>(4 * i),
                                              pts.phi.begin() + static_cast<long>(4 * i + 4));
        const MeasurementTable table = synthesize_measurements(o.qubits, pts.eta[4 * i], fluxes, pairs, o.frame, o.t);
        Vec5 eta;
        for (Eigen::Index k = 0; k < 5; ++k)
            eta(k) = rng.uniform(box.eta[static_cast<std::size_t>(k)].lower, box.eta[static_cast<std::size_t>(k)].upper);
        Vec5 grad;
        adaptation_loss(map, table, DeviceParams::from_vector(eta), &grad);
        // Loss differences from the prediction differences, which avoids
        // subtracting two nearly equal losses.
        Vec5 numeric;
        for (Eigen::Index k = 0; k < 5; ++k) {
            const double h = 1e-5 * box.eta[static_cast<std::size_t>(k)].width();
            Vec5 up = eta, down = eta;
            up(k) += h;
            down(k) -= h;
            const Eigen::MatrixXd pu = predict_expectations(map, DeviceParams::from_vector(up), fluxes, pairs, o.t);
            const Eigen::MatrixXd pd = predict_expectations(map, DeviceParams::from_vector(down), fluxes, pairs, o.t);
            numeric(k) = ((pu - pd).array() * (pu + pd - 2.0 * table.values).array()).sum() / (2.0 * h);
        }
        // Compare in normalized coordinates so all five entries share a scale.
        double scale = 0.0;
        for (Eigen::Index k = 0; k < 5; ++k)
            scale = std::max(scale, std::abs(grad(k)) * box.eta[static_cast<std::size_t>(k)].width());
        for (Eigen::Index k = 0; k < 5; ++k) {
            const double w = box.eta[static_cast<std::size_t>(k)].width();
            r.value = std::max(r.value, relative_error(grad(k) * w, numeric(k) * w, 1e-8 * (1.0 + scale)));
        }
    }
    r.detail = fmt::format("max relative error {:.3e} over 10 random points", r.value);
    return finish(r, start);
}

CheckResult check_dispersive_agreement(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"dispersive_agreement", false, 0.0, 0.2, "", 0.0};
    // Weaker qubit-coupler coupling than the training box, so that both
    // hybridization ratios fall below 0.05 at many operating points.
    EnsembleSpec box;
    box.eta[2] = {0.002, 0.015};
    box.eta[3] = {0.002, 0.015};
    const Points pts = random_points(o.seed, "dispersive", 50, 40, box);
    std::size_t used = 0;
    for (std::size_t i = 0; i < pts.eta.size(); ++i) {
        const HybridizationReport hr = hybridization_ratios(o.qubits, pts.eta[i], pts.phi[i]);
        if (!(hr.ratio_q1 < 0.05 && hr.ratio_q2 < 0.05)) continue;
        const CoefficientVector truth = reduce(o.qubits, pts.eta[i], pts.phi[i], o.frame, o.t).c_true;
        const CoefficientVector sw = swpt_coefficients(o.qubits, pts.eta[i], pts.phi[i], o.frame);
        for (std::size_t k = 0; k < 4; ++k) r.value = std::max(r.value, std::abs(truth[k] - sw[k]));
        ++used;
    }
    if (used < 100) r.value = INFINITY;
    r.detail = fmt::format("max |SWPT - c_true| on ZI/IZ/XX/YY = {:.4f} MHz over {} dispersive points", r.value, used);
    return finish(r, start);
}

OracleAdaptationOutcome oracle_adaptation_trial(const SelfcheckOptions& o, const OracleAdaptationSetup& setup) {
    const EnsembleSpec box;
    const OracleMap oracle(o.qubits, o.frame, o.t, Vec5(box.eta[0].width(), box.eta[1].width(), box.eta[2].width(),
                                                        box.eta[3].width(), box.eta[4].width()));
    const SignalMatrix sig = informativeness_signals(oracle, box, setup.draws, o.t, derive_seed(setup.seed, "signals"),
                                                     setup.workers);
    const SelectionResult sel = greedy_select(sig, setup.pairs);
    EnsembleSpec pool_spec = box;
    pool_spec.seed = derive_seed(setup.seed, "flux_pool");
    const FpsResult fps = fps_select(sample_pulses(pool_spec, setup.pool), setup.fluxes);

    EnsembleSpec held_out = box;
    held_out.seed = setup.device_seed;
    const auto devices = sample_ensemble(held_out, setup.devices);

    OracleAdaptationOutcome out;
    for (const auto& p : sel.pairs) out.pair_labels.push_back(p.label());
    AdaptConfig cfg;
    cfg.seed = derive_seed(setup.seed, "adapt");
    cfg.workers = setup.workers;
    EnsembleSpec eval_box = box;
    eval_box.seed = derive_seed(setup.seed, "oracle_eval");
    for (std::size_t d = 0; d < devices.size(); ++d) {
        MeasurementTable table;
        if (setup.effective_measurements) {
            table.fluxes = fps.fluxes;
            table.pairs = sel.pairs;
            table.t = o.t;
            table.values = predict_expectations(oracle, devices[d], fps.fluxes, sel.pairs, o.t);
        } else {
            table = synthesize_measurements(o.qubits, devices[d], fps.fluxes, sel.pairs, o.frame, o.t);
        }
        const AdaptResult res = adapt(oracle, table, cfg);
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& phi : sample_pulses(eval_box, setup.points, d)) {
            try {
                const Vec5 diff =
                    oracle.coefficients(res.eta_pred, phi).to_vector() - oracle.coefficients(devices[d], phi).to_vector();
                total += diff.cwiseAbs().sum();
                count += kNumTerms;
            } catch (const DegenerateSelectionError&) {
            }
        }
        out.device_mae.push_back(count ? total / static_cast<double>(count) : INFINITY);
        out.device_seconds.push_back(res.wall_seconds);
        out.device_loss.push_back(res.best_loss);
        out.device_truth_loss.push_back(adaptation_loss(oracle, table, devices[d]));
    }
    for (double v : out.device_mae) out.mae += v / static_cast<double>(out.device_mae.size());
    return out;
}

CheckResult check_oracle_adaptation(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    CheckResult r{"oracle_adaptation", false, 0.0, 0.01, "", 0.0};
    OracleAdaptationSetup setup;
    setup.seed = o.seed;
    setup.workers = o.workers;
    const OracleAdaptationOutcome out = oracle_adaptation_trial(o, setup);
    r.value = out.mae;
    r.detail = fmt::format("coefficient MAE {:.4g} MHz over {} points, best loss {:.3e} (true parameters {:.3e}), "
                           "adaptation {:.1f} s",
                           out.mae, setup.points, out.device_loss.front(), out.device_truth_loss.front(),
                           out.device_seconds.front());
    return finish(r, start);
}

SelfcheckReport run_selfcheck(const SelfcheckOptions& o) {
    const auto start = Clock::now();
    SelfcheckReport rep;
    using Fn = CheckResult (*)(const SelfcheckOptions&);
    std::vector<Fn> checks = {check_phase_invariance,  check_spectrum_preservation, check_refinement_monotone,
                              check_contraction,       check_sweep_continuity,      check_network_gradient,
                              check_adaptation_gradient, check_dispersive_agreement};
    if (o.include_oracle_adaptation) checks.push_back(check_oracle_adaptation);
    for (Fn fn : checks) {
        rep.checks.push_back(fn(o));
        if (o.on_result) o.on_result(rep.checks.back());
    }
    rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rep;
}

}  // namespace effham
