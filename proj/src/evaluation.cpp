#include "effham/evaluation.hpp"

#include "effham/physics.hpp"
#include "effham/random.hpp"
#include "effham/reduction.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace effham {

namespace {

struct TruthPoint {
    bool ok = false;
    CoefficientVector c_true;
    Mat4 u_proj;
};

TruthPoint truth_at(const DeviceParams& eta, const ControlFlux& phi, const EvaluationContext& ctx) {
    TruthPoint tp;
    try {
        const ReductionResult red = reduce(ctx.qubits, eta, phi, ctx.frame, ctx.t, ctx.reduction);
        tp.c_true = red.c_true;
        tp.u_proj = red.u_proj;
        tp.ok = true;
    } catch (const Error&) {
    }
    return tp;
}

void require_same_size(const std::vector<DeviceParams>& a, const std::vector<DeviceParams>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument(fmt::format("{} adapted parameter vectors for {} devices", a.size(), b.size()));
}

}  // namespace

TermErrors term_errors(const std::vector<CoefficientVector>& truth, const std::vector<CoefficientVector>& pred,
                       const std::array<double, kNumTerms>& dynamic_range) {
    if (truth.size() != pred.size()) throw std::invalid_argument("term_errors: size mismatch");
    TermErrors e;
    if (truth.empty()) return e;
    for (std::size_t i = 0; i < truth.size(); ++i)
        for (std::size_t k = 0; k < kNumTerms; ++k) e.mae[k] += std::abs(pred[i][k] - truth[i][k]);
    for (std::size_t k = 0; k < kNumTerms; ++k) {
        e.mae[k] /= static_cast<double>(truth.size());
        e.relative_pct[k] = dynamic_range[k] > 0.0 ? 100.0 * e.mae[k] / dynamic_range[k] : 0.0;
        e.mae_all += e.mae[k] / kNumTerms;
        e.relative_all_pct += e.relative_pct[k] / kNumTerms;
    }
    return e;
}

CoefficientErrorReport coefficient_error_report(const CoefficientMap& model, const std::vector<DeviceParams>& eta_pred,
                                                const std::vector<DeviceParams>& eta_true, std::size_t n_points,
                                                const EnsembleSpec& flux_box, std::uint64_t seed,
                                                const EvaluationContext& ctx) {
    require_same_size(eta_pred, eta_true);
    CoefficientErrorReport rep;
    EnsembleSpec box = flux_box;
    box.seed = derive_seed(seed, "evaluation_points");
    for (std::size_t d = 0; d < eta_true.size(); ++d) {
        for (const ControlFlux& phi : sample_pulses(box, n_points, d)) {
            const TruthPoint tp = truth_at(eta_true[d], phi, ctx);
            if (!tp.ok) {
                ++rep.skipped;
                continue;
            }
            CoefficientPoint pt;
            try {
                pt.swpt = swpt_coefficients(ctx.qubits, eta_true[d], phi, ctx.frame);
            } catch (const ResonanceError&) {
                ++rep.skipped;
                continue;
            }
            pt.device = d;
            pt.phi = phi;
            pt.truth = tp.c_true;
            pt.model = model.coefficients(eta_pred[d], phi);
            rep.points.push_back(pt);
        }
    }
    std::vector<CoefficientVector> truth, pred, swpt;
    for (const auto& p : rep.points) {
        truth.push_back(p.truth);
        pred.push_back(p.model);
        swpt.push_back(p.swpt);
    }
    for (std::size_t k = 0; k < kNumTerms; ++k) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& c : truth) {
            lo = std::min(lo, c[k]);
            hi = std::max(hi, c[k]);
        }
        rep.dynamic_range[k] = truth.empty() ? 0.0 : hi - lo;
    }
    rep.model = term_errors(truth, pred, rep.dynamic_range);
    rep.swpt = term_errors(truth, swpt, rep.dynamic_range);
    return rep;
}

std::vector<ControlFlux> coupler_grid(const EnsembleSpec& flux_box, std::size_t grid_points, double phi_q1,
                                      double phi_q2) {
    std::vector<ControlFlux> grid;
    const Interval& iv = flux_box.flux[2];
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double s = grid_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid_points - 1);
        grid.push_back({phi_q1, phi_q2, iv.lower + s * iv.width()});
    }
    return grid;
}

InfidelityReport infidelity_report(const CoefficientMap& model, const std::vector<DeviceParams>& eta_pred,
                                   const std::vector<DeviceParams>& eta_true, const std::vector<ControlFlux>& grid,
                                   const EvaluationContext& ctx) {
    require_same_size(eta_pred, eta_true);
    InfidelityReport rep;
    double total_model = 0.0, total_swpt = 0.0;
    std::size_t total = 0;
    for (std::size_t d = 0; d < eta_true.size(); ++d) {
        double dev_model = 0.0, dev_swpt = 0.0;
        std::size_t count = 0;
        for (const ControlFlux& phi : grid) {
            const TruthPoint tp = truth_at(eta_true[d], phi, ctx);
            CoefficientVector c_swpt;
            try {
                c_swpt = swpt_coefficients(ctx.qubits, eta_true[d], phi, ctx.frame);
            } catch (const ResonanceError&) {
                ++rep.skipped;
                continue;
            }
            if (!tp.ok) {
                ++rep.skipped;
                continue;
            }
            InfidelityPoint pt;
            pt.device = d;
            pt.phi = phi;
            pt.g_eff = 2.0 * tp.c_true[Term::XX];
            pt.floor = 1.0 - process_fidelity(tp.c_true, tp.u_proj, ctx.t);
            pt.model = 1.0 - process_fidelity(model.coefficients(eta_pred[d], phi), tp.u_proj, ctx.t);
            pt.swpt = 1.0 - process_fidelity(c_swpt, tp.u_proj, ctx.t);
            const double excess_model = pt.model - pt.floor;
            const double excess_swpt = pt.swpt - pt.floor;
            if (excess_model >= kRatioGuard) pt.ratio = excess_swpt / excess_model;
            dev_model += excess_model;
            dev_swpt += excess_swpt;
            ++count;
            rep.points.push_back(pt);
        }
        rep.device_excess_model.push_back(count ? dev_model / static_cast<double>(count) : 0.0);
        rep.device_excess_swpt.push_back(count ? dev_swpt / static_cast<double>(count) : 0.0);
        total_model += dev_model;
        total_swpt += dev_swpt;
        total += count;
    }
    if (total) {
        rep.mean_excess_model = total_model / static_cast<double>(total);
        rep.mean_excess_swpt = total_swpt / static_cast<double>(total);
    }
    return rep;
}

SweepCurves flux_sweep(const CoefficientMap& model, const DeviceParams& eta_pred, const DeviceParams& eta_true,
                       const std::vector<ControlFlux>& grid, const EvaluationContext& ctx) {
    SweepCurves s;
    for (const ControlFlux& phi : grid) {
        const TruthPoint tp = truth_at(eta_true, phi, ctx);
        s.phi_c1.push_back(phi.phi_c1);
        s.truth.push_back(tp.c_true);
        s.model.push_back(model.coefficients(eta_pred, phi));
        CoefficientVector sw;
        bool ok = tp.ok;
        try {
            sw = swpt_coefficients(ctx.qubits, eta_true, phi, ctx.frame);
        } catch (const ResonanceError&) {
            for (auto& v : sw.values) v = NAN;
        }
        s.swpt.push_back(sw);
        s.valid.push_back(ok);
    }
    return s;
}

double max_adjacent_jump(const std::vector<CoefficientVector>& curve, const std::vector<bool>& valid) {
    double jump = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (!valid.empty() && (!valid[i] || !valid[i - 1])) continue;
        for (std::size_t k = 0; k < kNumTerms; ++k) jump = std::max(jump, std::abs(curve[i][k] - curve[i - 1][k]));
    }
    return jump;
}

std::vector<HybridizationEntry> hybridization_survey(const QubitConstants& q, const std::vector<DeviceParams>& devices,
                                                     const ControlFlux& phi) {
    std::vector<HybridizationEntry> out;
    for (std::size_t d = 0; d < devices.size(); ++d) out.push_back({d, hybridization_ratios(q, devices[d], phi)});
    return out;
}

}  // namespace effham
