#include "effham/cli.hpp"

#include "effham/adaptation.hpp"
#include "effham/coefficient_map.hpp"
#include "effham/config.hpp"
#include "effham/dataset.hpp"
#include "effham/design.hpp"
#include "effham/evaluation.hpp"
#include "effham/io.hpp"
#include "effham/random.hpp"
#include "effham/selfcheck.hpp"
#include "effham/serialize.hpp"
#include "effham/surrogate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <sstream>

#ifndef EFFHAM_VERSION
#define EFFHAM_VERSION "0.0.0"
#endif

namespace effham {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string results_dir;
    std::vector<std::string> overrides;
    int workers = 0;
    bool quiet = false;
};

struct Context {
    RunConfig cfg;
    std::string hash;
    bool quiet = false;

    template <typename... Args>
    void log(fmt::format_string<Args...> f, Args&&... args) const {
        if (!quiet) fmt::print(stderr, "[effham] {}\n", fmt::format(f, std::forward<Args>(args)...));
    }
    fs::path path(const std::string& p) const { return cfg.resolve(p); }
};

Context make_context(const CommonOptions& o) {
    json doc = json::object();
    if (!o.config_path.empty()) {
        if (!fs::exists(o.config_path)) throw ConfigError(fmt::format("config file '{}' not found", o.config_path));
        doc = yaml_file_to_json(o.config_path);
        if (doc.is_null()) doc = json::object();
    }
    const bool file_sets_results = doc.contains("paths") && doc["paths"].contains("results_dir");
    if (!file_sets_results)
        if (const char* env = std::getenv("EFFHAM_RESULTS_DIR"); env && *env) doc["paths"]["results_dir"] = env;
    for (const auto& a : o.overrides) apply_override(doc, a);
    if (!o.results_dir.empty()) doc["paths"]["results_dir"] = o.results_dir;
    Context ctx;
    ctx.cfg = run_config_from_json(doc);
    if (o.workers > 0) {
        ctx.cfg.data.workers = o.workers;
        ctx.cfg.adapt.workers = o.workers;
    }
    ctx.hash = config_hash(ctx.cfg);
    ctx.quiet = o.quiet;
    return ctx;
}

void require_file(const fs::path& p, std::string_view what, std::string_view producer) {
    if (!fs::exists(p))
        throw ConfigError(fmt::format("{} '{}' not found (run `effham {}` first)", what, p.string(), producer));
}

std::vector<DeviceParams> held_out_devices(const RunConfig& cfg) {
    EnsembleSpec spec = cfg.ensemble;
    spec.seed = cfg.evaluation.held_out_seed;
    return sample_ensemble(spec, cfg.evaluation.held_out_devices);
}

EvaluationContext evaluation_context(const RunConfig& cfg) {
    EvaluationContext e;
    e.qubits = cfg.qubits;
    e.frame = cfg.frame;
    e.t = cfg.data.t;
    return e;
}

Vec5 bound_widths(const RunConfig& cfg) {
    Vec5 w;
    for (std::size_t k = 0; k < DeviceParams::kSize; ++k) {
        const double width = cfg.adapt.bounds[k].width();
        w(static_cast<Eigen::Index>(k)) = width > 0.0 ? width : std::max(1e-3, std::abs(cfg.adapt.bounds[k].lower));
    }
    return w;
}

SurrogateModel load_model(const Context& ctx) {
    const fs::path p = ctx.path(ctx.cfg.paths.checkpoint);
    require_file(p, "checkpoint", "train");
    SurrogateModel m = load_checkpoint(p);
    check_compatible(m, ctx.cfg.frame, ctx.cfg.data.t, ctx.cfg.qubits);
    return m;
}

// Holds whichever coefficient map a subcommand asked for.
struct MapHolder {
    std::unique_ptr<SurrogateModel> model;
    std::unique_ptr<CoefficientMap> map;
};

MapHolder make_map(const Context& ctx, const std::string& kind) {
    MapHolder h;
    if (kind == "oracle") {
        h.map = std::make_unique<OracleMap>(ctx.cfg.qubits, ctx.cfg.frame, ctx.cfg.data.t, bound_widths(ctx.cfg));
    } else if (kind == "surrogate") {
        h.model = std::make_unique<SurrogateModel>(load_model(ctx));
        h.map = std::make_unique<SurrogateMap>(*h.model);
    } else {
        throw ConfigError(fmt::format("unknown coefficient map '{}' (expected surrogate or oracle)", kind));
    }
    return h;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

// ---------------------------------------------------------------- gen-data

int cmd_gen_data(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    ctx.log("gen-data: {} devices x {} pulses, ensemble seed {}, frame omega0 {} GHz", c.data.devices,
            c.data.pulses_per_device, c.ensemble.seed, c.frame.omega0);
    const auto devices = sample_ensemble(c.ensemble, c.data.devices);
    GenerateOptions opt;
    opt.spec = c.ensemble;
    opt.t = c.data.t;
    opt.reduction.snapshots = c.data.snapshots;
    opt.workers = c.data.workers;
    Dataset data = generate_dataset(c.qubits, devices, c.data.pulses_per_device, c.frame, opt);
    data.config_hash = ctx.hash;
    const fs::path out = ctx.path(c.paths.dataset);
    persist_dataset(data, out);
    ctx.log("wrote {} records ({} excluded) to {}", data.records.size(), data.records.size() - data.usable().size(),
            out.string());
    return kExitOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const fs::path dpath = ctx.path(c.paths.dataset);
    require_file(dpath, "dataset", "gen-data");
    const std::string text = read_text(dpath);
    const Dataset data = dataset_from_string(text);
    if (!(data.frame == c.frame)) throw MetadataMismatchError("dataset frame differs from the configured frame");
    if (data.t != c.data.t) throw MetadataMismatchError("dataset evolution time differs from the configured time");
    const auto usable = data.usable();
    ctx.log("train: {} usable records, init seed {}, max epochs {}", usable.size(), c.train.init_seed,
            c.train.train.max_epochs);

    SurrogateModel m = init_model(c.train.init_seed);
    m.meta.frame = c.frame;
    m.meta.qubits = c.qubits;
    m.meta.bounds = data.spec;
    m.meta.t = c.data.t;
    m.meta.dataset_hash = hex64(fnv1a64(text));
    m.meta.config_hash = ctx.hash;
    TrainConfig tc = c.train.train;
    tc.progress_every = 1000;
    tc.progress = [&](int epoch, double loss, double lr) { ctx.log("epoch {:>7}  loss {:.6e}  lr {:.2e}", epoch, loss, lr); };
    const TrainResult res = train(m, usable, tc);
    save_checkpoint(res.model, ctx.path(c.paths.checkpoint));

    std::string csv = csv_preamble("training_history", ctx.hash) + "epoch,loss,learning_rate\n";
    for (std::size_t i = 0; i < res.loss_history.size(); ++i)
        csv += fmt::format("{},{},{}\n", i + 1, fmt_double(res.loss_history[i]), fmt_double(res.lr_history[i]));
    atomic_write(ctx.path("training_history.csv"), csv);
    ctx.log("best loss {:.6e} MHz^2 at epoch {} of {} ({})", res.best_loss, res.best_epoch, res.epochs_run,
            res.stop_reason);
    return kExitOk;
}

// ---------------------------------------------------------------- select

int cmd_select(const Context& ctx, const std::string& map_kind) {
    const RunConfig& c = ctx.cfg;
    const MapHolder h = make_map(ctx, map_kind);
    ctx.log("select: {} draws, {} pairs, {} fluxes from a pool of {}, seed {}", c.design.draws, c.design.pairs,
            c.design.fluxes, c.design.pool, c.design.seed);
    const SignalMatrix sig =
        informativeness_signals(*h.map, c.ensemble, c.design.draws, c.data.t, c.design.seed, c.data.workers);
    const SelectionResult sel = greedy_select(sig, c.design.pairs);
    EnsembleSpec pool_spec = c.ensemble;
    pool_spec.seed = derive_seed(c.design.seed, "flux_pool");
    const FpsResult fps = fps_select(sample_pulses(pool_spec, c.design.pool), c.design.fluxes);

    json j = artifact_header("effham.selection", ctx.hash);
    j["map"] = map_kind;
    j["pairs"] = sel.pairs;
    j["raw"] = sel.raw;
    j["marginal"] = sel.marginal;
    j["candidate_indices"] = sel.indices;
    j["fluxes"] = fps.fluxes;
    j["pool_indices"] = fps.indices;
    j["t"] = c.data.t;

    const Eigen::VectorXd var = sig.variances();
    std::string heat = csv_preamble("informativeness", ctx.hash) + "state_q1,state_q2,observable,variance\n";
    for (std::size_t i = 0; i < sig.columns.size(); ++i) {
        const auto& p = sig.columns[i];
        heat += fmt::format("{},{},{},{}\n", to_string(p.state_q1), to_string(p.state_q2), p.observable_string(),
                            fmt_double(var(static_cast<Eigen::Index>(i))));
    }
    std::string greedy = csv_preamble("greedy_trajectory", ctx.hash) + "rank,pair,raw,marginal\n";
    for (std::size_t i = 0; i < sel.pairs.size(); ++i)
        greedy += fmt::format("{},\"{}\",{},{}\n", i + 1, sel.pairs[i].label(), fmt_double(sel.raw[i]),
                              fmt_double(sel.marginal[i]));
    std::string flux = csv_preamble("fps_fluxes", ctx.hash) + "rank,phi_q1,phi_q2,phi_c1,min_distance\n";
    for (std::size_t i = 0; i < fps.fluxes.size(); ++i)
        flux += fmt::format("{},{},{},{},{}\n", i + 1, fmt_double(fps.fluxes[i].phi_q1), fmt_double(fps.fluxes[i].phi_q2),
                            fmt_double(fps.fluxes[i].phi_c1), fmt_double(fps.min_distance[i]));

    atomic_write(ctx.path(c.paths.selection), j.dump(2) + "\n");
    atomic_write(ctx.path("informativeness.csv"), heat);
    atomic_write(ctx.path("greedy_trajectory.csv"), greedy);
    atomic_write(ctx.path("fps_fluxes.csv"), flux);
    for (std::size_t i = 0; i < sel.pairs.size(); ++i)
        ctx.log("pick {}: {}  raw {:.4e}  marginal {:.4e}", i + 1, sel.pairs[i].label(), sel.raw[i], sel.marginal[i]);
    return kExitOk;
}

struct Selection {
    std::vector<MeasurementPair> pairs;
    std::vector<ControlFlux> fluxes;
};

Selection load_selection(const Context& ctx) {
    const fs::path p = ctx.path(ctx.cfg.paths.selection);
    require_file(p, "selection", "select");
    Selection s;
    try {
        const json j = json::parse(read_text(p));
        check_artifact_header(j, "effham.selection");
        j.at("pairs").get_to(s.pairs);
        j.at("fluxes").get_to(s.fluxes);
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("selection parse error: {}", e.what()));
    }
    return s;
}

// ---------------------------------------------------------------- adapt

int cmd_adapt(const Context& ctx, const std::string& map_kind) {
    const RunConfig& c = ctx.cfg;
    const MapHolder h = make_map(ctx, map_kind);
    const Selection sel = load_selection(ctx);
    const auto devices = held_out_devices(c);
    ctx.log("adapt: {} held-out devices (seed {}), {} x {} = {} expectations each, {} restarts, map {}", devices.size(),
            c.evaluation.held_out_seed, sel.fluxes.size(), sel.pairs.size(), sel.fluxes.size() * sel.pairs.size(),
            c.adapt.restarts, map_kind);

    json j = artifact_header("effham.adaptation", ctx.hash);
    j["map"] = map_kind;
    j["measurements_per_device"] = sel.fluxes.size() * sel.pairs.size();
    j["devices"] = json::array();
    // Wall times go to a separate file so adaptation.json stays reproducible.
    std::string timing = csv_preamble("adaptation_timing", ctx.hash) + "device,wall_seconds\n";
    for (std::size_t d = 0; d < devices.size(); ++d) {
        const MeasurementTable table =
            synthesize_measurements(c.qubits, devices[d], sel.fluxes, sel.pairs, c.frame, c.data.t);
        AdaptConfig ac = c.adapt;
        ac.seed = derive_seed(c.adapt.seed, "device", d);
        const AdaptResult res = adapt(*h.map, table, ac);
        json restarts = json::array();
        for (const auto& r : res.restarts)
            restarts.push_back({{"eta_init", r.eta_init},
                                {"eta_final", r.eta_final},
                                {"initial_loss", r.initial_loss},
                                {"final_loss", r.final_loss},
                                {"iterations", r.iterations},
                                {"evaluations", r.evaluations},
                                {"status", r.status},
                                {"trace", r.trace}});
        j["devices"].push_back({{"device", d},
                                {"eta_true", devices[d]},
                                {"eta_pred", res.eta_pred},
                                {"best_loss", res.best_loss},
                                {"best_restart", res.best_restart},
                                {"restarts", restarts}});
        timing += fmt::format("{},{:.3f}\n", d, res.wall_seconds);
        ctx.log("device {}: loss {:.3e} (restart {}), {:.2f} s", d, res.best_loss, res.best_restart, res.wall_seconds);
    }
    atomic_write(ctx.path(c.paths.adaptation), j.dump(2) + "\n");
    atomic_write(ctx.path("adaptation_timing.csv"), timing);
    return kExitOk;
}

struct Adapted {
    std::string map;
    std::vector<DeviceParams> eta_true;
    std::vector<DeviceParams> eta_pred;
};

Adapted load_adaptation(const Context& ctx) {
    const fs::path p = ctx.path(ctx.cfg.paths.adaptation);
    require_file(p, "adaptation results", "adapt");
    Adapted a;
    try {
        const json j = json::parse(read_text(p));
        check_artifact_header(j, "effham.adaptation");
        j.at("map").get_to(a.map);
        for (const auto& d : j.at("devices")) {
            a.eta_true.push_back(d.at("eta_true").get<DeviceParams>());
            a.eta_pred.push_back(d.at("eta_pred").get<DeviceParams>());
        }
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("adaptation parse error: {}", e.what()));
    }
    return a;
}

// ---------------------------------------------------------------- swpt-baseline

int cmd_swpt_baseline(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const auto devices = held_out_devices(c);
    // SWPT only: the "model" column repeats SWPT so the report machinery can be shared.
    const EvaluationContext ectx = evaluation_context(c);
    struct SwptMap final : CoefficientMap {
        const EvaluationContext& e;
        explicit SwptMap(const EvaluationContext& ec) : e(ec) {}
        CoefficientVector coefficients(const DeviceParams& eta, const ControlFlux& phi) const override {
            return swpt_coefficients(e.qubits, eta, phi, e.frame);
        }
        CoefficientVector coefficients_with_jacobian(const DeviceParams&, const ControlFlux&, Mat5&) const override {
            throw Error("SWPT map has no Jacobian");
        }
    } swpt_map(ectx);
    const auto rep =
        coefficient_error_report(swpt_map, devices, devices, c.evaluation.points, c.ensemble, c.evaluation.seed, ectx);
    std::string csv = csv_preamble("swpt_baseline", ctx.hash) +
                      "device,phi_q1,phi_q2,phi_c1,term,truth,swpt\n";
    for (const auto& p : rep.points)
        for (std::size_t k = 0; k < kNumTerms; ++k)
            csv += fmt::format("{},{},{},{},{},{},{}\n", p.device, fmt_double(p.phi.phi_q1), fmt_double(p.phi.phi_q2),
                               fmt_double(p.phi.phi_c1), kTermNames[k], fmt_double(p.truth[k]), fmt_double(p.swpt[k]));
    std::string table = csv_preamble("swpt_table", ctx.hash) + "term,mae_mhz,relative_pct\n";
    for (std::size_t k = 0; k < kNumTerms; ++k)
        table += fmt::format("{},{},{}\n", kTermNames[k], fmt_double(rep.swpt.mae[k]), fmt_double(rep.swpt.relative_pct[k]));
    table += fmt::format("All,{},{}\n", fmt_double(rep.swpt.mae_all), fmt_double(rep.swpt.relative_all_pct));
    atomic_write(ctx.path("swpt_baseline.csv"), csv);
    atomic_write(ctx.path("swpt_table.csv"), table);
    ctx.log("SWPT all-terms MAE {:.4f} MHz over {} points ({} skipped)", rep.swpt.mae_all, rep.points.size(),
            rep.skipped);
    return kExitOk;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const MapHolder h = make_map(ctx, "surrogate");
    const Adapted a = load_adaptation(ctx);
    MapHolder oracle;
    const CoefficientMap* map = h.map.get();
    if (a.map == "oracle") {
        oracle = make_map(ctx, "oracle");
        map = oracle.map.get();
    }
    const EvaluationContext ectx = evaluation_context(c);
    ctx.log("evaluate: {} devices, {} points each, {}-point sweep, map {}", a.eta_true.size(), c.evaluation.points,
            c.evaluation.sweep_points, a.map);
    const auto rep =
        coefficient_error_report(*map, a.eta_pred, a.eta_true, c.evaluation.points, c.ensemble, c.evaluation.seed, ectx);
    const auto grid = coupler_grid(c.ensemble, c.evaluation.sweep_points);
    const auto inf = infidelity_report(*map, a.eta_pred, a.eta_true, grid, ectx);
    const auto hyb = hybridization_survey(c.qubits, a.eta_true, c.evaluation.hybridization_flux);

    std::string table = csv_preamble("coefficient_errors", ctx.hash) +
                        "term,model_mae_mhz,model_relative_pct,swpt_mae_mhz,swpt_relative_pct,dynamic_range_mhz\n";
    for (std::size_t k = 0; k < kNumTerms; ++k)
        table += fmt::format("{},{},{},{},{},{}\n", kTermNames[k], fmt_double(rep.model.mae[k]),
                             fmt_double(rep.model.relative_pct[k]), fmt_double(rep.swpt.mae[k]),
                             fmt_double(rep.swpt.relative_pct[k]), fmt_double(rep.dynamic_range[k]));
    table += fmt::format("All,{},{},{},{},\n", fmt_double(rep.model.mae_all), fmt_double(rep.model.relative_all_pct),
                         fmt_double(rep.swpt.mae_all), fmt_double(rep.swpt.relative_all_pct));

    std::string scatter = csv_preamble("coefficient_scatter", ctx.hash) +
                          "device,phi_q1,phi_q2,phi_c1,term,truth,model,swpt\n";
    for (const auto& p : rep.points)
        for (std::size_t k = 0; k < kNumTerms; ++k)
            scatter += fmt::format("{},{},{},{},{},{},{},{}\n", p.device, fmt_double(p.phi.phi_q1),
                                   fmt_double(p.phi.phi_q2), fmt_double(p.phi.phi_c1), kTermNames[k],
                                   fmt_double(p.truth[k]), fmt_double(p.model[k]), fmt_double(p.swpt[k]));

    std::string hyb_csv = csv_preamble("hybridization", ctx.hash) + "device,ratio_q1,ratio_q2,max_ratio\n";
    for (const auto& e : hyb)
        hyb_csv += fmt::format("{},{},{},{}\n", e.device, fmt_double(e.ratios.ratio_q1), fmt_double(e.ratios.ratio_q2),
                               fmt_double(e.ratios.max()));

    std::string inf_csv = csv_preamble("excess_infidelity", ctx.hash) +
                          "device,phi_c1,g_eff_mhz,i_floor,i_model,i_swpt,ratio\n";
    for (const auto& p : inf.points)
        inf_csv += fmt::format("{},{},{},{},{},{},{}\n", p.device, fmt_double(p.phi.phi_c1), fmt_double(p.g_eff),
                               fmt_double(p.floor), fmt_double(p.model), fmt_double(p.swpt),
                               p.ratio ? fmt_double(*p.ratio) : std::string());

    json summary = artifact_header("effham.evaluation", ctx.hash);
    summary["map"] = a.map;
    summary["devices"] = a.eta_true.size();
    summary["points_per_device"] = c.evaluation.points;
    summary["points_skipped"] = rep.skipped;
    summary["model_mae_all_mhz"] = rep.model.mae_all;
    summary["swpt_mae_all_mhz"] = rep.swpt.mae_all;
    summary["model_zz_relative_pct"] = rep.model.relative_pct[4];
    summary["swpt_zz_relative_pct"] = rep.swpt.relative_pct[4];
    summary["mean_excess_infidelity_model"] = inf.mean_excess_model;
    summary["mean_excess_infidelity_swpt"] = inf.mean_excess_swpt;
    summary["device_excess_infidelity_model"] = inf.device_excess_model;
    summary["device_excess_infidelity_swpt"] = inf.device_excess_swpt;
    std::vector<double> ratios;
    for (const auto& e : hyb) ratios.push_back(e.ratios.max());
    summary["hybridization_max_ratio"] = ratios;

    // Everything is computed before the first write.
    atomic_write(ctx.path("coefficient_errors.csv"), table);
    atomic_write(ctx.path("coefficient_scatter.csv"), scatter);
    atomic_write(ctx.path("hybridization.csv"), hyb_csv);
    atomic_write(ctx.path("excess_infidelity.csv"), inf_csv);
    atomic_write(ctx.path("evaluation_summary.json"), summary.dump(2) + "\n");
    ctx.log("all-terms MAE: model {:.4f} MHz, SWPT {:.4f} MHz", rep.model.mae_all, rep.swpt.mae_all);
    ctx.log("ZZ relative error: model {:.3f}%, SWPT {:.3f}%", rep.model.relative_pct[4], rep.swpt.relative_pct[4]);
    ctx.log("mean excess infidelity: model {:.3e}, SWPT {:.3e}", inf.mean_excess_model, inf.mean_excess_swpt);
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const MapHolder h = make_map(ctx, "surrogate");
    const Adapted a = load_adaptation(ctx);
    const EvaluationContext ectx = evaluation_context(c);
    const auto grid = coupler_grid(c.ensemble, c.evaluation.sweep_points);
    std::vector<std::pair<fs::path, std::string>> files;
    for (std::size_t d = 0; d < a.eta_true.size(); ++d) {
        const SweepCurves s = flux_sweep(*h.map, a.eta_pred[d], a.eta_true[d], grid, ectx);
        std::string csv = csv_preamble("flux_sweep", ctx.hash) + "phi_c1,term,truth,model,swpt,valid\n";
        for (std::size_t i = 0; i < s.phi_c1.size(); ++i)
            for (std::size_t k = 0; k < kNumTerms; ++k)
                csv += fmt::format("{},{},{},{},{},{}\n", fmt_double(s.phi_c1[i]), kTermNames[k],
                                   fmt_double(s.truth[i][k]), fmt_double(s.model[i][k]), fmt_double(s.swpt[i][k]),
                                   s.valid[i] ? 1 : 0);
        files.emplace_back(ctx.path(fmt::format("sweep_device{:02}.csv", d)), std::move(csv));
        ctx.log("device {}: max adjacent jump of the truth {:.3f} MHz", d, max_adjacent_jump(s.truth, s.valid));
    }
    for (const auto& [p, text] : files) atomic_write(p, text);
    return kExitOk;
}

// ---------------------------------------------------------------- selfcheck

int cmd_selfcheck(const Context& ctx, std::uint64_t seed, bool skip_oracle) {
    SelfcheckOptions o;
    o.seed = seed;
    o.qubits = ctx.cfg.qubits;
    o.frame = ctx.cfg.frame;
    o.t = ctx.cfg.data.t;
    o.include_oracle_adaptation = !skip_oracle;
    o.workers = ctx.cfg.adapt.workers;
    o.on_result = [&](const CheckResult& r) {
        fmt::print("{} {:<24} value={:.3e} threshold={:.1e} ({:.2f} s)  {}\n", r.passed ? "PASS" : "FAIL", r.name,
                   r.value, r.threshold, r.seconds, r.detail);
        std::fflush(stdout);
    };
    const SelfcheckReport rep = run_selfcheck(o);
    json j = artifact_header("effham.selfcheck", ctx.hash);
    j["seed"] = seed;
    j["seconds"] = rep.seconds;
    j["checks"] = json::array();
    for (const auto& r : rep.checks)
        j["checks"].push_back({{"name", r.name},
                               {"passed", r.passed},
                               {"value", r.value},
                               {"threshold", r.threshold},
                               {"detail", r.detail},
                               {"seconds", r.seconds}});
    atomic_write(ctx.path("selfcheck.json"), j.dump(2) + "\n");
    fmt::print("selfcheck {} in {:.1f} s\n", rep.passed() ? "passed" : "FAILED", rep.seconds);
    return rep.passed() ? kExitOk : kExitSelfcheck;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"Effective two-qubit Hamiltonians from a flux-tunable transmon-coupler-transmon model", "effham"};
    app.set_version_flag("--version", EFFHAM_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    CommonOptions common;
    app.add_option("-c,--config", common.config_path, "YAML run configuration");
    app.add_option("-o,--results-dir", common.results_dir, "Results directory (default: $EFFHAM_RESULTS_DIR or results)");
    app.add_option("-s,--set", common.overrides, "Override a setting, e.g. --set train.max_epochs=5000");
    app.add_option("-j,--workers", common.workers, "Worker threads for data generation and adaptation");
    app.add_flag("-q,--quiet", common.quiet, "Suppress progress logging");

    std::string map_kind = "surrogate";
    std::uint64_t selfcheck_seed = 11;
    bool skip_oracle = false;
    auto* gen = app.add_subcommand("gen-data", "Sample devices and pulses and write the supervised dataset");
    auto* trn = app.add_subcommand("train", "Train the surrogate on the dataset");
    auto* sel = app.add_subcommand("select", "Choose measurement pairs and adaptation fluxes");
    sel->add_option("--map", map_kind, "surrogate or oracle")->check(CLI::IsMember({"surrogate", "oracle"}));
    auto* adp = app.add_subcommand("adapt", "Adapt eta for every held-out device");
    adp->add_option("--map", map_kind, "surrogate or oracle")->check(CLI::IsMember({"surrogate", "oracle"}));
    auto* swp = app.add_subcommand("swpt-baseline", "Second-order Schrieffer-Wolff errors on the held-out devices");
    auto* evl = app.add_subcommand("evaluate", "Coefficient errors, excess infidelity and hybridization report");
    auto* swe = app.add_subcommand("sweep", "Coefficient curves along the coupler flux");
    auto* chk = app.add_subcommand("selfcheck", "Run the invariant suite");
    chk->add_option("--seed", selfcheck_seed, "Seed for the random operating points");
    chk->add_flag("--skip-oracle", skip_oracle, "Skip the oracle adaptation check");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const Context ctx = make_context(common);
        ctx.log("effham {} config_hash {} results_dir {}", EFFHAM_VERSION, ctx.hash, ctx.cfg.paths.results_dir);
        if (*gen) return cmd_gen_data(ctx);
        if (*trn) return cmd_train(ctx);
        if (*sel) return cmd_select(ctx, map_kind);
        if (*adp) return cmd_adapt(ctx, map_kind);
        if (*swp) return cmd_swpt_baseline(ctx);
        if (*evl) return cmd_evaluate(ctx);
        if (*swe) return cmd_sweep(ctx);
        if (*chk) return cmd_selfcheck(ctx, selfcheck_seed, skip_oracle);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "effham: configuration error: {}\n", e.what());
        return kExitUsage;
    } catch (const SchemaError& e) {
        fmt::print(stderr, "effham: schema error: {}\n", e.what());
        return kExitUsage;
    } catch (const MetadataMismatchError& e) {
        fmt::print(stderr, "effham: metadata mismatch: {}\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        fmt::print(stderr, "effham: pipeline failure: {}\n", e.what());
        return kExitPipeline;
    }
    return kExitUsage;
}

int run_command(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args);
}

}  // namespace effham
