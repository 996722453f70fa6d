#include "effham/surrogate.hpp"

#include "effham/io.hpp"
#include "effham/random.hpp"
#include "effham/serialize.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace effham {

using nlohmann::json;

namespace {

constexpr std::string_view kCheckpointKind = "effham.checkpoint";

struct Offsets {
    std::array<Eigen::Index, kNumLayers> weight{};
    std::array<Eigen::Index, kNumLayers> bias{};
    Eigen::Index total = 0;
};

const Offsets& offsets() {
    static const Offsets o = [] {
        Offsets r;
        Eigen::Index at = 0;
        for (int l = 0; l < kNumLayers; ++l) {
            r.weight[static_cast<std::size_t>(l)] = at;
            at += kLayerSizes[static_cast<std::size_t>(l)] * kLayerSizes[static_cast<std::size_t>(l) + 1];
            r.bias[static_cast<std::size_t>(l)] = at;
            at += kLayerSizes[static_cast<std::size_t>(l) + 1];
        }
        r.total = at;
        return r;
    }();
    return o;
}

int rows(int l) { return kLayerSizes[static_cast<std::size_t>(l) + 1]; }
int cols(int l) { return kLayerSizes[static_cast<std::size_t>(l)]; }

template <typename Derived>
Eigen::ArrayXXd sigmoid(const Eigen::ArrayBase<Derived>& z) {
    return 1.0 / (1.0 + (-z).exp());
}

// Buffers for one forward/backward pass over a batch.
struct Workspace {
    std::array<Eigen::MatrixXd, kNumLayers> z;
    std::array<Eigen::MatrixXd, kNumLayers - 1> a;
    std::array<Eigen::ArrayXXd, kNumLayers - 1> sig;
    Eigen::MatrixXd diff, delta, upstream;
};

Eigen::MatrixXd run(const SurrogateModel& m, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd h = x;
    for (int l = 0; l < kNumLayers; ++l) {
        Eigen::MatrixXd z = m.weight(l) * h;
        z.colwise() += m.bias(l);
        if (l == kNumLayers - 1) return m.output_scale * z;
        h = (z.array() * sigmoid(z.array())).matrix();
    }
    return h;
}

Eigen::MatrixXd normalize(const SurrogateModel& m, const Eigen::MatrixXd& raw) {
    return ((raw.colwise() - m.input_mean).array().colwise() / m.input_std.array()).matrix();
}

void records_to_matrices(const std::vector<const DatasetRecord*>& records, Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
    x.resize(kModelInputs, static_cast<Eigen::Index>(records.size()));
    y.resize(kModelOutputs, static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        x.col(col) = model_input(records[i]->eta, records[i]->phi);
        y.col(col) = records[i]->c_true.to_vector();
    }
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

Eigen::Index SurrogateModel::parameter_count() { return offsets().total; }
Eigen::Index SurrogateModel::weight_offset(int layer) { return offsets().weight[static_cast<std::size_t>(layer)]; }
Eigen::Index SurrogateModel::bias_offset(int layer) { return offsets().bias[static_cast<std::size_t>(layer)]; }

Eigen::Map<const Eigen::MatrixXd> SurrogateModel::weight(int layer) const {
    return {params.data() + weight_offset(layer), rows(layer), cols(layer)};
}
Eigen::Map<Eigen::MatrixXd> SurrogateModel::weight(int layer) {
    return {params.data() + weight_offset(layer), rows(layer), cols(layer)};
}
Eigen::Map<const Eigen::VectorXd> SurrogateModel::bias(int layer) const {
    return {params.data() + bias_offset(layer), rows(layer)};
}
Eigen::Map<Eigen::VectorXd> SurrogateModel::bias(int layer) { return {params.data() + bias_offset(layer), rows(layer)}; }

void SurrogateModel::validate() const {
    if (params.size() != parameter_count())
        throw SchemaError(fmt::format("model has {} parameters, expected {}", params.size(), parameter_count()));
    if (!params.allFinite()) throw SchemaError("model parameters are not finite");
    if (!(input_std.array() > 0.0).all() || !input_std.allFinite() || !input_mean.allFinite())
        throw SchemaError("input normalization must be finite with positive standard deviations");
    if (!std::isfinite(output_scale)) throw SchemaError("output scale must be finite");
}

InputVector model_input(const DeviceParams& eta, const ControlFlux& phi) {
    InputVector x;
    x << phi.phi_q1, phi.phi_q2, phi.phi_c1, eta.ej0_c1, eta.ec_c1, eta.ec_q1c1, eta.ec_q2c1, eta.ec_q1q2;
    return x;
}

SurrogateModel init_model(std::uint64_t seed) {
    SurrogateModel m;
    m.params.resize(SurrogateModel::parameter_count());
    Rng rng(derive_seed(seed, "init"));
    for (int l = 0; l < kNumLayers; ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols(l)));
        auto w = m.weight(l);
        for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.uniform(-bound, bound);
        auto b = m.bias(l);
        for (Eigen::Index k = 0; k < b.size(); ++k) b(k) = rng.uniform(-bound, bound);
    }
    m.meta.init_seed = seed;
    return m;
}

void fit_normalization(SurrogateModel& m, const std::vector<const DatasetRecord*>& records) {
    if (records.empty()) throw std::invalid_argument("fit_normalization: no records");
    Eigen::MatrixXd x, y;
    records_to_matrices(records, x, y);
    m.input_mean = x.rowwise().mean();
    const Eigen::MatrixXd centered = x.colwise() - m.input_mean;
    for (int k = 0; k < kModelInputs; ++k) {
        const double sd = std::sqrt(centered.row(k).squaredNorm() / static_cast<double>(x.cols()));
        m.input_std(k) = sd > 1e-12 * std::max(1.0, std::abs(m.input_mean(k))) ? sd : 1.0;
    }
}

CoefficientVector forward(const SurrogateModel& m, const DeviceParams& eta, const ControlFlux& phi) {
    const Eigen::MatrixXd x = normalize(m, model_input(eta, phi));
    return CoefficientVector::from_vector(run(m, x).col(0));
}

Eigen::MatrixXd forward_batch(const SurrogateModel& m, const Eigen::MatrixXd& raw_inputs) {
    if (raw_inputs.rows() != kModelInputs) throw std::invalid_argument("forward_batch: inputs must have 8 rows");
    return run(m, normalize(m, raw_inputs));
}

CoefficientVector forward_with_eta_jacobian(const SurrogateModel& m, const DeviceParams& eta, const ControlFlux& phi,
                                            Mat5& jacobian) {
    const Eigen::VectorXd x = normalize(m, model_input(eta, phi));
    // Tangents of the five eta inputs pushed through the network.
    Eigen::MatrixXd tangent = Eigen::MatrixXd::Zero(kModelInputs, 5);
    for (int k = 0; k < 5; ++k) tangent(3 + k, k) = 1.0 / m.input_std(3 + k);
    Eigen::VectorXd h = x;
    for (int l = 0; l < kNumLayers; ++l) {
        Eigen::VectorXd z = m.weight(l) * h + m.bias(l);
        tangent = m.weight(l) * tangent;
        if (l == kNumLayers - 1) {
            jacobian = m.output_scale * tangent;
            return CoefficientVector::from_vector(m.output_scale * z);
        }
        const Eigen::ArrayXd s = 1.0 / (1.0 + (-z.array()).exp());
        const Eigen::ArrayXd ds = s * (1.0 + z.array() * (1.0 - s));
        h = (z.array() * s).matrix();
        tangent = ds.matrix().asDiagonal() * tangent;
    }
    return {};
}

double batch_loss(const SurrogateModel& m, const Eigen::MatrixXd& x_norm, const Eigen::MatrixXd& y,
                  Eigen::VectorXd* grad_params, Eigen::MatrixXd* grad_inputs) {
    // Reused across calls so full-batch training does not reallocate every epoch.
    thread_local Workspace ws;
    const Eigen::Index batch = x_norm.cols();
    for (int l = 0; l < kNumLayers; ++l) {
        const auto i = static_cast<std::size_t>(l);
        const Eigen::MatrixXd& input = l == 0 ? x_norm : ws.a[i - 1];
        ws.z[i].resize(rows(l), batch);
        ws.z[i].noalias() = m.weight(l) * input;
        ws.z[i].colwise() += m.bias(l);
        if (l == kNumLayers - 1) break;
        ws.sig[i] = (1.0 + (-ws.z[i].array()).exp()).inverse();
        ws.a[i] = (ws.z[i].array() * ws.sig[i]).matrix();
    }
    ws.diff = m.output_scale * ws.z[kNumLayers - 1] - y;
    const double count = static_cast<double>(ws.diff.size());
    const double loss = ws.diff.squaredNorm() / count;
    if (!grad_params && !grad_inputs) return loss;

    if (grad_params) grad_params->resize(SurrogateModel::parameter_count());
    ws.delta = (2.0 * m.output_scale / count) * ws.diff;  // dL/dz of the output layer
    for (int l = kNumLayers - 1; l >= 0; --l) {
        const Eigen::MatrixXd& input = l == 0 ? x_norm : ws.a[static_cast<std::size_t>(l) - 1];
        if (grad_params) {
            Eigen::Map<Eigen::MatrixXd>(grad_params->data() + SurrogateModel::weight_offset(l), rows(l), cols(l))
                .noalias() = ws.delta * input.transpose();
            Eigen::Map<Eigen::VectorXd>(grad_params->data() + SurrogateModel::bias_offset(l), rows(l)) =
                ws.delta.rowwise().sum();
        }
        ws.upstream.resize(cols(l), batch);
        ws.upstream.noalias() = m.weight(l).transpose() * ws.delta;
        if (l == 0) {
            if (grad_inputs) *grad_inputs = ws.upstream;
            break;
        }
        const auto& sg = ws.sig[static_cast<std::size_t>(l) - 1];
        const auto& z = ws.z[static_cast<std::size_t>(l) - 1];
        ws.delta = (ws.upstream.array() * sg * (1.0 + z.array() * (1.0 - sg))).matrix();
    }
    return loss;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !(min_learning_rate > 0.0)) throw ConfigError("learning rates must be positive");
    if (!(decay_factor > 0.0 && decay_factor < 1.0)) throw ConfigError("decay factor must be in (0, 1)");
    if (plateau_patience < 1 || early_stop_patience < 1) throw ConfigError("patience must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
        throw ConfigError("invalid Adam moment parameters");
}

PlateauScheduler::PlateauScheduler(double lr, int patience, double factor, double min_lr, double threshold)
    : lr_(lr), patience_(patience), factor_(factor), min_lr_(min_lr), threshold_(threshold) {}

double PlateauScheduler::step(double loss) {
    if (loss < best_ * (1.0 - threshold_)) {
        best_ = loss;
        bad_ = 0;
    } else if (++bad_ >= patience_) {
        lr_ = std::max(lr_ * factor_, min_lr_);
        bad_ = 0;
    }
    return lr_;
}

TrainResult train(SurrogateModel m, const std::vector<const DatasetRecord*>& records, const TrainConfig& cfg,
                  bool keep_normalization) {
    cfg.validate();
    if (records.empty()) throw std::invalid_argument("train: no usable records");
    if (m.params.size() != SurrogateModel::parameter_count()) throw std::invalid_argument("train: malformed model");
    if (!keep_normalization) fit_normalization(m, records);

    Eigen::MatrixXd x_raw, y;
    records_to_matrices(records, x_raw, y);
    const Eigen::MatrixXd x = normalize(m, x_raw);

    const Eigen::Index n = m.params.size();
    Eigen::VectorXd grad(n), first = Eigen::VectorXd::Zero(n), second = Eigen::VectorXd::Zero(n);
    PlateauScheduler scheduler(cfg.learning_rate, cfg.plateau_patience, cfg.decay_factor, cfg.min_learning_rate,
                               cfg.plateau_threshold);

    TrainResult out;
    out.best_loss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_params = m.params;
    int since_best = 0;
    double lr = cfg.learning_rate;
    double beta1_power = 1.0, beta2_power = 1.0;
    out.stop_reason = "max_epochs";

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const double loss = batch_loss(m, x, y, &grad);
        if (!std::isfinite(loss) || !grad.allFinite())
            throw NonFiniteLossError(fmt::format("training loss became non-finite at epoch {}", epoch));
        out.loss_history.push_back(loss);
        out.lr_history.push_back(lr);
        out.epochs_run = epoch;
        if (loss < out.best_loss) {
            out.best_loss = loss;
            out.best_epoch = epoch;
            best_params = m.params;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (cfg.progress && cfg.progress_every > 0 && epoch % cfg.progress_every == 0) cfg.progress(epoch, loss, lr);
        if (since_best >= cfg.early_stop_patience) {
            out.stop_reason = "early_stopping";
            break;
        }

        // Adam step at the current rate, then let the scheduler see this epoch's loss.
        beta1_power *= cfg.beta1;
        beta2_power *= cfg.beta2;
        first = cfg.beta1 * first + (1.0 - cfg.beta1) * grad;
        second = cfg.beta2 * second + (1.0 - cfg.beta2) * grad.cwiseAbs2();
        const double c1 = 1.0 / (1.0 - beta1_power);
        const double c2 = 1.0 / (1.0 - beta2_power);
        m.params.array() -= lr * (c1 * first.array()) / ((c2 * second.array()).sqrt() + cfg.epsilon);
        lr = scheduler.step(loss);
    }

    m.params = best_params;
    m.meta.train_seed = cfg.seed;
    m.meta.best_epoch = out.best_epoch;
    m.meta.epochs_run = out.epochs_run;
    m.meta.best_loss = out.best_loss;
    out.model = std::move(m);
    return out;
}

namespace {

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Extended-precision forward pass for the finite-difference side of the check.
MatrixXld run_extended(const SurrogateModel& m, const Eigen::MatrixXd& x) {
    MatrixXld h = x.cast<long double>();
    for (int l = 0; l < kNumLayers; ++l) {
        MatrixXld z = m.weight(l).cast<long double>() * h;
        z.colwise() += m.bias(l).cast<long double>();
        if (l == kNumLayers - 1) return static_cast<long double>(m.output_scale) * z;
        h = z.unaryExpr([](long double v) { return v / (1.0L + std::exp(-v)); });
    }
    return h;
}

// L(up) - L(down) written as sum (p+ - p-)(p+ + p- - 2y) / n, so the large
// common part of the two losses never gets subtracted.
double loss_difference(const MatrixXld& up, const MatrixXld& down, const Eigen::MatrixXd& y) {
    const MatrixXld yl = y.cast<long double>();
    return static_cast<double>(((up - down).array() * (up + down - 2.0L * yl).array()).sum() /
                               static_cast<long double>(y.size()));
}

}  // namespace

GradientCheckResult gradient_check(const SurrogateModel& m, const DatasetRecord& record, std::uint64_t seed,
                                   int parameter_samples, double step) {
    Eigen::MatrixXd x = normalize(m, model_input(record.eta, record.phi));
    const Eigen::MatrixXd y = record.c_true.to_vector();
    Eigen::VectorXd grad;
    Eigen::MatrixXd grad_x;
    batch_loss(m, x, y, &grad, &grad_x);

    // Distinct random parameter indices, then all normalized inputs.
    const Eigen::Index n = SurrogateModel::parameter_count();
    std::vector<Eigen::Index> index(static_cast<std::size_t>(n));
    std::iota(index.begin(), index.end(), Eigen::Index{0});
    Rng rng(derive_seed(seed, "gradient_check"));
    const auto take = static_cast<std::size_t>(std::clamp<Eigen::Index>(parameter_samples, 0, n));
    for (std::size_t i = 0; i < take; ++i) std::swap(index[i], index[i + rng.below(index.size() - i)]);
    index.resize(take);

    std::vector<double> analytic, numeric;
    SurrogateModel probe = m;
    for (Eigen::Index k : index) {
        const double saved = probe.params(k);
        probe.params(k) = saved + step;
        const MatrixXld up = run_extended(probe, x);
        probe.params(k) = saved - step;
        const MatrixXld down = run_extended(probe, x);
        probe.params(k) = saved;
        analytic.push_back(grad(k));
        numeric.push_back(loss_difference(up, down, y) / (2.0 * step));
    }
    for (int k = 0; k < kModelInputs; ++k) {
        const double saved = x(k, 0);
        x(k, 0) = saved + step;
        const MatrixXld up = run_extended(m, x);
        x(k, 0) = saved - step;
        const MatrixXld down = run_extended(m, x);
        x(k, 0) = saved;
        analytic.push_back(grad_x(k, 0));
        numeric.push_back(loss_difference(up, down, y) / (2.0 * step));
    }

    GradientCheckResult out;
    out.checked = static_cast<int>(analytic.size());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        out.max_abs_analytic = std::max(out.max_abs_analytic, std::abs(analytic[i]));
        out.max_abs_numeric = std::max(out.max_abs_numeric, std::abs(numeric[i]));
    }
    const double floor = 1e-8 * (1.0 + out.max_abs_analytic);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
        out.max_relative_error = std::max(out.max_relative_error, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return out;
}

std::string checkpoint_to_string(const SurrogateModel& m) {
    m.validate();
    json j = artifact_header(kCheckpointKind, m.meta.config_hash);
    j["layer_sizes"] = kLayerSizes;
    j["parameters"] = std::vector<double>(m.params.data(), m.params.data() + m.params.size());
    j["input_mean"] = std::vector<double>(m.input_mean.data(), m.input_mean.data() + kModelInputs);
    j["input_std"] = std::vector<double>(m.input_std.data(), m.input_std.data() + kModelInputs);
    j["output_scale"] = m.output_scale;
    j["metadata"] = {{"frame", m.meta.frame},
                     {"qubits", m.meta.qubits},
                     {"bounds", m.meta.bounds},
                     {"t", m.meta.t},
                     {"init_seed", m.meta.init_seed},
                     {"train_seed", m.meta.train_seed},
                     {"best_epoch", m.meta.best_epoch},
                     {"epochs_run", m.meta.epochs_run},
                     {"best_loss", m.meta.best_loss},
                     {"dataset_hash", m.meta.dataset_hash}};
    return j.dump() + "\n";
}

SurrogateModel checkpoint_from_string(const std::string& text) {
    SurrogateModel m;
    try {
        const json j = json::parse(text);
        check_artifact_header(j, kCheckpointKind);
        if (j.at("layer_sizes").get<std::vector<int>>() != std::vector<int>(kLayerSizes.begin(), kLayerSizes.end()))
            throw SchemaError("checkpoint architecture does not match 8-64-64-64-5");
        const auto params = j.at("parameters").get<std::vector<double>>();
        m.params = Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
        const auto mean = j.at("input_mean").get<std::vector<double>>();
        const auto sd = j.at("input_std").get<std::vector<double>>();
        if (mean.size() != kModelInputs || sd.size() != kModelInputs)
            throw SchemaError("checkpoint normalization must have 8 entries");
        m.input_mean = Eigen::Map<const InputVector>(mean.data());
        m.input_std = Eigen::Map<const InputVector>(sd.data());
        j.at("output_scale").get_to(m.output_scale);
        const json& meta = j.at("metadata");
        meta.at("frame").get_to(m.meta.frame);
        meta.at("qubits").get_to(m.meta.qubits);
        meta.at("bounds").get_to(m.meta.bounds);
        meta.at("t").get_to(m.meta.t);
        meta.at("init_seed").get_to(m.meta.init_seed);
        meta.at("train_seed").get_to(m.meta.train_seed);
        meta.at("best_epoch").get_to(m.meta.best_epoch);
        meta.at("epochs_run").get_to(m.meta.epochs_run);
        meta.at("best_loss").get_to(m.meta.best_loss);
        meta.at("dataset_hash").get_to(m.meta.dataset_hash);
        j.at("config_hash").get_to(m.meta.config_hash);
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("checkpoint parse error: {}", e.what()));
    }
    m.validate();
    return m;
}

void save_checkpoint(const SurrogateModel& m, const std::filesystem::path& path) {
    atomic_write(path, checkpoint_to_string(m));
}

SurrogateModel load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_string(read_text(path)); }

void check_compatible(const SurrogateModel& m, const FrameConfig& frame, double t, const QubitConstants& q) {
    if (!close(m.meta.frame.omega0, frame.omega0))
        throw MetadataMismatchError(fmt::format("checkpoint frame omega0 = {} GHz, run uses {} GHz",
                                                m.meta.frame.omega0, frame.omega0));
    if (!close(m.meta.t, t))
        throw MetadataMismatchError(fmt::format("checkpoint evolution time {} ns, run uses {} ns", m.meta.t, t));
    if (!(close(m.meta.qubits.ej0_q1, q.ej0_q1) && close(m.meta.qubits.ej0_q2, q.ej0_q2) &&
          close(m.meta.qubits.ec_q1, q.ec_q1) && close(m.meta.qubits.ec_q2, q.ec_q2)))
        throw MetadataMismatchError("checkpoint was trained with different fixed qubit parameters");
}

}  // namespace effham
