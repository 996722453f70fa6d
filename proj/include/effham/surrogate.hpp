// surrogate.hpp: MLP (phi, eta) -> effective coefficients.
//
// Architecture 8 -> 64 -> 64 -> 64 -> 5, SiLU on hidden layers, identity
// output. Inputs are ordered (phi_q1, phi_q2, phi_c1, ej0_c1, ec_c1, ec_q1c1,
// ec_q2c1, ec_q1q2) and standardized with training-set mean/std; outputs are
// MHz times output_scale.
//
// All weights live in one flat vector. Layer l occupies a column-major
// (out x in) weight block followed by its bias.

#pragma once

#include "effham/dataset.hpp"
#include "effham/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace effham {

inline constexpr int kModelInputs = 8;
inline constexpr int kModelOutputs = 5;
inline constexpr std::array<int, 5> kLayerSizes = {kModelInputs, 64, 64, 64, kModelOutputs};
inline constexpr int kNumLayers = 4;

using InputVector = Eigen::Matrix<double, kModelInputs, 1>;

struct ModelMetadata {
    FrameConfig frame = FrameConfig::standard();
    QubitConstants qubits;
    EnsembleSpec bounds;
    double t = 1.0;
    std::uint64_t init_seed = 0;
    std::uint64_t train_seed = 0;
    int best_epoch = 0;
    int epochs_run = 0;
    double best_loss = -1.0;  // -1 until trained
    std::string dataset_hash;
    std::string config_hash;
    bool operator==(const ModelMetadata&) const = default;
};

struct SurrogateModel {
    Eigen::VectorXd params;
    InputVector input_mean = InputVector::Zero();
    InputVector input_std = InputVector::Ones();
    double output_scale = 1.0;
    ModelMetadata meta;

    static Eigen::Index parameter_count();
    static Eigen::Index weight_offset(int layer);
    static Eigen::Index bias_offset(int layer);

    Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
    Eigen::Map<Eigen::MatrixXd> weight(int layer);
    Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
    Eigen::Map<Eigen::VectorXd> bias(int layer);

    void validate() const;
};

InputVector model_input(const DeviceParams& eta, const ControlFlux& phi);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
SurrogateModel init_model(std::uint64_t seed);

// Sets input_mean/input_std from the records (std floored at 1 for constant inputs).
void fit_normalization(SurrogateModel& m, const std::vector<const DatasetRecord*>& records);

CoefficientVector forward(const SurrogateModel& m, const DeviceParams& eta, const ControlFlux& phi);

// Raw inputs 8 x B -> coefficients 5 x B (MHz).
Eigen::MatrixXd forward_batch(const SurrogateModel& m, const Eigen::MatrixXd& raw_inputs);

// Coefficients and d c / d eta (5 x 5, MHz per GHz) by forward-mode differentiation.
CoefficientVector forward_with_eta_jacobian(const SurrogateModel& m, const DeviceParams& eta, const ControlFlux& phi,
                                            Mat5& jacobian);

// Mean over records and terms of (c_pred - c_true)^2 in MHz^2 for normalized
// inputs x (8 x B) and targets y (5 x B). Fills the parameter gradient and,
// optionally, the gradient with respect to x.
double batch_loss(const SurrogateModel& m, const Eigen::MatrixXd& x_norm, const Eigen::MatrixXd& y,
                  Eigen::VectorXd* grad_params = nullptr, Eigen::MatrixXd* grad_inputs = nullptr);

struct TrainConfig {
    double learning_rate = 2e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int plateau_patience = 500;
    double decay_factor = 0.5;
    double min_learning_rate = 1e-7;
    // Relative improvement the scheduler counts as progress.
    double plateau_threshold = 1e-4;
    int early_stop_patience = 600;
    int max_epochs = 100000;
    std::uint64_t seed = 0;
    // Called every progress_every epochs when set.
    int progress_every = 0;
    std::function<void(int epoch, double loss, double lr)> progress;

    void validate() const;
};

// Reduce-on-plateau: after `patience` consecutive epochs without a relative
// improvement of `threshold` over the best loss, lr <- max(lr * factor, min).
class PlateauScheduler {
public:
    PlateauScheduler(double lr, int patience, double factor, double min_lr, double threshold);
    // Returns the learning rate to use for the next step.
    double step(double loss);
    double learning_rate() const { return lr_; }

private:
    double lr_;
    int patience_;
    double factor_;
    double min_lr_;
    double threshold_;
    double best_ = std::numeric_limits<double>::infinity();
    int bad_ = 0;
};

struct TrainResult {
    SurrogateModel model;  // best-loss parameters
    std::vector<double> loss_history;
    std::vector<double> lr_history;
    int best_epoch = 0;  // 1-based
    double best_loss = 0.0;
    int epochs_run = 0;
    std::string stop_reason;
};

// Full-batch Adam on the usable records. Fits the input normalization first
// unless keep_normalization is set. Throws NonFiniteLossError.
TrainResult train(SurrogateModel m, const std::vector<const DatasetRecord*>& records, const TrainConfig& cfg,
                  bool keep_normalization = false);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    double max_abs_analytic = 0.0;
    double max_abs_numeric = 0.0;
    int checked = 0;
};

// Central differences (step on parameters and normalized inputs) against
// backprop for the single-record loss. Relative error per entry is
// |a - n| / max(|a|, |n|, 1e-8 (1 + max_j |a_j|)).
GradientCheckResult gradient_check(const SurrogateModel& m, const DatasetRecord& record, std::uint64_t seed = 0,
                                   int parameter_samples = 128, double step = 1e-5);

std::string checkpoint_to_string(const SurrogateModel& m);
SurrogateModel checkpoint_from_string(const std::string& text);
void save_checkpoint(const SurrogateModel& m, const std::filesystem::path& path);
SurrogateModel load_checkpoint(const std::filesystem::path& path);

// Throws MetadataMismatchError when the model was trained for a different
// frame, evolution time or qubit constants.
void check_compatible(const SurrogateModel& m, const FrameConfig& frame, double t, const QubitConstants& q);

}  // namespace effham
