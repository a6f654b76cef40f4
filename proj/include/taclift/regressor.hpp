#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taclift/tactile.hpp"

namespace taclift {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Sample {
    FeatureVector features;
    double depth_label = 0.0;  // mm; 0 marks non-contact
    double angle_label = 0.0;  // deg
};

struct Dataset {
    std::vector<Sample> samples;
    std::uint64_t split_seed = 0;

    int size() const { return static_cast<int>(samples.size()); }
};

// Labelled synthetic protocol: contact samples with depth ~ U[1,5] mm and
// angle ~ U[-25,25] deg, captured after a random tangential slip of
// U[-5,5] mm plus a rotational slip of U[-5,5] deg (folded into the shear
// channel as R*tan(rot)); labels keep the unperturbed pose. Non-contact
// samples have zero features and a 0 mm depth label.
Dataset generate_dataset(int n_contact, int n_noncontact, const DomeGeometry& dome,
                         double noise_std, std::uint64_t seed);

// Seeded disjoint partition; proportions within one sample of the fraction.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction);

// Two-layer perceptron y = w2 * tanh(w1 * x + b1) + b2.
struct MlpParams {
    MatrixXd w1;
    VectorXd b1;
    MatrixXd w2;
    VectorXd b2;
};

MatrixXd mlp_forward(const MlpParams& params, const MatrixXd& inputs);

// Mean squared error over all outputs of the batch; when `grads` is given,
// fills it with the analytic gradient of that loss.
double mse_loss(const MlpParams& params, const MatrixXd& inputs, const MatrixXd& targets,
                MlpParams* grads = nullptr);

struct TrainConfig {
    int hidden_width = 64;
    double learning_rate = 1e-3;
    int epochs = 200;
    int batch_size = 64;
    double momentum = 0.9;
    std::uint64_t seed = 0;
};

// Depth/angle regressor: MLP over standardized pin features. Two output
// heads in physical units (mm, deg); label scaling used during training is
// folded into the output layer.
struct RegressorModel {
    MlpParams params;
    VectorXd feat_mean;
    VectorXd feat_std;

    int input_dim() const { return static_cast<int>(params.w1.cols()); }
};

// Mini-batch gradient descent on the two-head MSE. Deterministic under
// config.seed. Throws "divergence" if the loss goes non-finite.
RegressorModel train(const Dataset& train_set, const TrainConfig& config);

struct Prediction {
    double depth = 0.0;  // mm
    double angle = 0.0;  // deg
};

Prediction predict(const RegressorModel& model, const FeatureVector& features);
Prediction predict(const RegressorModel& model, const std::vector<double>& flat_features);

// Predicted depth at or above the threshold counts as contact. 0.5 mm sits
// midway between the 0 mm non-contact label and the 1 mm minimum contact
// depth.
constexpr double kContactDepthThreshold = 0.5;
bool is_contact(double depth_hat, double threshold = kContactDepthThreshold);

struct BinStat {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    double mae_depth = 0.0;
    double mae_angle = 0.0;
};

struct EvalReport {
    double mae_depth = 0.0;  // over contact samples
    double mae_angle = 0.0;  // over contact samples
    double contact_accuracy = 0.0;
    std::vector<BinStat> depth_bins;  // contact region, 0.5 mm wide
    std::vector<BinStat> angle_bins;  // 5 deg wide
    int n_contact = 0;
    int n_noncontact = 0;

    std::string to_text() const;
};

EvalReport evaluate(const RegressorModel& model, const Dataset& test_set);

// Versioned plain-text key-value serialization.
void save_model(const std::string& path, const RegressorModel& model);
RegressorModel load_model(const std::string& path);

// CSV with columns feature_0..feature_{2M-1}, depth_label, angle_label.
void export_dataset_csv(const std::string& path, const Dataset& dataset);

}  // namespace taclift
