#include "taclift/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace taclift {

namespace {

FeatureVector add_noise(FeatureVector features, double noise_std, Rng& rng) {
    if (noise_std <= 0.0) return features;
    for (double& c : features.compressions) c = std::max(0.0, c + rng.normal(0.0, noise_std));
    for (double& l : features.lateral_shifts) l += rng.normal(0.0, noise_std);
    return features;
}

MatrixXd features_matrix(const Dataset& dataset) {
    const int n = dataset.size();
    const int dim = dataset.samples.front().features.size();
    MatrixXd x(dim, n);
    for (int i = 0; i < n; ++i) {
        const auto flat = dataset.samples[i].features.flattened();
        for (int d = 0; d < dim; ++d) x(d, i) = flat[d];
    }
    return x;
}

MatrixXd labels_matrix(const Dataset& dataset) {
    const int n = dataset.size();
    MatrixXd y(2, n);
    for (int i = 0; i < n; ++i) {
        y(0, i) = dataset.samples[i].depth_label;
        y(1, i) = dataset.samples[i].angle_label;
    }
    return y;
}

void xavier_init(MatrixXd& w, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
}

}  // namespace

Dataset generate_dataset(int n_contact, int n_noncontact, const DomeGeometry& dome,
                         double noise_std, std::uint64_t seed) {
    if (n_contact < 0 || n_noncontact < 0) throw std::invalid_argument("negative sample count");
    Rng rng(seed);
    Dataset dataset;
    dataset.split_seed = seed;
    dataset.samples.reserve(n_contact + n_noncontact);

    for (int i = 0; i < n_contact; ++i) {
        ContactState state;
        state.depth = rng.uniform(1.0, 5.0);
        state.angle = rng.uniform(-25.0, 25.0);
        state.in_contact = true;
        const double slip = rng.uniform(-5.0, 5.0);
        const double rot_slip = rng.uniform(-5.0, 5.0);
        // Rotational slip drags the skin tangentially like linear shear.
        state.shear = slip + dome.radius * std::tan(deg_to_rad(rot_slip));
        Sample sample;
        sample.features = add_noise(pin_compressions(state, dome), noise_std, rng);
        sample.depth_label = state.depth;
        sample.angle_label = state.angle;
        dataset.samples.push_back(std::move(sample));
    }
    for (int i = 0; i < n_noncontact; ++i) {
        Sample sample;
        sample.features.compressions.assign(dome.pin_count(), 0.0);
        sample.features.lateral_shifts.assign(dome.pin_count(), 0.0);
        sample.features = add_noise(std::move(sample.features), noise_std, rng);
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction) {
    if (dataset.samples.empty()) throw std::invalid_argument("cannot split an empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must be in (0, 1)");

    const int n = dataset.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(hash_combine(dataset.split_seed, stable_hash("split")));
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }

    int n_train = static_cast<int>(std::llround(train_fraction * n));
    n_train = std::clamp(n_train, n > 1 ? 1 : 0, n - 1);
    if (n_train < 1) n_train = 1;

    Dataset train_set;
    Dataset test_set;
    train_set.split_seed = hash_combine(dataset.split_seed, stable_hash("train"));
    test_set.split_seed = hash_combine(dataset.split_seed, stable_hash("test"));
    train_set.samples.reserve(n_train);
    test_set.samples.reserve(n - n_train);
    for (int i = 0; i < n; ++i) {
        (i < n_train ? train_set : test_set).samples.push_back(dataset.samples[order[i]]);
    }
    return {std::move(train_set), std::move(test_set)};
}

MatrixXd mlp_forward(const MlpParams& params, const MatrixXd& inputs) {
    const MatrixXd hidden =
        ((params.w1 * inputs).colwise() + params.b1).array().tanh().matrix();
    return (params.w2 * hidden).colwise() + params.b2;
}

double mse_loss(const MlpParams& params, const MatrixXd& inputs, const MatrixXd& targets,
                MlpParams* grads) {
    const MatrixXd hidden =
        ((params.w1 * inputs).colwise() + params.b1).array().tanh().matrix();
    const MatrixXd pred = (params.w2 * hidden).colwise() + params.b2;
    const MatrixXd err = pred - targets;
    const double denom = static_cast<double>(err.size());
    const double loss = err.squaredNorm() / denom;
    if (grads) {
        const MatrixXd dpred = (2.0 / denom) * err;
        grads->w2 = dpred * hidden.transpose();
        grads->b2 = dpred.rowwise().sum();
        const MatrixXd dhidden = params.w2.transpose() * dpred;
        const MatrixXd dz =
            (dhidden.array() * (1.0 - hidden.array().square())).matrix();
        grads->w1 = dz * inputs.transpose();
        grads->b1 = dz.rowwise().sum();
    }
    return loss;
}

RegressorModel train(const Dataset& train_set, const TrainConfig& config) {
    if (train_set.samples.empty()) throw std::invalid_argument("empty training set");
    if (config.hidden_width < 1 || config.epochs < 1 || config.batch_size < 1)
        throw std::invalid_argument("bad training config");

    const MatrixXd x_raw = features_matrix(train_set);
    const MatrixXd y_raw = labels_matrix(train_set);
    const int dim = static_cast<int>(x_raw.rows());
    const int n = static_cast<int>(x_raw.cols());

    VectorXd feat_mean = x_raw.rowwise().mean();
    VectorXd feat_std(dim);
    for (int d = 0; d < dim; ++d) {
        const double var = (x_raw.row(d).array() - feat_mean(d)).square().mean();
        feat_std(d) = std::sqrt(var);
        if (!(feat_std(d) > 1e-9)) feat_std(d) = 1.0;
    }
    VectorXd label_mean = y_raw.rowwise().mean();
    VectorXd label_std(2);
    for (int d = 0; d < 2; ++d) {
        const double var = (y_raw.row(d).array() - label_mean(d)).square().mean();
        label_std(d) = std::sqrt(var);
        if (!(label_std(d) > 1e-9)) label_std(d) = 1.0;
    }

    MatrixXd x = (x_raw.colwise() - feat_mean).array().colwise() / feat_std.array();
    MatrixXd y = (y_raw.colwise() - label_mean).array().colwise() / label_std.array();

    Rng rng(hash_combine(config.seed, stable_hash("train")));
    MlpParams params;
    params.w1.resize(config.hidden_width, dim);
    params.b1 = VectorXd::Zero(config.hidden_width);
    params.w2.resize(2, config.hidden_width);
    params.b2 = VectorXd::Zero(2);
    xavier_init(params.w1, rng);
    xavier_init(params.w2, rng);

    MlpParams velocity;
    velocity.w1 = MatrixXd::Zero(params.w1.rows(), params.w1.cols());
    velocity.b1 = VectorXd::Zero(params.b1.size());
    velocity.w2 = MatrixXd::Zero(params.w2.rows(), params.w2.cols());
    velocity.b2 = VectorXd::Zero(params.b2.size());

    const double initial_loss = mse_loss(params, x, y);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    MlpParams grads;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }
        for (int start = 0; start < n; start += config.batch_size) {
            const int count = std::min(config.batch_size, n - start);
            MatrixXd xb(dim, count);
            MatrixXd yb(2, count);
            for (int k = 0; k < count; ++k) {
                xb.col(k) = x.col(order[start + k]);
                yb.col(k) = y.col(order[start + k]);
            }
            const double loss = mse_loss(params, xb, yb, &grads);
            if (!std::isfinite(loss)) throw std::runtime_error("divergence");
            velocity.w1 = config.momentum * velocity.w1 - config.learning_rate * grads.w1;
            velocity.b1 = config.momentum * velocity.b1 - config.learning_rate * grads.b1;
            velocity.w2 = config.momentum * velocity.w2 - config.learning_rate * grads.w2;
            velocity.b2 = config.momentum * velocity.b2 - config.learning_rate * grads.b2;
            params.w1 += velocity.w1;
            params.b1 += velocity.b1;
            params.w2 += velocity.w2;
            params.b2 += velocity.b2;
        }
    }

    const double final_loss = mse_loss(params, x, y);
    if (!std::isfinite(final_loss)) throw std::runtime_error("divergence");
    if (final_loss >= initial_loss)
        throw std::runtime_error("divergence: training did not reduce the loss");

    // Fold label de-standardization into the output layer so predictions
    // come out in mm / deg directly.
    RegressorModel model;
    model.params = params;
    model.params.w2 = label_std.asDiagonal() * params.w2;
    model.params.b2 = (label_std.array() * params.b2.array()).matrix() + label_mean;
    model.feat_mean = feat_mean;
    model.feat_std = feat_std;
    return model;
}

Prediction predict(const RegressorModel& model, const std::vector<double>& flat_features) {
    if (static_cast<int>(flat_features.size()) != model.input_dim())
        throw std::invalid_argument("feature dimension mismatch");
    VectorXd x(model.input_dim());
    for (int d = 0; d < model.input_dim(); ++d) x(d) = flat_features[d];
    x = ((x - model.feat_mean).array() / model.feat_std.array()).matrix();
    const VectorXd h = ((model.params.w1 * x + model.params.b1).array().tanh()).matrix();
    const VectorXd out = model.params.w2 * h + model.params.b2;
    return {out(0), out(1)};
}

Prediction predict(const RegressorModel& model, const FeatureVector& features) {
    return predict(model, features.flattened());
}

bool is_contact(double depth_hat, double threshold) { return depth_hat >= threshold; }

EvalReport evaluate(const RegressorModel& model, const Dataset& test_set) {
    if (test_set.samples.empty()) throw std::invalid_argument("empty test set");

    EvalReport report;
    report.depth_bins.clear();
    for (double lo = 1.0; lo < 5.0 - 1e-9; lo += 0.5)
        report.depth_bins.push_back({lo, lo + 0.5, 0, 0.0, 0.0});
    for (double lo = -25.0; lo < 25.0 - 1e-9; lo += 5.0)
        report.angle_bins.push_back({lo, lo + 5.0, 0, 0.0, 0.0});

    double sum_depth = 0.0;
    double sum_angle = 0.0;
    int correct = 0;
    for (const Sample& sample : test_set.samples) {
        const Prediction pred = predict(model, sample.features);
        const bool truly_contact = sample.depth_label > 0.0;
        if (is_contact(pred.depth) == truly_contact) ++correct;
        if (!truly_contact) {
            ++report.n_noncontact;
            continue;
        }
        ++report.n_contact;
        const double depth_err = std::fabs(pred.depth - sample.depth_label);
        const double angle_err = std::fabs(pred.angle - sample.angle_label);
        sum_depth += depth_err;
        sum_angle += angle_err;
        for (BinStat& bin : report.depth_bins) {
            if (sample.depth_label >= bin.lo && sample.depth_label < bin.hi + 1e-12) {
                ++bin.count;
                bin.mae_depth += depth_err;
                bin.mae_angle += angle_err;
                break;
            }
        }
        for (BinStat& bin : report.angle_bins) {
            if (sample.angle_label >= bin.lo && sample.angle_label < bin.hi + 1e-12) {
                ++bin.count;
                bin.mae_depth += depth_err;
                bin.mae_angle += angle_err;
                break;
            }
        }
    }
    if (report.n_contact > 0) {
        report.mae_depth = sum_depth / report.n_contact;
        report.mae_angle = sum_angle / report.n_contact;
    }
    report.contact_accuracy = static_cast<double>(correct) / test_set.size();
    for (auto* bins : {&report.depth_bins, &report.angle_bins}) {
        for (BinStat& bin : *bins) {
            if (bin.count > 0) {
                bin.mae_depth /= bin.count;
                bin.mae_angle /= bin.count;
            }
        }
    }
    return report;
}

std::string EvalReport::to_text() const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line),
                  "MAE depth: %.4f mm   MAE angle: %.4f deg   contact accuracy: %.4f\n",
                  mae_depth, mae_angle, contact_accuracy);
    out << line;
    std::snprintf(line, sizeof(line), "contact samples: %d   non-contact samples: %d\n",
                  n_contact, n_noncontact);
    out << line;
    out << "depth bin (mm)    n     MAE depth  MAE angle\n";
    for (const BinStat& bin : depth_bins) {
        std::snprintf(line, sizeof(line), "[%4.1f, %4.1f)   %5d   %8.4f   %8.4f\n", bin.lo,
                      bin.hi, bin.count, bin.mae_depth, bin.mae_angle);
        out << line;
    }
    out << "angle bin (deg)   n     MAE depth  MAE angle\n";
    for (const BinStat& bin : angle_bins) {
        std::snprintf(line, sizeof(line), "[%5.1f, %5.1f) %5d   %8.4f   %8.4f\n", bin.lo,
                      bin.hi, bin.count, bin.mae_depth, bin.mae_angle);
        out << line;
    }
    return out.str();
}

namespace {

void write_matrix(std::ostream& out, const char* name, const MatrixXd& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols();
    char buf[32];
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), " %.17g", m(r, c));
            out << buf;
        }
    out << '\n';
}

MatrixXd read_matrix(std::istream& in, const std::string& expected_name) {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(in >> name >> rows >> cols) || name != expected_name)
        throw std::runtime_error("model file: expected field " + expected_name);
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(in >> m(r, c))) throw std::runtime_error("model file: truncated " + expected_name);
    return m;
}

}  // namespace

void save_model(const std::string& path, const RegressorModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << "taclift_regressor v1\n";
    write_matrix(out, "w1", model.params.w1);
    write_matrix(out, "b1", model.params.b1);
    write_matrix(out, "w2", model.params.w2);
    write_matrix(out, "b2", model.params.b2);
    write_matrix(out, "feat_mean", model.feat_mean);
    write_matrix(out, "feat_std", model.feat_std);
}

RegressorModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string magic;
    std::string version;
    in >> magic >> version;
    if (magic != "taclift_regressor" || version != "v1")
        throw std::runtime_error("unrecognized model file: " + path);
    RegressorModel model;
    model.params.w1 = read_matrix(in, "w1");
    model.params.b1 = read_matrix(in, "b1");
    model.params.w2 = read_matrix(in, "w2");
    model.params.b2 = read_matrix(in, "b2");
    model.feat_mean = read_matrix(in, "feat_mean");
    model.feat_std = read_matrix(in, "feat_std");
    if (model.params.w1.rows() != model.params.b1.rows() ||
        model.params.w2.cols() != model.params.w1.rows() ||
        model.feat_mean.rows() != model.params.w1.cols() ||
        model.feat_std.rows() != model.params.w1.cols() ||
        (model.feat_std.array() <= 0.0).any())
        throw std::runtime_error("inconsistent model file: " + path);
    return model;
}

void export_dataset_csv(const std::string& path, const Dataset& dataset) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    const int dim = dataset.samples.empty() ? 0 : dataset.samples.front().features.size();
    for (int d = 0; d < dim; ++d) out << "feature_" << d << ',';
    out << "depth_label,angle_label\n";
    char buf[32];
    for (const Sample& sample : dataset.samples) {
        for (double v : sample.features.flattened()) {
            std::snprintf(buf, sizeof(buf), "%.9g,", v);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", sample.depth_label, sample.angle_label);
        out << buf;
    }
}

}  // namespace taclift
