#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "taclift/harness.hpp"

namespace {

using namespace taclift;

int run_train(const std::string& config_path, const std::string& out_path,
              std::optional<std::uint64_t> seed, bool no_noncontact,
              const std::string& report_path, const std::string& dataset_path) {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.master_seed = *seed;

    if (!dataset_path.empty()) {
        const DomeGeometry dome = make_dome(config.dome_radius, config.pin_count);
        const Dataset dataset =
            generate_dataset(config.train.n_contact, no_noncontact ? 0 : config.train.n_noncontact,
                             dome, config.train.feature_noise_std,
                             hash_combine(config.master_seed, stable_hash("dataset")));
        export_dataset_csv(dataset_path, dataset);
        std::cout << "dataset written to " << dataset_path << "\n";
    }

    const TrainOutcome outcome = run_training(config, !no_noncontact);
    save_model(out_path, outcome.model);
    std::cout << "model written to " << out_path << "\n" << outcome.report.to_text();
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw std::runtime_error("cannot write report: " + report_path);
        out << outcome.report.to_text();
    }
    return 0;
}

int run_eval(const std::string& config_path, const std::string& model_path,
             std::optional<std::uint64_t> seed) {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.master_seed = *seed;
    const RegressorModel model = load_model(model_path);
    const DomeGeometry dome = make_dome(config.dome_radius, config.pin_count);
    Dataset dataset = generate_dataset(config.train.n_contact, config.train.n_noncontact, dome,
                                       config.train.feature_noise_std,
                                       hash_combine(config.master_seed, stable_hash("dataset")));
    auto [train_set, test_set] = split(dataset, config.train.train_fraction);
    (void)train_set;
    std::cout << evaluate(model, test_set).to_text();
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& model_path,
              const std::string& out_path, std::optional<std::uint64_t> seed, bool do_assert,
              const std::string& svg_path) {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.master_seed = *seed;
    std::optional<RegressorModel> model;
    if (!model_path.empty()) model = load_model(model_path);
    const SweepReport report = run_pose_sweep(config, model ? &*model : nullptr);
    write_sweep_csv(out_path, report);
    std::cout << render_sweep_table(report);
    if (!svg_path.empty()) write_sweep_svg(svg_path, report);
    if (do_assert) {
        const AssertResult result = assert_sweep_trends(report, model.has_value());
        std::cout << (result.ok ? "sweep asserts passed: " : "sweep asserts FAILED: ")
                  << result.detail << "\n";
        if (!result.ok) return 2;
    }
    return 0;
}

int run_lift(const std::string& config_path, const std::string& model_path,
             const std::string& out_path, std::optional<std::uint64_t> seed,
             std::optional<int> trials, const std::string& mode, bool do_assert,
             const std::string& svg_path) {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.master_seed = *seed;
    std::optional<RegressorModel> model;
    if (!model_path.empty()) model = load_model(model_path);
    std::optional<TrialMode> mode_filter;
    if (mode == "tactile") mode_filter = TrialMode::Tactile;
    else if (mode == "vision") mode_filter = TrialMode::Vision;
    else if (!mode.empty()) throw std::runtime_error("unknown mode: " + mode);

    const LiftSuiteReport report =
        run_lift_suite(config, model ? &*model : nullptr, trials, mode_filter);
    write_lift_csv(out_path, report);
    std::cout << render_lift_table(report);
    if (!svg_path.empty()) write_lift_svg(svg_path, report);
    if (do_assert) {
        if (mode_filter) throw std::runtime_error("--assert needs both modes");
        const AssertResult result = assert_lift_trends(report);
        std::cout << (result.ok ? "lift asserts passed: " : "lift asserts FAILED: ")
                  << result.detail << "\n";
        if (!result.ok) return 2;
    }
    return 0;
}

int run_report(const std::string& sweep_path, const std::string& lift_path,
               const std::string& out_dir) {
    namespace fs = std::filesystem;
    if (!out_dir.empty()) fs::create_directories(out_dir);
    auto emit = [&](const std::string& name, const std::string& text) {
        if (out_dir.empty()) return;
        std::ofstream out(fs::path(out_dir) / name);
        out << text;
    };
    if (!sweep_path.empty()) {
        const SweepReport report = read_sweep_csv(sweep_path);
        const std::string table = render_sweep_table(report);
        std::cout << table;
        emit("sweep_table.txt", table);
        if (!out_dir.empty())
            write_sweep_svg((fs::path(out_dir) / "sweep_angle_mae.svg").string(), report);
    }
    if (!lift_path.empty()) {
        const LiftSuiteReport report = read_lift_csv(lift_path);
        const std::string table = render_lift_table(report);
        std::cout << table;
        emit("lift_table.txt", table);
        if (!out_dir.empty())
            write_lift_svg((fs::path(out_dir) / "lift_rates.svg").string(), report);
    }
    if (sweep_path.empty() && lift_path.empty())
        throw std::runtime_error("report needs --sweep and/or --lift");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tactile cooperative lifting simulator"};
    app.require_subcommand(1);

    std::string config_path = "configs/default.json";
    std::string model_path;
    std::string out_path;
    std::string report_path;
    std::string dataset_path;
    std::string svg_path;
    std::string mode;
    std::string sweep_csv;
    std::string lift_csv;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    bool no_noncontact = false;
    bool do_assert = false;

    auto* train_cmd = app.add_subcommand("train", "generate data, train and evaluate the regressor");
    train_cmd->add_option("--config", config_path, "experiment config");
    train_cmd->add_option("--out", out_path, "model output path")->required();
    train_cmd->add_option("--seed", seed, "master seed override");
    train_cmd->add_flag("--no-noncontact", no_noncontact, "train on contact samples only");
    train_cmd->add_option("--report-out", report_path, "write the eval report here");
    train_cmd->add_option("--dataset-out", dataset_path, "export the dataset CSV here");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a fresh held-out split");
    eval_cmd->add_option("--config", config_path, "experiment config");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--seed", seed, "master seed override");

    auto* sweep_cmd = app.add_subcommand("sweep", "pose-adjustment sweep across initial angles");
    sweep_cmd->add_option("--config", config_path, "experiment config");
    sweep_cmd->add_option("--model", model_path, "model file enabling regressor mode");
    sweep_cmd->add_option("--out", out_path, "CSV output path")->required();
    sweep_cmd->add_option("--seed", seed, "master seed override");
    sweep_cmd->add_option("--svg", svg_path, "also write an SVG plot");
    sweep_cmd->add_flag("--assert", do_assert, "exit 2 unless sweep trends hold");

    auto* lift_cmd = app.add_subcommand("lift", "cooperative lift suite, tactile vs vision");
    lift_cmd->add_option("--config", config_path, "experiment config");
    lift_cmd->add_option("--model", model_path, "model file for regressor sensing");
    lift_cmd->add_option("--out", out_path, "CSV output path")->required();
    lift_cmd->add_option("--seed", seed, "master seed override");
    lift_cmd->add_option("--trials", trials, "trials per scenario");
    lift_cmd->add_option("--mode", mode, "tactile|vision (default both)");
    lift_cmd->add_option("--svg", svg_path, "also write an SVG plot");
    lift_cmd->add_flag("--assert", do_assert, "exit 2 unless lift trends hold");

    auto* report_cmd = app.add_subcommand("report", "render tables and plots from CSV outputs");
    report_cmd->add_option("--sweep", sweep_csv, "sweep CSV");
    report_cmd->add_option("--lift", lift_csv, "lift CSV");
    report_cmd->add_option("--out", out_dir, "output directory for tables and SVGs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed())
            return run_train(config_path, out_path, seed, no_noncontact, report_path, dataset_path);
        if (eval_cmd->parsed()) return run_eval(config_path, model_path, seed);
        if (sweep_cmd->parsed())
            return run_sweep(config_path, model_path, out_path, seed, do_assert, svg_path);
        if (lift_cmd->parsed())
            return run_lift(config_path, model_path, out_path, seed, trials, mode, do_assert,
                            svg_path);
        if (report_cmd->parsed()) return run_report(sweep_csv, lift_csv, out_dir);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
