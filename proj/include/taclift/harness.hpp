#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taclift/regressor.hpp"
#include "taclift/world.hpp"

namespace taclift {

struct TrainSettings {
    int n_contact = 5000;
    int n_noncontact = 500;
    double feature_noise_std = 0.02;  // mm
    double train_fraction = 0.75;
    TrainConfig optimizer;
};

struct SweepSettings {
    std::vector<double> angles_deg;  // initial box yaws
    int folds = 5;
    int regressor_folds = 5;
    double start_distance = 1100.0;  // mm
};

struct ScenarioSpec {
    std::string name;
    double mass = 0.2;        // kg
    double com_height = 15.0; // mm
    Vector2d com_offset{0.0, 0.0};
};

struct LiftSettings {
    int trials = 50;
    int tick_budget = 10000;
    double start_distance = 1100.0;
    SensorType sensor = SensorType::Regressor;
    double feature_noise_std = 0.02;
    PhysicsParams physics;
    KinematicNoise kin_noise;
    VisionNoise vision_noise;
    std::vector<ScenarioSpec> scenarios;
};

// One experiment document; every calibration constant lives here.
struct ExperimentConfig {
    std::uint64_t master_seed = 1;
    double dome_radius = 20.0;
    int pin_count = 21;
    StrategyParams strategy;
    PhysicsParams physics;
    KinematicNoise kin_noise;
    VisionNoise vision_noise;
    BoxObject box;
    TrainSettings train;
    SweepSettings sweep;
    LiftSettings lift;
};

// Throws with file/position diagnostics on malformed JSON or bad fields.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin);

// ---------------------------------------------------------------------------
// Pose-adjustment sweep

enum class SweepStrategy { SelfRotation, ObjectRotation, MultiContact, VisionPlan };
enum class SweepMode { Bumper, Regressor, Vision };

const char* to_string(SweepStrategy strategy);
const char* to_string(SweepMode mode);

struct SweepRow {
    double initial_angle_deg = 0.0;
    std::string strategy;
    std::string mode;
    int fold = 0;
    double final_angle_err_deg = 0.0;
    double distance_err_mm = 0.0;
    int contacts_used = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
};

// Runs every initial yaw x strategy x fold for the bumper and (when a model
// is supplied) regressor modes, plus the open-loop vision plan.
SweepReport run_pose_sweep(const ExperimentConfig& config, const RegressorModel* model);

void write_sweep_csv(const std::string& path, const SweepReport& report);
SweepReport read_sweep_csv(const std::string& path);

// Mean absolute error keyed by |initial angle|, pooled over the listed
// strategies (empty = all rows of the mode).
std::map<double, double> sweep_mae_by_abs_angle(const SweepReport& report, SweepMode mode,
                                                const std::vector<SweepStrategy>& strategies,
                                                bool distance);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Lift suite

struct LiftRow {
    std::string scenario;
    std::string mode;
    std::uint64_t seed = 0;
    bool success = false;
    std::string failure_cause;
    int ticks = 0;
};

struct LiftSuiteReport {
    std::vector<LiftRow> rows;
};

// Per-scenario trials for both modes with seeds derived as
// hash(scenario, mode, trial index, master seed).
LiftSuiteReport run_lift_suite(const ExperimentConfig& config, const RegressorModel* model,
                               std::optional<int> trials_override = std::nullopt,
                               std::optional<TrialMode> mode_filter = std::nullopt);

void write_lift_csv(const std::string& path, const LiftSuiteReport& report);
LiftSuiteReport read_lift_csv(const std::string& path);

double lift_success_rate(const LiftSuiteReport& report, const std::string& scenario,
                         TrialMode mode);
double lift_aggregate_rate(const LiftSuiteReport& report, TrialMode mode);
std::vector<std::string> lift_scenario_names(const LiftSuiteReport& report);

// ---------------------------------------------------------------------------
// Training entry point

struct TrainOutcome {
    RegressorModel model;
    EvalReport report;
};

// Generates the labelled dataset, splits, trains and evaluates. With
// include_noncontact = false the dataset holds contact samples only.
TrainOutcome run_training(const ExperimentConfig& config, bool include_noncontact = true);

// ---------------------------------------------------------------------------
// Reporting

std::string render_sweep_table(const SweepReport& report);
std::string render_lift_table(const LiftSuiteReport& report);
void write_sweep_svg(const std::string& path, const SweepReport& report);
void write_lift_svg(const std::string& path, const LiftSuiteReport& report);

// Trend assertions mirroring the experiment expectations; detail explains
// any failure.
struct AssertResult {
    bool ok = true;
    std::string detail;
};

AssertResult assert_sweep_trends(const SweepReport& report, bool regressor_mode_present);
AssertResult assert_lift_trends(const LiftSuiteReport& report);

}  // namespace taclift
