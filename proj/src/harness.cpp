#include "taclift/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace taclift {

using nlohmann::json;

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

StrategyParams parse_strategy(const json& j, StrategyParams out) {
    out.angle_threshold = j.value("angle_threshold_deg", out.angle_threshold);
    out.depth_target = j.value("depth_target_mm", out.depth_target);
    out.proportional_gain = j.value("proportional_gain", out.proportional_gain);
    out.max_contacts = j.value("max_contacts", out.max_contacts);
    out.backoff_distance = j.value("backoff_distance_mm", out.backoff_distance);
    out.approach_speed = j.value("approach_speed_mm", out.approach_speed);
    out.approach_travel_budget = j.value("approach_travel_budget_mm", out.approach_travel_budget);
    out.depth_band = j.value("depth_band_mm", out.depth_band);
    out.max_servo_moves = j.value("max_servo_moves", out.max_servo_moves);
    validate(out);
    return out;
}

PhysicsParams parse_physics(const json& j, PhysicsParams out) {
    out.contact_stiffness = j.value("contact_stiffness_n_per_mm", out.contact_stiffness);
    out.gravity = j.value("gravity_m_per_s2", out.gravity);
    out.eps_normal_deg = j.value("eps_normal_deg", out.eps_normal_deg);
    out.eps_force = j.value("eps_force_n", out.eps_force);
    out.eps_torque = j.value("eps_torque_n_mm", out.eps_torque);
    out.pitch_lever = j.value("pitch_lever_mm", out.pitch_lever);
    return out;
}

KinematicNoise parse_kin_noise(const json& j, KinematicNoise out) {
    out.k_trans = j.value("k_trans", out.k_trans);
    out.k_rot = j.value("k_rot", out.k_rot);
    return out;
}

Vector2d parse_vec2(const json& j, Vector2d fallback) {
    if (!j.is_array() || j.size() != 2) return fallback;
    return {j[0].get<double>(), j[1].get<double>()};
}

VisionNoise parse_vision_noise(const json& j, VisionNoise out) {
    out.sigma_pos = j.value("sigma_pos_mm", out.sigma_pos);
    out.sigma_ang = j.value("sigma_ang_deg", out.sigma_ang);
    if (j.contains("bias_pos_mm")) out.bias_pos = parse_vec2(j["bias_pos_mm"], out.bias_pos);
    out.bias_ang = j.value("bias_ang_deg", out.bias_ang);
    return out;
}

BoxObject parse_box(const json& j, BoxObject out) {
    out.width = j.value("width_mm", out.width);
    out.length = j.value("length_mm", out.length);
    out.mass = j.value("mass_kg", out.mass);
    if (j.contains("com_offset_mm")) out.com_offset = parse_vec2(j["com_offset_mm"], out.com_offset);
    out.com_height = j.value("com_height_mm", out.com_height);
    out.friction_mu = j.value("friction_mu", out.friction_mu);
    return out;
}

SensorType parse_sensor(const std::string& name) {
    if (name == "bumper") return SensorType::Bumper;
    if (name == "regressor") return SensorType::Regressor;
    throw std::invalid_argument("unknown sensor type: " + name);
}

std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(origin + ": " + err.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.master_seed = j.value("master_seed", cfg.master_seed);
        if (j.contains("dome")) {
            cfg.dome_radius = j["dome"].value("radius_mm", cfg.dome_radius);
            cfg.pin_count = j["dome"].value("pin_count", cfg.pin_count);
        }
        if (j.contains("strategy")) cfg.strategy = parse_strategy(j["strategy"], cfg.strategy);
        if (j.contains("physics")) cfg.physics = parse_physics(j["physics"], cfg.physics);
        if (j.contains("kinematic_noise"))
            cfg.kin_noise = parse_kin_noise(j["kinematic_noise"], cfg.kin_noise);
        if (j.contains("vision_noise"))
            cfg.vision_noise = parse_vision_noise(j["vision_noise"], cfg.vision_noise);
        if (j.contains("box")) cfg.box = parse_box(j["box"], cfg.box);

        if (j.contains("train")) {
            const json& t = j["train"];
            cfg.train.n_contact = t.value("n_contact", cfg.train.n_contact);
            cfg.train.n_noncontact = t.value("n_noncontact", cfg.train.n_noncontact);
            cfg.train.feature_noise_std =
                t.value("feature_noise_std_mm", cfg.train.feature_noise_std);
            cfg.train.train_fraction = t.value("train_fraction", cfg.train.train_fraction);
            cfg.train.optimizer.hidden_width =
                t.value("hidden_width", cfg.train.optimizer.hidden_width);
            cfg.train.optimizer.learning_rate =
                t.value("learning_rate", cfg.train.optimizer.learning_rate);
            cfg.train.optimizer.epochs = t.value("epochs", cfg.train.optimizer.epochs);
            cfg.train.optimizer.batch_size = t.value("batch_size", cfg.train.optimizer.batch_size);
            cfg.train.optimizer.momentum = t.value("momentum", cfg.train.optimizer.momentum);
        }

        if (j.contains("sweep")) {
            const json& s = j["sweep"];
            if (s.contains("angles_deg"))
                cfg.sweep.angles_deg = s["angles_deg"].get<std::vector<double>>();
            cfg.sweep.folds = s.value("folds", cfg.sweep.folds);
            cfg.sweep.regressor_folds = s.value("regressor_folds", cfg.sweep.folds);
            cfg.sweep.start_distance = s.value("start_distance_mm", cfg.sweep.start_distance);
        }
        if (cfg.sweep.angles_deg.empty()) {
            for (int a = -25; a <= 25; a += 5) cfg.sweep.angles_deg.push_back(a);
        }
        for (double a : cfg.sweep.angles_deg) {
            if (a < -25.0 || a > 25.0)
                throw std::invalid_argument("sweep angles must lie in [-25, 25] deg");
        }

        cfg.lift.physics = cfg.physics;
        cfg.lift.kin_noise = cfg.kin_noise;
        cfg.lift.vision_noise = cfg.vision_noise;
        if (j.contains("lift")) {
            const json& l = j["lift"];
            cfg.lift.trials = l.value("trials", cfg.lift.trials);
            if (cfg.lift.trials < 1) throw std::invalid_argument("lift trials must be >= 1");
            cfg.lift.tick_budget = l.value("tick_budget", cfg.lift.tick_budget);
            cfg.lift.start_distance = l.value("start_distance_mm", cfg.lift.start_distance);
            if (l.contains("sensor")) cfg.lift.sensor = parse_sensor(l["sensor"].get<std::string>());
            cfg.lift.feature_noise_std =
                l.value("feature_noise_std_mm", cfg.lift.feature_noise_std);
            if (l.contains("physics")) cfg.lift.physics = parse_physics(l["physics"], cfg.lift.physics);
            if (l.contains("kinematic_noise"))
                cfg.lift.kin_noise = parse_kin_noise(l["kinematic_noise"], cfg.lift.kin_noise);
            if (l.contains("vision_noise"))
                cfg.lift.vision_noise = parse_vision_noise(l["vision_noise"], cfg.lift.vision_noise);
            if (l.contains("scenarios")) {
                cfg.lift.scenarios.clear();
                for (const json& s : l["scenarios"]) {
                    ScenarioSpec spec;
                    spec.name = s.at("name").get<std::string>();
                    spec.mass = s.value("mass_kg", spec.mass);
                    spec.com_height = s.value("com_height_mm", spec.com_height);
                    if (s.contains("com_offset_mm"))
                        spec.com_offset = parse_vec2(s["com_offset_mm"], spec.com_offset);
                    cfg.lift.scenarios.push_back(spec);
                }
            }
        }
        if (cfg.lift.scenarios.empty()) cfg.lift.scenarios.push_back({"empty_box", 0.2, 15.0, {}});
        return cfg;
    } catch (const json::exception& err) {
        throw std::runtime_error(origin + ": " + err.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str(), path);
}

const char* to_string(SweepStrategy strategy) {
    switch (strategy) {
        case SweepStrategy::SelfRotation: return "self_rotation";
        case SweepStrategy::ObjectRotation: return "object_rotation";
        case SweepStrategy::MultiContact: return "multi_contact";
        case SweepStrategy::VisionPlan: return "vision_plan";
    }
    return "?";
}

const char* to_string(SweepMode mode) {
    switch (mode) {
        case SweepMode::Bumper: return "bumper";
        case SweepMode::Regressor: return "regressor";
        case SweepMode::Vision: return "vision";
    }
    return "?";
}

namespace {

struct SweepTrialOutcome {
    double angle_err = 0.0;
    double dist_err = 0.0;
    int contacts = 0;
};

SweepTrialOutcome run_sweep_trial(const ExperimentConfig& cfg, const RegressorModel* model,
                                  double yaw, SweepStrategy strategy, SweepMode mode, int fold) {
    std::uint64_t seed = hash_combine(cfg.master_seed, stable_hash(to_string(mode)));
    seed = hash_combine(seed, stable_hash(to_string(strategy)));
    seed = hash_combine(seed, double_bits(yaw));
    seed = hash_combine(seed, static_cast<std::uint64_t>(fold));

    WorldConfig wc;
    wc.box = cfg.box;
    wc.box_pose = Pose2(0.0, 0.0, yaw);
    wc.kin_noise = cfg.kin_noise;
    wc.seed = hash_combine(seed, stable_hash("world"));
    const DomeGeometry dome = make_dome(cfg.dome_radius, cfg.pin_count);
    wc.robots[0].start_pose = Pose2(-cfg.sweep.start_distance, 0.0, 0.0);
    wc.robots[0].dome = dome;
    if (mode == SweepMode::Regressor) {
        wc.robots[0].sensor = SensorType::Regressor;
        wc.robots[0].model = model;
        wc.robots[0].feature_noise_std = cfg.train.feature_noise_std;
    }
    wc.robots[1].start_pose = Pose2(cfg.sweep.start_distance, 0.0, 180.0);
    wc.robots[1].dome = dome;

    World world(wc);
    const SensorFn sensor = [&world] { return world.read_sensor(0); };
    const MoveFn move = [&world](const RobotCommand& cmd) {
        world.apply_command(0, cmd);
        world.end_step();
    };

    const StrategyParams& params = cfg.strategy;
    SweepTrialOutcome outcome;

    auto approach_until_contact = [&]() -> bool {
        double travel = 0.0;
        while (travel < params.approach_travel_budget) {
            if (sensor().in_contact) return true;
            move(RobotCommand::translate(params.approach_speed, 0.0));
            travel += params.approach_speed;
        }
        return sensor().in_contact;
    };

    switch (strategy) {
        case SweepStrategy::SelfRotation:
        case SweepStrategy::ObjectRotation: {
            const Vector2d hint =
                mode == SweepMode::Bumper
                    ? world.box_pose().position()
                    : world.vision_pose_estimate(cfg.vision_noise).position();
            if (approach_until_contact()) {
                const ContactState estimate = sensor();
                outcome.contacts = 1;
                const RobotCommand cmd = strategy == SweepStrategy::SelfRotation
                                             ? self_rotation_step(estimate, params)
                                             : object_rotation_step(estimate, hint, params);
                if (cmd.kind != RobotCommand::Kind::Stop) move(cmd);
            }
            break;
        }
        case SweepStrategy::MultiContact: {
            const Vector2d hint =
                mode == SweepMode::Bumper
                    ? world.box_pose().position()
                    : world.vision_pose_estimate(cfg.vision_noise).position();
            AdjustMachine machine(hint, params);
            bt::Status status = bt::Status::Running;
            while (status == bt::Status::Running) status = machine.step(sensor, move);
            outcome.contacts = machine.outcome().contacts_used;
            break;
        }
        case SweepStrategy::VisionPlan: {
            const Pose2 estimate = world.vision_pose_estimate(cfg.vision_noise);
            const auto plan = vision_adjust_plan(world.robot_pose(0), estimate, cfg.box,
                                                 dome.radius, params);
            for (const RobotCommand& cmd : plan) move(cmd);
            break;
        }
    }

    const AlignmentMetrics metrics = world.alignment_metrics(0);
    outcome.angle_err = std::fabs(metrics.angle_err_deg);
    outcome.dist_err = std::fabs(metrics.distance_err_mm);
    return outcome;
}

}  // namespace

SweepReport run_pose_sweep(const ExperimentConfig& config, const RegressorModel* model) {
    SweepReport report;
    std::vector<SweepMode> modes{SweepMode::Bumper};
    if (model) modes.push_back(SweepMode::Regressor);
    modes.push_back(SweepMode::Vision);

    for (SweepMode mode : modes) {
        const std::vector<SweepStrategy> strategies =
            mode == SweepMode::Vision
                ? std::vector<SweepStrategy>{SweepStrategy::VisionPlan}
                : std::vector<SweepStrategy>{SweepStrategy::SelfRotation,
                                             SweepStrategy::ObjectRotation,
                                             SweepStrategy::MultiContact};
        const int folds = mode == SweepMode::Regressor ? config.sweep.regressor_folds
                                                       : config.sweep.folds;
        for (SweepStrategy strategy : strategies) {
            for (double angle : config.sweep.angles_deg) {
                for (int fold = 0; fold < folds; ++fold) {
                    const SweepTrialOutcome outcome =
                        run_sweep_trial(config, model, angle, strategy, mode, fold);
                    report.rows.push_back({angle, to_string(strategy), to_string(mode), fold,
                                           outcome.angle_err, outcome.dist_err,
                                           outcome.contacts});
                }
            }
        }
    }
    return report;
}

void write_sweep_csv(const std::string& path, const SweepReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep csv: " + path);
    out << "initial_angle_deg,strategy,mode,fold,final_angle_err_deg,distance_err_mm,"
           "contacts_used\n";
    for (const SweepRow& row : report.rows) {
        out << fmt(row.initial_angle_deg, "%.3f") << ',' << row.strategy << ',' << row.mode << ','
            << row.fold << ',' << fmt(row.final_angle_err_deg) << ','
            << fmt(row.distance_err_mm) << ',' << row.contacts_used << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double_field(const std::string& text, const std::string& path, int row) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(row) +
                                 ": bad numeric field '" + text + "'");
    }
}

long long parse_int_field(const std::string& text, const std::string& path, int row) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(row) +
                                 ": bad integer field '" + text + "'");
    }
}

}  // namespace

SweepReport read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sweep csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty csv");
    SweepReport report;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw std::runtime_error(path + ": row " + std::to_string(row_no) +
                                     ": expected 7 fields, got " + std::to_string(fields.size()));
        SweepRow row;
        row.initial_angle_deg = parse_double_field(fields[0], path, row_no);
        row.strategy = fields[1];
        row.mode = fields[2];
        row.fold = static_cast<int>(parse_int_field(fields[3], path, row_no));
        row.final_angle_err_deg = parse_double_field(fields[4], path, row_no);
        row.distance_err_mm = parse_double_field(fields[5], path, row_no);
        row.contacts_used = static_cast<int>(parse_int_field(fields[6], path, row_no));
        report.rows.push_back(row);
    }
    if (report.rows.empty()) throw std::runtime_error(path + ": empty csv");
    return report;
}

std::map<double, double> sweep_mae_by_abs_angle(const SweepReport& report, SweepMode mode,
                                                const std::vector<SweepStrategy>& strategies,
                                                bool distance) {
    std::set<std::string> wanted;
    for (SweepStrategy s : strategies) wanted.insert(to_string(s));
    const std::string mode_name = to_string(mode);
    std::map<double, std::pair<double, int>> acc;
    for (const SweepRow& row : report.rows) {
        if (row.mode != mode_name) continue;
        if (!wanted.empty() && !wanted.count(row.strategy)) continue;
        auto& slot = acc[std::fabs(row.initial_angle_deg)];
        slot.first += distance ? row.distance_err_mm : row.final_angle_err_deg;
        slot.second += 1;
    }
    std::map<double, double> mae;
    for (const auto& [angle, slot] : acc) mae[angle] = slot.first / slot.second;
    return mae;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman needs two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        const int n = static_cast<int>(v.size());
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::vector<double> rank(n, 0.0);
        int i = 0;
        while (i < n) {
            int j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;
            for (int k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    const int n = static_cast<int>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    for (int i = 0; i < n; ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

LiftSuiteReport run_lift_suite(const ExperimentConfig& config, const RegressorModel* model,
                               std::optional<int> trials_override,
                               std::optional<TrialMode> mode_filter) {
    if (config.lift.sensor == SensorType::Regressor && model == nullptr)
        throw std::invalid_argument("lift suite with regressor sensing needs a model");

    const int trials = trials_override.value_or(config.lift.trials);
    std::vector<TrialMode> modes;
    if (!mode_filter || *mode_filter == TrialMode::Tactile) modes.push_back(TrialMode::Tactile);
    if (!mode_filter || *mode_filter == TrialMode::Vision) modes.push_back(TrialMode::Vision);

    LiftSuiteReport report;
    for (const ScenarioSpec& spec : config.lift.scenarios) {
        LiftScenario scenario;
        scenario.name = spec.name;
        scenario.box = config.box;
        scenario.box.mass = spec.mass;
        scenario.box.com_height = spec.com_height;
        scenario.box.com_offset = spec.com_offset;
        scenario.start_distance = config.lift.start_distance;
        scenario.strategy = config.strategy;
        scenario.physics = config.lift.physics;
        scenario.kin_noise = config.lift.kin_noise;
        scenario.vision_noise = config.lift.vision_noise;
        scenario.tactile_sensor = config.lift.sensor;
        scenario.model = model;
        scenario.feature_noise_std = config.lift.feature_noise_std;
        scenario.tick_budget = config.lift.tick_budget;

        for (TrialMode mode : modes) {
            for (int i = 0; i < trials; ++i) {
                std::uint64_t seed = hash_combine(config.master_seed, stable_hash(spec.name));
                seed = hash_combine(seed, stable_hash(to_string(mode)));
                seed = hash_combine(seed, static_cast<std::uint64_t>(i));
                const TrialResult result = run_lift_trial(scenario, mode, seed);
                report.rows.push_back({spec.name, to_string(mode), seed, result.success,
                                       result.failure_cause, result.ticks});
            }
        }
    }
    return report;
}

void write_lift_csv(const std::string& path, const LiftSuiteReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write lift csv: " + path);
    out << "scenario,mode,seed,success,failure_cause,ticks\n";
    for (const LiftRow& row : report.rows) {
        out << row.scenario << ',' << row.mode << ',' << row.seed << ','
            << (row.success ? 1 : 0) << ',' << row.failure_cause << ',' << row.ticks << '\n';
    }
}

LiftSuiteReport read_lift_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lift csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty csv");
    LiftSuiteReport report;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6)
            throw std::runtime_error(path + ": row " + std::to_string(row_no) +
                                     ": expected 6 fields, got " + std::to_string(fields.size()));
        LiftRow row;
        row.scenario = fields[0];
        row.mode = fields[1];
        row.seed = static_cast<std::uint64_t>(parse_int_field(fields[2], path, row_no));
        row.success = parse_int_field(fields[3], path, row_no) != 0;
        row.failure_cause = fields[4];
        row.ticks = static_cast<int>(parse_int_field(fields[5], path, row_no));
        report.rows.push_back(row);
    }
    if (report.rows.empty()) throw std::runtime_error(path + ": empty csv");
    return report;
}

double lift_success_rate(const LiftSuiteReport& report, const std::string& scenario,
                         TrialMode mode) {
    const std::string mode_name = to_string(mode);
    int total = 0;
    int wins = 0;
    for (const LiftRow& row : report.rows) {
        if (row.scenario != scenario || row.mode != mode_name) continue;
        ++total;
        wins += row.success ? 1 : 0;
    }
    return total == 0 ? 0.0 : static_cast<double>(wins) / total;
}

double lift_aggregate_rate(const LiftSuiteReport& report, TrialMode mode) {
    const std::vector<std::string> names = lift_scenario_names(report);
    if (names.empty()) return 0.0;
    double sum = 0.0;
    for (const std::string& name : names) sum += lift_success_rate(report, name, mode);
    return sum / names.size();
}

std::vector<std::string> lift_scenario_names(const LiftSuiteReport& report) {
    std::vector<std::string> names;
    for (const LiftRow& row : report.rows) {
        if (std::find(names.begin(), names.end(), row.scenario) == names.end())
            names.push_back(row.scenario);
    }
    return names;
}

TrainOutcome run_training(const ExperimentConfig& config, bool include_noncontact) {
    const DomeGeometry dome = make_dome(config.dome_radius, config.pin_count);
    Dataset dataset = generate_dataset(config.train.n_contact,
                                       include_noncontact ? config.train.n_noncontact : 0, dome,
                                       config.train.feature_noise_std,
                                       hash_combine(config.master_seed, stable_hash("dataset")));
    auto [train_set, test_set] = split(dataset, config.train.train_fraction);
    TrainConfig optimizer = config.train.optimizer;
    optimizer.seed = hash_combine(config.master_seed, stable_hash("optimizer"));
    TrainOutcome outcome{train(train_set, optimizer), {}};
    outcome.report = evaluate(outcome.model, test_set);
    return outcome;
}

namespace {

struct SeriesKey {
    std::string mode;
    std::string strategy;
    bool operator<(const SeriesKey& other) const {
        return std::tie(mode, strategy) < std::tie(other.mode, other.strategy);
    }
};

std::map<SeriesKey, std::map<double, std::pair<double, double>>> sweep_series(
    const SweepReport& report) {
    std::map<SeriesKey, std::map<double, std::pair<double, int>>> angle_acc;
    std::map<SeriesKey, std::map<double, std::pair<double, int>>> dist_acc;
    for (const SweepRow& row : report.rows) {
        const SeriesKey key{row.mode, row.strategy};
        auto& a = angle_acc[key][row.initial_angle_deg];
        a.first += row.final_angle_err_deg;
        a.second += 1;
        auto& d = dist_acc[key][row.initial_angle_deg];
        d.first += row.distance_err_mm;
        d.second += 1;
    }
    std::map<SeriesKey, std::map<double, std::pair<double, double>>> series;
    for (const auto& [key, per_angle] : angle_acc) {
        for (const auto& [angle, acc] : per_angle) {
            const auto& d = dist_acc[key][angle];
            series[key][angle] = {acc.first / acc.second, d.first / d.second};
        }
    }
    return series;
}

}  // namespace

std::string render_sweep_table(const SweepReport& report) {
    const auto series = sweep_series(report);
    std::set<double> angles;
    for (const SweepRow& row : report.rows) angles.insert(row.initial_angle_deg);

    std::ostringstream out;
    for (const bool distance : {false, true}) {
        out << (distance ? "MAE of distance D (mm)\n" : "MAE of angle (deg)\n");
        out << "angle_deg";
        for (const auto& [key, _] : series) out << "  " << key.mode << "/" << key.strategy;
        out << '\n';
        for (double angle : angles) {
            out << fmt(angle, "%9.1f");
            for (const auto& [key, per_angle] : series) {
                auto it = per_angle.find(angle);
                const std::size_t width = key.mode.size() + key.strategy.size() + 1;
                std::string cell = it == per_angle.end()
                                       ? std::string("-")
                                       : fmt(distance ? it->second.second : it->second.first,
                                             "%.3f");
                out << "  " << std::string(width > cell.size() ? width - cell.size() : 0, ' ')
                    << cell;
            }
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

std::string render_lift_table(const LiftSuiteReport& report) {
    std::ostringstream out;
    out << "scenario                         tactile   vision\n";
    for (const std::string& name : lift_scenario_names(report)) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-30s  %6.1f%%  %6.1f%%\n", name.c_str(),
                      100.0 * lift_success_rate(report, name, TrialMode::Tactile),
                      100.0 * lift_success_rate(report, name, TrialMode::Vision));
        out << line;
    }
    char line[128];
    std::snprintf(line, sizeof(line), "%-30s  %6.1f%%  %6.1f%%\n", "average",
                  100.0 * lift_aggregate_rate(report, TrialMode::Tactile),
                  100.0 * lift_aggregate_rate(report, TrialMode::Vision));
    out << line;
    return out.str();
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

void write_polyline_plot(const std::string& path, const std::string& title,
                         const std::vector<std::pair<std::string, std::map<double, double>>>& series) {
    double min_x = 1e300;
    double max_x = -1e300;
    double max_y = 0.0;
    for (const auto& [_, points] : series) {
        for (const auto& [x, y] : points) {
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
        }
    }
    if (max_y <= 0.0) max_y = 1.0;
    if (max_x <= min_x) max_x = min_x + 1.0;

    const double w = 640.0;
    const double h = 400.0;
    const double margin = 50.0;
    auto sx = [&](double x) { return margin + (x - min_x) / (max_x - min_x) * (w - 2 * margin); };
    auto sy = [&](double y) { return h - margin - y / max_y * (h - 2 * margin); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    out << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    out << "<text x='" << margin << "' y='" << margin - 8 << "' font-size='11'>" << fmt(max_y, "%.2f")
        << "</text>\n";
    int idx = 0;
    for (const auto& [name, points] : series) {
        const char* color = kSeriesColors[idx % 8];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : points) out << fmt(sx(x), "%.1f") << ',' << fmt(sy(y), "%.1f") << ' ';
        out << "'/>\n";
        out << "<text x='" << w - margin + 4 << "' y='" << 40 + 14 * idx
            << "' font-size='10' fill='" << color << "'>" << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

}  // namespace

void write_sweep_svg(const std::string& path, const SweepReport& report) {
    const auto series = sweep_series(report);
    std::vector<std::pair<std::string, std::map<double, double>>> angle_series;
    for (const auto& [key, per_angle] : series) {
        std::map<double, double> points;
        for (const auto& [angle, maes] : per_angle) points[angle] = maes.first;
        angle_series.emplace_back(key.mode + "/" + key.strategy, std::move(points));
    }
    write_polyline_plot(path, "final angle MAE (deg) vs initial angle", angle_series);
}

void write_lift_svg(const std::string& path, const LiftSuiteReport& report) {
    const auto names = lift_scenario_names(report);
    const double w = 640.0;
    const double h = 400.0;
    const double margin = 60.0;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2
        << "' y='20' text-anchor='middle' font-size='14'>lift success rate</text>\n";
    const double slot = (w - 2 * margin) / std::max<std::size_t>(1, names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double tact = lift_success_rate(report, names[i], TrialMode::Tactile);
        const double vis = lift_success_rate(report, names[i], TrialMode::Vision);
        const double x0 = margin + slot * i;
        const double bar = slot * 0.3;
        out << "<rect x='" << x0 << "' y='" << h - margin - tact * (h - 2 * margin) << "' width='"
            << bar << "' height='" << tact * (h - 2 * margin) << "' fill='#1f77b4'/>\n";
        out << "<rect x='" << x0 + bar + 4 << "' y='" << h - margin - vis * (h - 2 * margin)
            << "' width='" << bar << "' height='" << vis * (h - 2 * margin)
            << "' fill='#ff7f0e'/>\n";
        out << "<text x='" << x0 << "' y='" << h - margin + 14 << "' font-size='9'>" << names[i]
            << "</text>\n";
    }
    out << "<text x='" << w - margin << "' y='40' font-size='10' fill='#1f77b4'>tactile</text>\n";
    out << "<text x='" << w - margin << "' y='54' font-size='10' fill='#ff7f0e'>vision</text>\n";
    out << "</svg>\n";
}

AssertResult assert_sweep_trends(const SweepReport& report, bool regressor_mode_present) {
    std::ostringstream detail;
    bool ok = true;

    const std::vector<SweepStrategy> tactile_strategies{
        SweepStrategy::SelfRotation, SweepStrategy::ObjectRotation, SweepStrategy::MultiContact};
    const auto angle_mae =
        sweep_mae_by_abs_angle(report, SweepMode::Bumper, tactile_strategies, false);
    const auto dist_mae =
        sweep_mae_by_abs_angle(report, SweepMode::Bumper, tactile_strategies, true);
    std::vector<double> levels;
    std::vector<double> a_vals;
    std::vector<double> d_vals;
    for (const auto& [angle, mae] : angle_mae) {
        levels.push_back(angle);
        a_vals.push_back(mae);
        d_vals.push_back(dist_mae.at(angle));
    }
    const double rho_angle = spearman(levels, a_vals);
    const double rho_dist = spearman(levels, d_vals);
    detail << "bumper spearman angle=" << fmt(rho_angle, "%.3f")
           << " dist=" << fmt(rho_dist, "%.3f");
    if (rho_angle < 0.8 || rho_dist < 0.8) ok = false;
    const double top = levels.back();
    detail << "; MAE@" << fmt(top, "%.0f") << " angle=" << fmt(a_vals.back(), "%.3f")
           << " dist=" << fmt(d_vals.back(), "%.3f");
    if (a_vals.back() > 5.0 || d_vals.back() > 50.0) ok = false;

    if (regressor_mode_present) {
        const auto multi = sweep_mae_by_abs_angle(report, SweepMode::Regressor,
                                                  {SweepStrategy::MultiContact}, false);
        const auto single = sweep_mae_by_abs_angle(
            report, SweepMode::Regressor,
            {SweepStrategy::SelfRotation, SweepStrategy::ObjectRotation}, false);
        for (const auto& [angle, multi_mae] : multi) {
            if (angle < 10.0) continue;
            const double single_mae = single.at(angle);
            detail << "; |" << fmt(angle, "%.0f") << "| multi=" << fmt(multi_mae, "%.3f")
                   << " single=" << fmt(single_mae, "%.3f");
            if (!(multi_mae < single_mae)) ok = false;
        }
    }
    return {ok, detail.str()};
}

AssertResult assert_lift_trends(const LiftSuiteReport& report) {
    std::ostringstream detail;
    bool ok = true;
    const auto names = lift_scenario_names(report);
    double worst_gap = 1.0;
    double largest_gap = -1.0;
    std::string largest_name;
    for (const std::string& name : names) {
        const double tact = lift_success_rate(report, name, TrialMode::Tactile);
        const double vis = lift_success_rate(report, name, TrialMode::Vision);
        detail << name << " tactile=" << fmt(100 * tact, "%.0f")
               << "% vision=" << fmt(100 * vis, "%.0f") << "%; ";
        if (tact < vis) ok = false;
        worst_gap = std::min(worst_gap, tact - vis);
        if (tact - vis > largest_gap) {
            largest_gap = tact - vis;
            largest_name = name;
        }
    }
    const double agg_tact = lift_aggregate_rate(report, TrialMode::Tactile);
    const double agg_vis = lift_aggregate_rate(report, TrialMode::Vision);
    detail << "aggregate tactile=" << fmt(100 * agg_tact, "%.1f")
           << "% vision=" << fmt(100 * agg_vis, "%.1f") << "%";
    if (agg_tact - agg_vis < 0.20) ok = false;
    if (!names.empty() && largest_name != names.back()) {
        ok = false;
        detail << "; largest gap on " << largest_name << " not " << names.back();
    }
    return {ok, detail.str()};
}

}  // namespace taclift
