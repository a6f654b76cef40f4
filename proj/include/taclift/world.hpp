#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "taclift/grasp.hpp"
#include "taclift/regressor.hpp"
#include "taclift/rng.hpp"
#include "taclift/strategies.hpp"
#include "taclift/tactile.hpp"

namespace taclift {

// Dome compliance limit: motion into a face is clipped so ground-truth
// penetration never exceeds this.
constexpr double kMaxPenetration = 5.0;  // mm

enum class SensorType { Bumper, Regressor };

struct KinematicNoise {
    double k_trans = 0.0;  // std of executed/commanded distance ratio
    double k_rot = 0.0;    // std of executed/commanded rotation ratio
};

struct VisionNoise {
    double sigma_pos = 0.0;  // mm, per axis
    double sigma_ang = 0.0;  // deg
    Vector2d bias_pos{0.0, 0.0};
    double bias_ang = 0.0;
};

struct Message {
    enum class Kind { Ready, Done };
    int from = 0;
    Kind kind = Kind::Ready;
    int tick_stamp = 0;
};

const char* to_string(Message::Kind kind);

struct LogEvent {
    int tick = 0;
    int robot = -1;  // -1 for world-level events
    std::string kind;
    std::string payload;
};

struct RobotConfig {
    Pose2 start_pose;
    DomeGeometry dome;
    SensorType sensor = SensorType::Bumper;
    const RegressorModel* model = nullptr;  // required for Regressor
    double feature_noise_std = 0.0;
};

struct WorldConfig {
    BoxObject box;
    Pose2 box_pose;
    std::array<RobotConfig, 2> robots;
    KinematicNoise kin_noise;
    std::uint64_t seed = 0;
};

// Ground-truth alignment of a robot against the face it addresses; the
// distance term is measured on the infinite face line so off-face misses
// still yield a number.
struct AlignmentMetrics {
    double angle_err_deg = 0.0;
    double distance_err_mm = 0.0;
    bool in_contact = false;
    double depth_mm = 0.0;
};

// Deterministic quasi-static arena: a fixed box, two robots with noisy
// kinematics, per-robot FIFO mailboxes delivered at the start of the
// recipient's next tick, and an append-only event log.
class World {
public:
    explicit World(const WorldConfig& config);

    // Executes with multiplicative Gaussian noise; translations and arcs
    // are clipped so penetration stays within kMaxPenetration.
    void apply_command(int robot_id, const RobotCommand& cmd);

    // What the robot's sensor reports. Bumper mode returns the exact depth
    // and angle; Regressor mode runs simulated pin features through the
    // model. The tangential offset is never observed.
    ContactState read_sensor(int robot_id);

    // Exact contact state against the contacting face (accumulated shear
    // included); non-contact state against the facing face otherwise.
    ContactState ground_truth_contact(int robot_id) const;
    AlignmentMetrics alignment_metrics(int robot_id) const;

    // True box pose plus bias plus Gaussian noise from the oracle stream.
    Pose2 vision_pose_estimate(const VisionNoise& noise);

    void send(int from_robot, Message::Kind kind);
    // Drains messages delivered to this robot.
    std::vector<Message> receive(int robot_id);
    bool peer_message_arrived(int robot_id, Message::Kind kind) const;

    // Delivers this step's sends and advances the tick.
    void end_step();
    int tick() const { return tick_; }

    const Pose2& robot_pose(int robot_id) const;
    const Pose2& box_pose() const { return box_pose_; }
    const BoxObject& box() const { return box_; }
    const DomeGeometry& dome(int robot_id) const;

    bool robot_lifted(int robot_id) const;
    // Verdict evaluated when the second platform comes up.
    const std::optional<LiftVerdict>& lift_verdict() const { return lift_verdict_; }
    void set_physics(const PhysicsParams& physics) { physics_ = physics; }

    const std::vector<LogEvent>& log() const { return log_; }
    std::string export_log() const;
    void log_event(int robot, std::string kind, std::string payload);

private:
    struct Robot {
        Pose2 pose;
        DomeGeometry dome;
        SensorType sensor = SensorType::Bumper;
        const RegressorModel* model = nullptr;
        double feature_noise_std = 0.0;
        Rng kin_rng;
        Rng feat_rng;
        bool lifted = false;
        // contact shear tracking
        bool was_in_contact = false;
        int contact_face = -1;
        double contact_foot_along = 0.0;
        double shear = 0.0;
        std::deque<Message> inbox;
        std::vector<Message> outgoing;
    };

    void move_robot(int robot_id, const Pose2& target, double path_hint_mm);
    void refresh_contact(int robot_id);
    int contacting_face(const Pose2& pose, const DomeGeometry& dome) const;
    int facing_face(const Pose2& pose) const;
    double max_penetration(const Pose2& pose, const DomeGeometry& dome) const;
    void evaluate_lift();

    BoxObject box_;
    Pose2 box_pose_;
    std::vector<LineSegment> faces_;  // world frame
    std::array<Robot, 2> robots_;
    KinematicNoise kin_noise_;
    PhysicsParams physics_;
    Rng oracle_rng_;
    int tick_ = 0;
    std::optional<LiftVerdict> lift_verdict_;
    std::vector<LogEvent> log_;
};

enum class TrialMode { Tactile, Vision };

const char* to_string(TrialMode mode);

struct LiftScenario {
    std::string name = "empty_box";
    BoxObject box;
    double start_distance = 1100.0;  // mm from box centre, both sides
    StrategyParams strategy;
    PhysicsParams physics;
    KinematicNoise kin_noise;
    VisionNoise vision_noise;
    SensorType tactile_sensor = SensorType::Bumper;
    const RegressorModel* model = nullptr;
    double feature_noise_std = 0.02;
    std::optional<double> fixed_yaw_deg;  // drawn from U[-25, 25] when unset
    int tick_budget = 10000;
};

struct TrialResult {
    bool success = false;
    std::string failure_cause = "none";
    int contacts_used = 0;
    std::array<double, 2> final_angles{0.0, 0.0};
    std::array<double, 2> final_depths{0.0, 0.0};
    std::array<double, 2> tangential_offsets{0.0, 0.0};
    int ticks = 0;
    std::string event_log;
};

// Runs both controllers' lift trees to resolution or tick budget.
// Deterministic under (scenario, mode, seed).
TrialResult run_lift_trial(const LiftScenario& scenario, TrialMode mode, std::uint64_t seed);

}  // namespace taclift
