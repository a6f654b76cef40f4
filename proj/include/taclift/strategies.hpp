#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "taclift/behavior_tree.hpp"
#include "taclift/geometry.hpp"
#include "taclift/grasp.hpp"
#include "taclift/tactile.hpp"

namespace taclift {

struct StrategyParams {
    double angle_threshold = 2.0;     // deg, adjustment stops below this
    double depth_target = 2.6;        // mm
    double proportional_gain = 0.8;   // rotation command = -gain * angle
    int max_contacts = 8;
    double backoff_distance = 30.0;   // mm retreat between contacts
    double approach_speed = 10.0;     // mm per motion step
    double approach_travel_budget = 3000.0;  // mm per approach leg
    double depth_band = 0.2;          // mm, servo acceptance half-width
    int max_servo_moves = 20;
};

void validate(const StrategyParams& params);

struct RobotCommand {
    enum class Kind { Translate, Rotate, RotateAboutPoint, Lift, Lower, Stop };

    Kind kind = Kind::Stop;
    Vector2d translation{0.0, 0.0};  // robot frame, mm
    double rotation_deg = 0.0;
    Vector2d centre{0.0, 0.0};  // world, rotation pivot

    static RobotCommand translate(double dx, double dy);
    static RobotCommand rotate(double deg);
    static RobotCommand rotate_about(const Vector2d& centre, double deg);
    static RobotCommand lift();
    static RobotCommand lower();
    static RobotCommand stop();
};

const char* to_string(RobotCommand::Kind kind);

// One proportional correction rotating the robot in place. Stop below the
// angle threshold; throws "no contact" on a non-contacting estimate.
RobotCommand self_rotation_step(const ContactState& estimate, const StrategyParams& params);

// As above but revolving about the (externally estimated) object centre.
RobotCommand object_rotation_step(const ContactState& estimate, const Vector2d& object_centre_hint,
                                  const StrategyParams& params);

using SensorFn = std::function<ContactState()>;
using MoveFn = std::function<void(const RobotCommand&)>;

struct AdjustOutcome {
    int contacts_used = 0;
    double final_angle_est = 0.0;  // deg
    bool converged = false;
};

struct ServoOutcome {
    double final_depth_est = 0.0;  // mm
    int moves = 0;
};

// Incremental controllers issuing at most one robot command per step; shared
// by the synchronous entry points below and the lift behavior tree.
class AdjustMachine {
public:
    AdjustMachine(Vector2d object_centre_hint, StrategyParams params);

    bt::Status step(const SensorFn& sensor, const MoveFn& move);
    const AdjustOutcome& outcome() const { return outcome_; }
    bool object_not_found() const { return object_not_found_; }

private:
    enum class Phase { Approach, Backoff, Rotate, Done, Failed };

    Vector2d centre_hint_;
    StrategyParams params_;
    Phase phase_ = Phase::Approach;
    AdjustOutcome outcome_;
    double leg_travel_ = 0.0;
    double last_angle_ = 0.0;
    bool object_not_found_ = false;
};

class ServoMachine {
public:
    explicit ServoMachine(StrategyParams params);

    bt::Status step(const SensorFn& sensor, const MoveFn& move);
    const ServoOutcome& outcome() const { return outcome_; }
    bool oscillated() const { return oscillated_; }

private:
    StrategyParams params_;
    ServoOutcome outcome_;
    double step_cap_;
    double prev_error_ = 0.0;
    bool have_prev_error_ = false;
    bool done_ = false;
    bool oscillated_ = false;
};

// Contact the object repeatedly, backing off and revolving about the centre
// hint until the estimated angle falls below the threshold. Throws
// "object not found" when an approach leg exhausts its travel budget.
AdjustOutcome multi_contact_adjust(const SensorFn& sensor, const MoveFn& move,
                                   const Vector2d& object_centre_hint,
                                   const StrategyParams& params);

// Advance/retreat until the depth estimate enters
// [depth_target - depth_band, depth_target + depth_band]. Throws
// "servo oscillation" beyond max_servo_moves moves.
ServoOutcome depth_servo(const SensorFn& sensor, const MoveFn& move,
                         const StrategyParams& params);

// Open-loop plan from a single vision estimate of the box pose: revolve
// about the estimated centre onto the estimated face normal, face the
// surface, translate to a standoff, then advance a precomputed distance for
// the target depth. No sensing after emission; translations are emitted in
// approach_speed legs.
std::vector<RobotCommand> vision_adjust_plan(const Pose2& robot_pose, const Pose2& box_estimate,
                                             const BoxObject& box, double dome_radius,
                                             const StrategyParams& params);

// Leaf callback names used by the lift trees; the executing controller
// registers all of them.
namespace lift_leaves {
inline constexpr const char* kAdjustStep = "adjust_step";
inline constexpr const char* kServoStep = "servo_step";
inline constexpr const char* kVisionStep = "vision_step";
inline constexpr const char* kSendReady = "send_ready";
inline constexpr const char* kAwaitPeerReady = "await_peer_ready";
inline constexpr const char* kLift = "lift";
inline constexpr const char* kSendDone = "send_done";
inline constexpr const char* kAwaitPeerDone = "await_peer_done";
inline constexpr const char* kLower = "lower";
}  // namespace lift_leaves

enum class LiftTreeVariant { Tactile, Vision };

// Coordination tree: adjust (or execute the vision plan), servo, exchange
// READY over the mailbox, lift concurrently, exchange DONE, lower. The
// await leaves return Running until the peer message arrives, so a silent
// peer leaves the tree Running.
std::unique_ptr<bt::Node> build_lift_tree(int role, const StrategyParams& params,
                                          LiftTreeVariant variant, const bt::Registry& registry);

}  // namespace taclift
