#include "taclift/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taclift {

void validate(const StrategyParams& params) {
    const bool positive = params.angle_threshold > 0.0 && params.depth_target > 0.0 &&
                          params.proportional_gain > 0.0 && params.max_contacts > 0 &&
                          params.backoff_distance > 0.0 && params.approach_speed > 0.0 &&
                          params.approach_travel_budget > 0.0 && params.depth_band > 0.0 &&
                          params.max_servo_moves > 0;
    if (!positive) throw std::invalid_argument("strategy params must be positive");
    if (params.angle_threshold >= 25.0)
        throw std::invalid_argument("angle_threshold must be below 25 deg");
    if (params.depth_target < 1.0 || params.depth_target > 5.0)
        throw std::invalid_argument("depth_target must lie in [1, 5] mm");
}

RobotCommand RobotCommand::translate(double dx, double dy) {
    RobotCommand cmd;
    cmd.kind = Kind::Translate;
    cmd.translation = {dx, dy};
    return cmd;
}

RobotCommand RobotCommand::rotate(double deg) {
    RobotCommand cmd;
    cmd.kind = Kind::Rotate;
    cmd.rotation_deg = deg;
    return cmd;
}

RobotCommand RobotCommand::rotate_about(const Vector2d& centre, double deg) {
    RobotCommand cmd;
    cmd.kind = Kind::RotateAboutPoint;
    cmd.centre = centre;
    cmd.rotation_deg = deg;
    return cmd;
}

RobotCommand RobotCommand::lift() {
    RobotCommand cmd;
    cmd.kind = Kind::Lift;
    return cmd;
}

RobotCommand RobotCommand::lower() {
    RobotCommand cmd;
    cmd.kind = Kind::Lower;
    return cmd;
}

RobotCommand RobotCommand::stop() { return {}; }

const char* to_string(RobotCommand::Kind kind) {
    switch (kind) {
        case RobotCommand::Kind::Translate: return "translate";
        case RobotCommand::Kind::Rotate: return "rotate";
        case RobotCommand::Kind::RotateAboutPoint: return "rotate_about_point";
        case RobotCommand::Kind::Lift: return "lift";
        case RobotCommand::Kind::Lower: return "lower";
        case RobotCommand::Kind::Stop: return "stop";
    }
    return "?";
}

RobotCommand self_rotation_step(const ContactState& estimate, const StrategyParams& params) {
    if (!estimate.in_contact) throw std::runtime_error("no contact");
    if (std::fabs(estimate.angle) < params.angle_threshold) return RobotCommand::stop();
    return RobotCommand::rotate(-params.proportional_gain * estimate.angle);
}

RobotCommand object_rotation_step(const ContactState& estimate, const Vector2d& object_centre_hint,
                                  const StrategyParams& params) {
    if (!estimate.in_contact) throw std::runtime_error("no contact");
    if (!object_centre_hint.allFinite()) throw std::invalid_argument("non-finite centre hint");
    if (std::fabs(estimate.angle) < params.angle_threshold) return RobotCommand::stop();
    return RobotCommand::rotate_about(object_centre_hint, -params.proportional_gain * estimate.angle);
}

AdjustMachine::AdjustMachine(Vector2d object_centre_hint, StrategyParams params)
    : centre_hint_(std::move(object_centre_hint)), params_(std::move(params)) {
    validate(params_);
}

bt::Status AdjustMachine::step(const SensorFn& sensor, const MoveFn& move) {
    switch (phase_) {
        case Phase::Done:
            return bt::Status::Success;
        case Phase::Failed:
            return bt::Status::Failure;
        case Phase::Approach: {
            const ContactState estimate = sensor();
            if (!estimate.in_contact) {
                if (leg_travel_ >= params_.approach_travel_budget) {
                    object_not_found_ = true;
                    phase_ = Phase::Failed;
                    return bt::Status::Failure;
                }
                move(RobotCommand::translate(params_.approach_speed, 0.0));
                leg_travel_ += params_.approach_speed;
                return bt::Status::Running;
            }
            ++outcome_.contacts_used;
            outcome_.final_angle_est = estimate.angle;
            if (std::fabs(estimate.angle) < params_.angle_threshold) {
                outcome_.converged = true;
                phase_ = Phase::Done;
                return bt::Status::Success;
            }
            if (outcome_.contacts_used >= params_.max_contacts) {
                phase_ = Phase::Failed;
                return bt::Status::Failure;
            }
            last_angle_ = estimate.angle;
            phase_ = Phase::Backoff;
            return bt::Status::Running;
        }
        case Phase::Backoff:
            move(RobotCommand::translate(-params_.backoff_distance, 0.0));
            phase_ = Phase::Rotate;
            return bt::Status::Running;
        case Phase::Rotate:
            move(RobotCommand::rotate_about(centre_hint_, -params_.proportional_gain * last_angle_));
            phase_ = Phase::Approach;
            leg_travel_ = 0.0;
            return bt::Status::Running;
    }
    throw std::logic_error("unreachable adjust phase");
}

ServoMachine::ServoMachine(StrategyParams params)
    : params_(std::move(params)), step_cap_(params_.approach_speed) {
    validate(params_);
}

bt::Status ServoMachine::step(const SensorFn& sensor, const MoveFn& move) {
    if (done_) return bt::Status::Success;
    if (oscillated_) return bt::Status::Failure;

    const ContactState estimate = sensor();
    const double depth = estimate.in_contact ? estimate.depth : 0.0;
    const double error = params_.depth_target - depth;
    outcome_.final_depth_est = depth;

    if (std::fabs(error) <= params_.depth_band) {
        done_ = true;
        return bt::Status::Success;
    }
    if (outcome_.moves >= params_.max_servo_moves) {
        oscillated_ = true;
        return bt::Status::Failure;
    }

    // Halve the stride whenever the error changes sign, so the approach
    // decays instead of hopping across the band.
    if (have_prev_error_ && error * prev_error_ < 0.0) step_cap_ = std::max(0.5 * step_cap_, 0.1);
    prev_error_ = error;
    have_prev_error_ = true;

    double advance;
    if (!estimate.in_contact) {
        advance = params_.approach_speed;  // not touching yet, close in
    } else if (depth > 5.0) {
        advance = error;  // overshot the compliance limit, pull straight back
    } else {
        advance = std::clamp(error, -step_cap_, step_cap_);
    }
    move(RobotCommand::translate(advance, 0.0));
    ++outcome_.moves;
    return bt::Status::Running;
}

AdjustOutcome multi_contact_adjust(const SensorFn& sensor, const MoveFn& move,
                                   const Vector2d& object_centre_hint,
                                   const StrategyParams& params) {
    AdjustMachine machine(object_centre_hint, params);
    bt::Status status = bt::Status::Running;
    while (status == bt::Status::Running) status = machine.step(sensor, move);
    if (machine.object_not_found()) throw std::runtime_error("object not found");
    return machine.outcome();
}

ServoOutcome depth_servo(const SensorFn& sensor, const MoveFn& move,
                         const StrategyParams& params) {
    ServoMachine machine(params);
    bt::Status status = bt::Status::Running;
    while (status == bt::Status::Running) status = machine.step(sensor, move);
    if (machine.oscillated()) throw std::runtime_error("servo oscillation");
    return machine.outcome();
}

namespace {

// Picks the estimated face most exposed to the robot.
LineSegment estimated_facing_face(const Pose2& robot_pose, const Pose2& box_estimate,
                                  const BoxObject& box) {
    const Vector2d to_robot = (robot_pose.position() - box_estimate.position()).normalized();
    LineSegment best;
    double best_dot = -2.0;
    for (const LineSegment& face : box_faces(box, box_estimate)) {
        const double d = face.outward_normal.dot(to_robot);
        if (d > best_dot) {
            best_dot = d;
            best = face;
        }
    }
    return best;
}

void emit_legs(std::vector<RobotCommand>& plan, double distance, double leg) {
    while (distance > 1e-9) {
        const double step = std::min(distance, leg);
        plan.push_back(RobotCommand::translate(step, 0.0));
        distance -= step;
    }
}

}  // namespace

std::vector<RobotCommand> vision_adjust_plan(const Pose2& robot_pose, const Pose2& box_estimate,
                                             const BoxObject& box, double dome_radius,
                                             const StrategyParams& params) {
    validate(params);
    if (!std::isfinite(box_estimate.x) || !std::isfinite(box_estimate.y))
        throw std::invalid_argument("non-finite vision estimate");

    const LineSegment face = estimated_facing_face(robot_pose, box_estimate, box);
    const Vector2d n = face.outward_normal;
    const Vector2d centre = box_estimate.position();

    std::vector<RobotCommand> plan;

    // Revolve onto the estimated face-normal ray.
    const Vector2d radial = robot_pose.position() - centre;
    const double revolve = signed_angle_deg(radial, n);
    plan.push_back(RobotCommand::rotate_about(centre, revolve));

    // Face the surface.
    const double heading_after = normalize_heading_deg(robot_pose.heading + revolve);
    const Vector2d facing = -n;
    const double turn =
        signed_angle_deg(rotate_vector(heading_after, {1.0, 0.0}), facing);
    plan.push_back(RobotCommand::rotate(turn));

    // March to the standoff, then a final approach sized for the target depth.
    const double standoff_gap = params.backoff_distance;
    const Vector2d standoff_point = face.midpoint() + n * (dome_radius + standoff_gap);
    const double to_standoff = radial.norm() - (standoff_point - centre).norm();
    emit_legs(plan, to_standoff, params.approach_speed);
    emit_legs(plan, standoff_gap + params.depth_target, params.approach_speed);
    return plan;
}

std::unique_ptr<bt::Node> build_lift_tree(int role, const StrategyParams& params,
                                          LiftTreeVariant variant, const bt::Registry& registry) {
    if (role != 0 && role != 1) throw std::invalid_argument("role must be 0 or 1");
    validate(params);

    auto leaf = [&registry](const char* name) {
        auto it = registry.actions.find(name);
        if (it == registry.actions.end())
            throw std::invalid_argument(std::string("unregistered lift leaf: ") + name);
        return bt::Node::action(name, it->second);
    };

    std::vector<std::unique_ptr<bt::Node>> seq;
    if (variant == LiftTreeVariant::Tactile) {
        seq.push_back(leaf(lift_leaves::kAdjustStep));
        seq.push_back(leaf(lift_leaves::kServoStep));
    } else {
        seq.push_back(leaf(lift_leaves::kVisionStep));
    }
    seq.push_back(leaf(lift_leaves::kSendReady));
    seq.push_back(leaf(lift_leaves::kAwaitPeerReady));

    std::vector<std::unique_ptr<bt::Node>> lift_children;
    lift_children.push_back(leaf(lift_leaves::kLift));
    seq.push_back(bt::Node::parallel(std::move(lift_children), 1));

    seq.push_back(leaf(lift_leaves::kSendDone));
    seq.push_back(leaf(lift_leaves::kAwaitPeerDone));
    seq.push_back(leaf(lift_leaves::kLower));
    return bt::Node::sequence(std::move(seq));
}

}  // namespace taclift
