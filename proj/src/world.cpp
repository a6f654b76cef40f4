#include "taclift/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace taclift {

namespace {

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

const char* to_string(Message::Kind kind) {
    return kind == Message::Kind::Ready ? "READY" : "DONE";
}

const char* to_string(TrialMode mode) { return mode == TrialMode::Tactile ? "tactile" : "vision"; }

World::World(const WorldConfig& config)
    : box_(config.box), box_pose_(config.box_pose), kin_noise_(config.kin_noise) {
    faces_ = box_faces(box_, box_pose_);
    Rng root(config.seed);
    oracle_rng_ = root.fork("oracle");
    for (int r = 0; r < 2; ++r) {
        Robot& robot = robots_[r];
        const RobotConfig& rc = config.robots[r];
        robot.pose = rc.start_pose;
        robot.dome = rc.dome;
        robot.sensor = rc.sensor;
        robot.model = rc.model;
        robot.feature_noise_std = rc.feature_noise_std;
        if (robot.sensor == SensorType::Regressor && robot.model == nullptr)
            throw std::invalid_argument("regressor sensor needs a model");
        const std::string tag = "robot" + std::to_string(r);
        robot.kin_rng = root.fork(tag + "/kin");
        robot.feat_rng = root.fork(tag + "/feat");
        refresh_contact(r);
    }
}

const Pose2& World::robot_pose(int robot_id) const { return robots_.at(robot_id).pose; }

const DomeGeometry& World::dome(int robot_id) const { return robots_.at(robot_id).dome; }

bool World::robot_lifted(int robot_id) const { return robots_.at(robot_id).lifted; }

int World::contacting_face(const Pose2& pose, const DomeGeometry& dome) const {
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
        if (contact_geometry(pose, faces_[f], dome).in_contact) return f;
    }
    return -1;
}

int World::facing_face(const Pose2& pose) const {
    const Vector2d dir = (pose.position() - box_pose_.position()).normalized();
    int best = 0;
    double best_dot = -2.0;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
        const double d = faces_[f].outward_normal.dot(dir);
        if (d > best_dot) {
            best_dot = d;
            best = f;
        }
    }
    return best;
}

double World::max_penetration(const Pose2& pose, const DomeGeometry& dome) const {
    // Collision uses the dome sphere regardless of where the axis points.
    double worst = 0.0;
    for (const LineSegment& face : faces_) {
        const double s = (pose.position() - face.a).dot(face.outward_normal);
        if (s >= dome.radius) continue;
        const Vector2d foot = pose.position() - s * face.outward_normal;
        const double along = (foot - face.a).dot(face.tangent());
        if (along < 0.0 || along > face.length()) continue;
        worst = std::max(worst, dome.radius - s);
    }
    return worst;
}

void World::move_robot(int robot_id, const Pose2& target, double path_hint_mm) {
    Robot& robot = robots_[robot_id];
    const Pose2 start = robot.pose;
    const double dh = normalize_heading_deg(target.heading - start.heading);
    auto pose_at = [&](double alpha) {
        return Pose2(start.x + alpha * (target.x - start.x), start.y + alpha * (target.y - start.y),
                     start.heading + alpha * dh);
    };

    // Walk the path in short increments so a long command cannot tunnel
    // through a face, then bisect onto the compliance boundary.
    const int steps = std::max(1, static_cast<int>(std::ceil(path_hint_mm / 2.0)));
    double good = 0.0;
    double bad = -1.0;
    for (int i = 1; i <= steps; ++i) {
        const double alpha = static_cast<double>(i) / steps;
        if (max_penetration(pose_at(alpha), robot.dome) > kMaxPenetration) {
            bad = alpha;
            break;
        }
        good = alpha;
    }
    double alpha = good;
    if (bad >= 0.0) {
        double lo = good;
        double hi = bad;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (max_penetration(pose_at(mid), robot.dome) > kMaxPenetration) hi = mid;
            else lo = mid;
        }
        alpha = lo;
    }
    robot.pose = pose_at(alpha);
    refresh_contact(robot_id);
}

void World::refresh_contact(int robot_id) {
    Robot& robot = robots_[robot_id];
    const int face_idx = contacting_face(robot.pose, robot.dome);
    if (face_idx < 0) {
        robot.was_in_contact = false;
        robot.contact_face = -1;
        robot.shear = 0.0;
        return;
    }
    const LineSegment& face = faces_[face_idx];
    const double s = (robot.pose.position() - face.a).dot(face.outward_normal);
    const Vector2d foot = robot.pose.position() - s * face.outward_normal;
    const double along = (foot - face.a).dot(face.tangent());
    if (robot.was_in_contact && robot.contact_face == face_idx) {
        robot.shear += along - robot.contact_foot_along;
    } else {
        robot.shear = 0.0;  // first touch
    }
    robot.was_in_contact = true;
    robot.contact_face = face_idx;
    robot.contact_foot_along = along;
}

ContactState World::ground_truth_contact(int robot_id) const {
    const Robot& robot = robots_.at(robot_id);
    const int face_idx =
        robot.contact_face >= 0 ? robot.contact_face : facing_face(robot.pose);
    ContactState state = contact_geometry(robot.pose, faces_[face_idx], robot.dome);
    if (state.in_contact) state.shear = robot.shear;
    return state;
}

AlignmentMetrics World::alignment_metrics(int robot_id) const {
    const Robot& robot = robots_.at(robot_id);
    const int face_idx =
        robot.contact_face >= 0 ? robot.contact_face : facing_face(robot.pose);
    const LineSegment& face = faces_[face_idx];

    AlignmentMetrics metrics;
    const double s = (robot.pose.position() - face.a).dot(face.outward_normal);
    const Vector2d foot = robot.pose.position() - s * face.outward_normal;
    metrics.distance_err_mm = (foot - face.midpoint()).dot(face.tangent());
    metrics.angle_err_deg = signed_angle_deg(-face.outward_normal, robot.pose.direction());
    const ContactState state = contact_geometry(robot.pose, face, robot.dome);
    metrics.in_contact = state.in_contact;
    metrics.depth_mm = state.depth;
    return metrics;
}

ContactState World::read_sensor(int robot_id) {
    Robot& robot = robots_.at(robot_id);
    const ContactState truth = ground_truth_contact(robot_id);
    ContactState estimate;
    if (robot.sensor == SensorType::Bumper) {
        estimate.depth = truth.depth;
        estimate.angle = truth.angle;
        estimate.in_contact = truth.in_contact;
        return estimate;
    }
    FeatureVector features = pin_compressions(truth, robot.dome);
    if (robot.feature_noise_std > 0.0) {
        for (double& c : features.compressions)
            c = std::max(0.0, c + robot.feat_rng.normal(0.0, robot.feature_noise_std));
        for (double& l : features.lateral_shifts)
            l += robot.feat_rng.normal(0.0, robot.feature_noise_std);
    }
    const Prediction pred = predict(*robot.model, features);
    estimate.depth = pred.depth;
    estimate.angle = pred.angle;
    estimate.in_contact = is_contact(pred.depth);
    return estimate;
}

Pose2 World::vision_pose_estimate(const VisionNoise& noise) {
    const double x = box_pose_.x + noise.bias_pos.x() + oracle_rng_.normal(0.0, noise.sigma_pos);
    const double y = box_pose_.y + noise.bias_pos.y() + oracle_rng_.normal(0.0, noise.sigma_pos);
    const double heading =
        box_pose_.heading + noise.bias_ang + oracle_rng_.normal(0.0, noise.sigma_ang);
    return {x, y, heading};
}

void World::apply_command(int robot_id, const RobotCommand& cmd) {
    Robot& robot = robots_.at(robot_id);
    switch (cmd.kind) {
        case RobotCommand::Kind::Translate: {
            const double mag = cmd.translation.norm();
            const double scale = 1.0 + robot.kin_rng.normal(0.0, kin_noise_.k_trans);
            const Vector2d disp = rotate_vector(robot.pose.heading, cmd.translation) * scale;
            const Pose2 target(robot.pose.x + disp.x(), robot.pose.y + disp.y(),
                               robot.pose.heading);
            move_robot(robot_id, target, mag * std::fabs(scale));
            log_event(robot_id, "translate",
                      "dx=" + format_num(cmd.translation.x()) +
                          ";dy=" + format_num(cmd.translation.y()) +
                          ";scale=" + format_num(scale));
            break;
        }
        case RobotCommand::Kind::Rotate: {
            const double executed =
                cmd.rotation_deg * (1.0 + robot.kin_rng.normal(0.0, kin_noise_.k_rot));
            robot.pose =
                Pose2(robot.pose.x, robot.pose.y, robot.pose.heading + executed);
            refresh_contact(robot_id);
            log_event(robot_id, "rotate",
                      "deg=" + format_num(cmd.rotation_deg) + ";executed=" + format_num(executed));
            break;
        }
        case RobotCommand::Kind::RotateAboutPoint: {
            const double executed =
                cmd.rotation_deg * (1.0 + robot.kin_rng.normal(0.0, kin_noise_.k_rot));
            const Vector2d radial = robot.pose.position() - cmd.centre;
            const Vector2d moved = cmd.centre + rotate_vector(executed, radial);
            const Pose2 target(moved.x(), moved.y(), robot.pose.heading + executed);
            const double arc = radial.norm() * std::fabs(deg_to_rad(executed));
            move_robot(robot_id, target, arc);
            log_event(robot_id, "rotate_about",
                      "cx=" + format_num(cmd.centre.x()) + ";cy=" + format_num(cmd.centre.y()) +
                          ";deg=" + format_num(cmd.rotation_deg) +
                          ";executed=" + format_num(executed));
            break;
        }
        case RobotCommand::Kind::Lift: {
            const ContactState truth = ground_truth_contact(robot_id);
            robot.lifted = true;
            log_event(robot_id, "lift", truth.in_contact ? "contact" : "");
            if (!truth.in_contact) log_event(robot_id, "lift_failed", "no contact");
            if (robots_[0].lifted && robots_[1].lifted && !lift_verdict_) evaluate_lift();
            break;
        }
        case RobotCommand::Kind::Lower:
            robot.lifted = false;
            log_event(robot_id, "lower", "");
            break;
        case RobotCommand::Kind::Stop:
            log_event(robot_id, "stop", "");
            break;
    }
}

void World::evaluate_lift() {
    ContactSpec specs[2];
    for (int r = 0; r < 2; ++r) {
        const Robot& robot = robots_[r];
        const int face_idx =
            robot.contact_face >= 0 ? robot.contact_face : facing_face(robot.pose);
        const LineSegment& face = faces_[face_idx];
        const ContactState truth = ground_truth_contact(r);
        const double s = (robot.pose.position() - face.a).dot(face.outward_normal);
        const Vector2d foot = robot.pose.position() - s * face.outward_normal;
        ContactSpec spec;
        spec.point = rotate_vector(-box_pose_.heading, foot - box_pose_.position());
        spec.inward_normal = rotate_vector(-box_pose_.heading, -face.outward_normal);
        spec.depth = truth.in_contact ? truth.depth : 0.0;
        spec.tangential_offset = truth.tangential_offset;
        specs[r] = spec;
    }
    lift_verdict_ = lift_outcome(specs[0], specs[1], box_, physics_);
    log_event(-1, "lift_verdict",
              lift_verdict_->success ? "success" : to_string(lift_verdict_->cause));
}

void World::send(int from_robot, Message::Kind kind) {
    Robot& robot = robots_.at(from_robot);
    robot.outgoing.push_back({from_robot, kind, tick_});
    log_event(from_robot, "send", to_string(kind));
}

std::vector<Message> World::receive(int robot_id) {
    Robot& robot = robots_.at(robot_id);
    std::vector<Message> delivered(robot.inbox.begin(), robot.inbox.end());
    robot.inbox.clear();
    return delivered;
}

bool World::peer_message_arrived(int robot_id, Message::Kind kind) const {
    const Robot& robot = robots_.at(robot_id);
    for (const Message& m : robot.inbox)
        if (m.kind == kind) return true;
    return false;
}

void World::end_step() {
    for (int r = 0; r < 2; ++r) {
        Robot& sender = robots_[r];
        Robot& receiver = robots_[1 - r];
        for (const Message& m : sender.outgoing) receiver.inbox.push_back(m);
        sender.outgoing.clear();
    }
    ++tick_;
}

void World::log_event(int robot, std::string kind, std::string payload) {
    log_.push_back({tick_, robot, std::move(kind), std::move(payload)});
}

std::string World::export_log() const {
    std::ostringstream out;
    for (const LogEvent& e : log_) {
        out << "tick=" << e.tick << " robot=" << e.robot << " kind=" << e.kind
            << " payload=" << e.payload << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Lift trial execution

namespace {

// Ticks one robot's lift tree against the world.
class LiftController {
public:
    LiftController(World& world, int role, const LiftScenario& scenario, TrialMode mode)
        : world_(world), role_(role), scenario_(scenario), mode_(mode) {
        sensor_ = [this] { return world_.read_sensor(role_); };
        mover_ = [this](const RobotCommand& cmd) { world_.apply_command(role_, cmd); };

        if (mode_ == TrialMode::Tactile) {
            // The revolve centre is assumed known in bumper (simulation)
            // mode and comes from the global vision oracle otherwise.
            const Vector2d hint =
                scenario_.tactile_sensor == SensorType::Bumper
                    ? world_.box_pose().position()
                    : world_.vision_pose_estimate(scenario_.vision_noise).position();
            adjust_.emplace(hint, scenario_.strategy);
            servo_.emplace(scenario_.strategy);
        } else {
            const Pose2 estimate = world_.vision_pose_estimate(scenario_.vision_noise);
            plan_ = vision_adjust_plan(world_.robot_pose(role_), estimate, scenario_.box,
                                       world_.dome(role_).radius, scenario_.strategy);
        }

        bt::Registry registry;
        registry.actions[lift_leaves::kAdjustStep] = [this](bt::Blackboard&) {
            return adjust_->step(sensor_, mover_);
        };
        registry.actions[lift_leaves::kServoStep] = [this](bt::Blackboard&) {
            return servo_->step(sensor_, mover_);
        };
        registry.actions[lift_leaves::kVisionStep] = [this](bt::Blackboard&) {
            if (plan_index_ < plan_.size()) mover_(plan_[plan_index_++]);
            return plan_index_ >= plan_.size() ? bt::Status::Success : bt::Status::Running;
        };
        registry.actions[lift_leaves::kSendReady] = [this](bt::Blackboard&) {
            world_.send(role_, Message::Kind::Ready);
            return bt::Status::Success;
        };
        registry.actions[lift_leaves::kAwaitPeerReady] = [this](bt::Blackboard&) {
            drain_mailbox();
            return peer_ready_ ? bt::Status::Success : bt::Status::Running;
        };
        registry.actions[lift_leaves::kLift] = [this](bt::Blackboard&) {
            mover_(RobotCommand::lift());
            return bt::Status::Success;
        };
        registry.actions[lift_leaves::kSendDone] = [this](bt::Blackboard&) {
            world_.send(role_, Message::Kind::Done);
            return bt::Status::Success;
        };
        registry.actions[lift_leaves::kAwaitPeerDone] = [this](bt::Blackboard&) {
            drain_mailbox();
            return peer_done_ ? bt::Status::Success : bt::Status::Running;
        };
        registry.actions[lift_leaves::kLower] = [this](bt::Blackboard&) {
            mover_(RobotCommand::lower());
            return bt::Status::Success;
        };
        root_ = build_lift_tree(role_, scenario_.strategy,
                                mode_ == TrialMode::Tactile ? LiftTreeVariant::Tactile
                                                            : LiftTreeVariant::Vision,
                                registry);
    }

    void tick() {
        if (resolved()) return;
        status_ = root_->tick(blackboard_);
    }

    bool resolved() const { return status_ != bt::Status::Running; }
    bt::Status status() const { return status_; }

    int contacts_used() const { return adjust_ ? adjust_->outcome().contacts_used : 0; }

    std::string failure_reason() const {
        if (status_ != bt::Status::Failure) return "";
        if (adjust_ && adjust_->object_not_found()) return "object_not_found";
        if (adjust_ && !adjust_->outcome().converged) return "adjust_not_converged";
        if (servo_ && servo_->oscillated()) return "servo_oscillation";
        return "controller_failure";
    }

private:
    void drain_mailbox() {
        for (const Message& m : world_.receive(role_)) {
            if (m.kind == Message::Kind::Ready) peer_ready_ = true;
            if (m.kind == Message::Kind::Done) peer_done_ = true;
        }
    }

    World& world_;
    int role_;
    const LiftScenario& scenario_;
    TrialMode mode_;
    SensorFn sensor_;
    MoveFn mover_;
    std::optional<AdjustMachine> adjust_;
    std::optional<ServoMachine> servo_;
    std::vector<RobotCommand> plan_;
    std::size_t plan_index_ = 0;
    bool peer_ready_ = false;
    bool peer_done_ = false;
    bt::Blackboard blackboard_;
    std::unique_ptr<bt::Node> root_;
    bt::Status status_ = bt::Status::Running;
};

}  // namespace

TrialResult run_lift_trial(const LiftScenario& scenario, TrialMode mode, std::uint64_t seed) {
    Rng trial_rng(hash_combine(seed, stable_hash("lift_trial")));
    const double yaw = scenario.fixed_yaw_deg ? *scenario.fixed_yaw_deg
                                              : trial_rng.uniform(-25.0, 25.0);

    WorldConfig config;
    config.box = scenario.box;
    config.box_pose = Pose2(0.0, 0.0, yaw);
    config.kin_noise = scenario.kin_noise;
    config.seed = hash_combine(seed, stable_hash("world"));
    const DomeGeometry dome = make_dome();
    for (int r = 0; r < 2; ++r) {
        RobotConfig rc;
        rc.start_pose = r == 0 ? Pose2(-scenario.start_distance, 0.0, 0.0)
                               : Pose2(scenario.start_distance, 0.0, 180.0);
        rc.dome = dome;
        if (mode == TrialMode::Tactile) {
            rc.sensor = scenario.tactile_sensor;
            rc.model = scenario.model;
            rc.feature_noise_std = scenario.feature_noise_std;
        }
        config.robots[r] = rc;
    }

    World world(config);
    world.set_physics(scenario.physics);
    LiftController left(world, 0, scenario, mode);
    LiftController right(world, 1, scenario, mode);

    while (world.tick() < scenario.tick_budget && !(left.resolved() && right.resolved())) {
        left.tick();
        right.tick();
        world.end_step();
    }

    TrialResult result;
    result.ticks = world.tick();
    result.contacts_used = left.contacts_used() + right.contacts_used();
    for (int r = 0; r < 2; ++r) {
        const AlignmentMetrics metrics = world.alignment_metrics(r);
        result.final_angles[r] = metrics.angle_err_deg;
        result.final_depths[r] = metrics.depth_mm;
        result.tangential_offsets[r] = metrics.distance_err_mm;
    }
    if (world.lift_verdict()) {
        result.success = world.lift_verdict()->success && left.status() == bt::Status::Success &&
                         right.status() == bt::Status::Success;
        result.failure_cause = result.success ? "none" : to_string(world.lift_verdict()->cause);
    } else {
        result.success = false;
        std::string reason = left.failure_reason();
        if (reason.empty()) reason = right.failure_reason();
        if (reason.empty()) reason = "timeout";
        result.failure_cause = reason;
    }
    result.event_log = world.export_log();
    return result;
}

}  // namespace taclift
