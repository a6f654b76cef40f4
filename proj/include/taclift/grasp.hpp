#pragma once

#include <vector>

#include "taclift/geometry.hpp"

namespace taclift {

// One planar contact, expressed in the object's frame.
struct ContactSpec {
    Vector2d point{0.0, 0.0};          // mm
    Vector2d inward_normal{1.0, 0.0};  // unit, pointing into the object
    double depth = 0.0;                // mm
    double tangential_offset = 0.0;    // mm from face centre
};

struct BoxObject {
    double width = 60.0;   // mm, extent of the contacted faces
    double length = 30.0;  // mm, separation between the contacted faces
    double mass = 0.2;     // kg
    Vector2d com_offset{0.0, 0.0};  // mm, planar offset from the centre
    double com_height = 15.0;       // mm above the base
    double friction_mu = 0.5;
};

enum class FailureCause {
    None,
    NotOppositeSides,
    ConeMissesCom,
    ForceImbalance,
    TorqueImbalance,
    InsufficientFriction,
    PitchInstability,
};

const char* to_string(FailureCause cause);

struct LiftVerdict {
    bool success = false;
    FailureCause cause = FailureCause::None;
};

// Contact force model and check tolerances. Normal force is
// contact_stiffness * depth; pitch stability is a lever-arm inequality, not
// rigid-body dynamics.
struct PhysicsParams {
    double contact_stiffness = 2.0;  // N per mm of depth
    double gravity = 9.81;           // m/s^2
    double eps_normal_deg = 10.0;    // max deviation of n1 from -n2
    double eps_force = 1.0;          // N, net normal force bound
    double eps_torque = 20.0;        // N*mm, net torque bound about the CoM
    double pitch_lever = 15.0;       // mm, effective stabilizing arm
};

// True when the ray from the contact point to `point` lies within half-angle
// atan(mu) of the inward normal. A zero-length ray is inside by convention.
bool friction_cone_contains(const ContactSpec& contact, double mu, const Vector2d& point);

// Per-check diagnostics; verdict reflects the first failed check in the
// order opposition, cones, force, torque.
struct FcgReport {
    LiftVerdict verdict;
    double normal_opposition_deg = 0.0;  // angle(n1, -n2)
    bool cone1_holds = false;
    bool cone2_holds = false;
    double normal_force_1 = 0.0;  // N
    double normal_force_2 = 0.0;  // N
    double force_residual = 0.0;  // N
    double torque_residual = 0.0;  // N*mm
};

FcgReport fcg_check(const ContactSpec& c1, const ContactSpec& c2, const BoxObject& box,
                    const PhysicsParams& physics);

// Full lift verdict: FCG checks, then vertical friction capacity
// mu*(N1+N2) >= m*g, then pitch stability m*g*com_height <=
// mu*(N1+N2)*pitch_lever. A zero-depth contact yields InsufficientFriction.
LiftVerdict lift_outcome(const ContactSpec& c1, const ContactSpec& c2, const BoxObject& box,
                         const PhysicsParams& physics);

// Boundary segments of the box footprint at a pose, outward normals facing
// away from the box. Faces 0/1 are the graspable ones at local x =
// +/- length/2, each spanning the width; faces 2/3 close the footprint.
std::vector<LineSegment> box_faces(const BoxObject& box, const Pose2& pose);

}  // namespace taclift
