#include "taclift/grasp.hpp"

#include <cmath>

namespace taclift {

const char* to_string(FailureCause cause) {
    switch (cause) {
        case FailureCause::None: return "none";
        case FailureCause::NotOppositeSides: return "not_opposite_sides";
        case FailureCause::ConeMissesCom: return "cone_misses_com";
        case FailureCause::ForceImbalance: return "force_imbalance";
        case FailureCause::TorqueImbalance: return "torque_imbalance";
        case FailureCause::InsufficientFriction: return "insufficient_friction";
        case FailureCause::PitchInstability: return "pitch_instability";
    }
    return "?";
}

bool friction_cone_contains(const ContactSpec& contact, double mu, const Vector2d& point) {
    const Vector2d ray = point - contact.point;
    const double len = ray.norm();
    if (len == 0.0) return true;
    // cos(angle to normal) >= cos(atan(mu)) = 1/sqrt(1+mu^2)
    const double cos_angle = ray.dot(contact.inward_normal) / len;
    return cos_angle >= 1.0 / std::sqrt(1.0 + mu * mu);
}

FcgReport fcg_check(const ContactSpec& c1, const ContactSpec& c2, const BoxObject& box,
                    const PhysicsParams& physics) {
    FcgReport report;
    const Vector2d com = box.com_offset;

    report.normal_opposition_deg =
        std::fabs(signed_angle_deg(c1.inward_normal, -c2.inward_normal));
    report.cone1_holds = friction_cone_contains(c1, box.friction_mu, com);
    report.cone2_holds = friction_cone_contains(c2, box.friction_mu, com);
    report.normal_force_1 = physics.contact_stiffness * c1.depth;
    report.normal_force_2 = physics.contact_stiffness * c2.depth;

    const Vector2d net_force =
        report.normal_force_1 * c1.inward_normal + report.normal_force_2 * c2.inward_normal;
    report.force_residual = net_force.norm();

    auto torque_about_com = [&](const ContactSpec& c, double n) {
        const Vector2d r = c.point - com;
        const Vector2d f = n * c.inward_normal;
        return r.x() * f.y() - r.y() * f.x();
    };
    report.torque_residual = std::fabs(torque_about_com(c1, report.normal_force_1) +
                                       torque_about_com(c2, report.normal_force_2));

    FailureCause cause = FailureCause::None;
    if (report.normal_opposition_deg > physics.eps_normal_deg)
        cause = FailureCause::NotOppositeSides;
    else if (!report.cone1_holds || !report.cone2_holds)
        cause = FailureCause::ConeMissesCom;
    else if (report.force_residual > physics.eps_force)
        cause = FailureCause::ForceImbalance;
    else if (report.torque_residual > physics.eps_torque)
        cause = FailureCause::TorqueImbalance;
    report.verdict = {cause == FailureCause::None, cause};
    return report;
}

std::vector<LineSegment> box_faces(const BoxObject& box, const Pose2& pose) {
    const double hx = 0.5 * box.length;
    const double hy = 0.5 * box.width;
    const Vector2d pp = transform_point(pose, {hx, hy});
    const Vector2d pm = transform_point(pose, {hx, -hy});
    const Vector2d mp = transform_point(pose, {-hx, hy});
    const Vector2d mm = transform_point(pose, {-hx, -hy});
    std::vector<LineSegment> faces;
    faces.push_back(make_segment(pp, pm));  // +x, outward normal +x
    faces.push_back(make_segment(mm, mp));  // -x
    faces.push_back(make_segment(mp, pp));  // +y
    faces.push_back(make_segment(pm, mm));  // -y
    return faces;
}

LiftVerdict lift_outcome(const ContactSpec& c1, const ContactSpec& c2, const BoxObject& box,
                         const PhysicsParams& physics) {
    // A contact that never formed transmits no force; report the missing
    // force rather than a geometric cause.
    if (c1.depth <= 0.0 || c2.depth <= 0.0)
        return {false, FailureCause::InsufficientFriction};

    const FcgReport fcg = fcg_check(c1, c2, box, physics);
    if (!fcg.verdict.success) return fcg.verdict;

    const double total_normal = fcg.normal_force_1 + fcg.normal_force_2;
    const double weight = box.mass * physics.gravity;
    if (box.friction_mu * total_normal < weight)
        return {false, FailureCause::InsufficientFriction};
    if (weight * box.com_height > box.friction_mu * total_normal * physics.pitch_lever)
        return {false, FailureCause::PitchInstability};
    return {true, FailureCause::None};
}

}  // namespace taclift
