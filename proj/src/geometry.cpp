#include "taclift/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace taclift {

double normalize_heading_deg(double heading_deg) {
    if (!std::isfinite(heading_deg)) throw std::invalid_argument("non-finite heading");
    double shifted = std::fmod(heading_deg + 180.0, 360.0);
    if (shifted <= 0.0) shifted += 360.0;
    return shifted - 180.0;
}

Pose2::Pose2(double x_, double y_, double heading_deg)
    : x(x_), y(y_), heading(normalize_heading_deg(heading_deg)) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("non-finite pose");
}

Vector2d Pose2::direction() const {
    const double h = deg_to_rad(heading);
    return {std::cos(h), std::sin(h)};
}

Vector2d rotate_vector(double heading_deg, const Vector2d& v) {
    const double h = deg_to_rad(heading_deg);
    const double c = std::cos(h);
    const double s = std::sin(h);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Pose2 compose(const Pose2& parent, const Pose2& child) {
    const Vector2d p = parent.position() + rotate_vector(parent.heading, child.position());
    return {p.x(), p.y(), parent.heading + child.heading};
}

Pose2 inverse(const Pose2& pose) {
    const Vector2d p = rotate_vector(-pose.heading, -pose.position());
    return {p.x(), p.y(), -pose.heading};
}

Pose2 relative_pose(const Pose2& from, const Pose2& to) {
    return compose(inverse(from), to);
}

Vector2d transform_point(const Pose2& frame, const Vector2d& local) {
    return frame.position() + rotate_vector(frame.heading, local);
}

double signed_angle_deg(const Vector2d& from, const Vector2d& to) {
    const double cross = from.x() * to.y() - from.y() * to.x();
    const double dot = from.dot(to);
    return rad_to_deg(std::atan2(cross, dot));
}

LineSegment make_segment(const Vector2d& a, const Vector2d& b) {
    const Vector2d d = b - a;
    const double len = d.norm();
    if (!(len > 0.0)) throw std::invalid_argument("degenerate surface");
    const Vector2d t = d / len;
    return {a, b, Vector2d(-t.y(), t.x())};
}

bool approx_equal(const Pose2& lhs, const Pose2& rhs, double tol) {
    double dh = std::fabs(normalize_heading_deg(lhs.heading - rhs.heading));
    return std::fabs(lhs.x - rhs.x) <= tol && std::fabs(lhs.y - rhs.y) <= tol && dh <= tol;
}

}  // namespace taclift
