#pragma once

#include <Eigen/Core>

namespace taclift {

using Vector2d = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wrap a heading into (-180, 180].
double normalize_heading_deg(double heading_deg);

// Planar rigid pose: position in mm, heading in degrees, always normalized
// into (-180, 180].
struct Pose2 {
    double x = 0.0;        // mm
    double y = 0.0;        // mm
    double heading = 0.0;  // deg in (-180, 180]

    Pose2() = default;
    Pose2(double x_, double y_, double heading_deg);

    Vector2d position() const { return {x, y}; }
    // Unit vector along the heading.
    Vector2d direction() const;

    static Pose2 identity() { return {}; }
};

// parent-from-child composition: applies child's pose expressed in the
// parent's frame.
Pose2 compose(const Pose2& parent, const Pose2& child);

Pose2 inverse(const Pose2& pose);

// Pose of `to` expressed in the frame of `from`; compose(from, result) == to.
Pose2 relative_pose(const Pose2& from, const Pose2& to);

// Map a point from the pose's local frame into its parent frame.
Vector2d transform_point(const Pose2& frame, const Vector2d& local);

// Rotate a vector into the parent frame (no translation).
Vector2d rotate_vector(double heading_deg, const Vector2d& v);

// Signed angle in degrees from `from` to `to`, CCW positive, in (-180, 180].
double signed_angle_deg(const Vector2d& from, const Vector2d& to);

// A flat contactable surface; endpoints in mm with an outward unit normal
// perpendicular to b - a.
struct LineSegment {
    Vector2d a{0.0, 0.0};
    Vector2d b{0.0, 0.0};
    Vector2d outward_normal{0.0, 0.0};

    Vector2d midpoint() const { return 0.5 * (a + b); }
    double length() const { return (b - a).norm(); }
    Vector2d tangent() const { return (b - a).normalized(); }
};

// Builds a segment with the outward normal on the left of a->b
// (counter-clockwise boundary convention). Throws on degenerate endpoints.
LineSegment make_segment(const Vector2d& a, const Vector2d& b);

bool approx_equal(const Pose2& lhs, const Pose2& rhs, double tol = 1e-9);

}  // namespace taclift
