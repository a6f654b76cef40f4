#include "taclift/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taclift {

DomeGeometry make_dome(double radius_mm, int pin_count) {
    if (!(radius_mm > 0.0)) throw std::invalid_argument("dome radius must be positive");
    if (pin_count < 3) throw std::invalid_argument("need at least 3 pins");
    DomeGeometry dome;
    dome.radius = radius_mm;
    dome.pin_angles_deg.resize(pin_count);
    const double span = 140.0;  // [-70, +70]
    for (int i = 0; i < pin_count; ++i) {
        dome.pin_angles_deg[i] = -70.0 + span * i / (pin_count - 1);
    }
    return dome;
}

std::vector<double> FeatureVector::flattened() const {
    std::vector<double> flat(compressions);
    flat.insert(flat.end(), lateral_shifts.begin(), lateral_shifts.end());
    return flat;
}

ContactState contact_geometry(const Pose2& sensor_pose, const LineSegment& face,
                              const DomeGeometry& dome) {
    const double len = face.length();
    if (!(len > 0.0)) throw std::invalid_argument("degenerate surface");

    const Vector2d centre = sensor_pose.position();
    const Vector2d n_out = face.outward_normal;
    const Vector2d t = face.tangent();

    // Signed distance from the face line, positive on the outward side.
    const double s = (centre - face.a).dot(n_out);
    const Vector2d foot = centre - s * n_out;
    const double along = (foot - face.a).dot(t);
    const bool foot_on_segment = along >= 0.0 && along <= len;

    const Vector2d inward = -n_out;
    const double angle = signed_angle_deg(inward, sensor_pose.direction());

    ContactState state;
    state.angle = angle;
    state.in_contact = s < dome.radius && foot_on_segment && std::fabs(angle) < 90.0;
    if (state.in_contact) {
        state.depth = std::min(dome.radius - s, dome.radius);
        state.tangential_offset = (foot - face.midpoint()).dot(t);
    }
    return state;
}

FeatureVector pin_compressions(const ContactState& state, const DomeGeometry& dome) {
    const int m = dome.pin_count();
    FeatureVector features;
    features.compressions.assign(m, 0.0);
    features.lateral_shifts.assign(m, 0.0);
    if (!state.in_contact || state.depth <= 0.0) return features;

    const double r = dome.radius;
    const double s = r - state.depth;
    for (int j = 0; j < m; ++j) {
        const double incidence = deg_to_rad(state.angle + dome.pin_angles_deg[j]);
        const double c = std::cos(incidence);
        if (c <= 0.0) continue;
        const double compression = std::max(0.0, r - s / c);
        if (compression <= 0.0) continue;
        features.compressions[j] = compression;
        features.lateral_shifts[j] =
            (compression / r) * (kShearGain * state.shear + kLeverGain * r * std::tan(incidence));
    }
    return features;
}

FeatureVector sense(const Pose2& sensor_pose, const LineSegment& face,
                    const DomeGeometry& dome, double noise_std, Rng& rng) {
    if (noise_std < 0.0) throw std::invalid_argument("noise_std must be >= 0");
    FeatureVector features = pin_compressions(contact_geometry(sensor_pose, face, dome), dome);
    if (noise_std == 0.0) return features;
    for (double& c : features.compressions) c = std::max(0.0, c + rng.normal(0.0, noise_std));
    for (double& l : features.lateral_shifts) l += rng.normal(0.0, noise_std);
    return features;
}

ContactState bumper_oracle(const Pose2& sensor_pose, const LineSegment& face,
                           const DomeGeometry& dome) {
    return contact_geometry(sensor_pose, face, dome);
}

}  // namespace taclift
