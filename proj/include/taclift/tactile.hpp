#pragma once

#include <vector>

#include "taclift/geometry.hpp"
#include "taclift/rng.hpp"

namespace taclift {

// Soft hemispherical sensing dome with radially arranged pins. Pin angles
// are measured from the dome axis, evenly spaced and symmetric about zero.
struct DomeGeometry {
    double radius = 20.0;  // mm
    std::vector<double> pin_angles_deg;

    int pin_count() const { return static_cast<int>(pin_angles_deg.size()); }
};

// radius > 0, pin_count >= 3; pins evenly spaced in [-70, +70] degrees.
DomeGeometry make_dome(double radius_mm = 20.0, int pin_count = 21);

// Ground-truth state of the dome against a flat surface.
//   depth: apex penetration R - s (s = centre-to-surface distance), 0 when
//          not in contact;
//   angle: signed angle between the dome axis and the inward surface normal;
//   tangential_offset: signed distance from the face centre to the contact
//          point along the face;
//   shear: accumulated tangential slip since first touch.
struct ContactState {
    double depth = 0.0;              // mm, >= 0
    double angle = 0.0;              // deg, |angle| < 90 when in contact
    double tangential_offset = 0.0;  // mm
    double shear = 0.0;              // mm
    bool in_contact = false;
};

// Simulated tactile observation: per-pin radial compressions plus lateral
// marker shifts, both in mm.
struct FeatureVector {
    std::vector<double> compressions;
    std::vector<double> lateral_shifts;

    int size() const { return static_cast<int>(compressions.size() + lateral_shifts.size()); }
    // compressions then shifts, as fed to the regressor.
    std::vector<double> flattened() const;
};

// Pin lateral-shift coefficients; levering is a stand-in, see pin_compressions.
constexpr double kShearGain = 1.0;
constexpr double kLeverGain = 0.1;

// Geometric contact state of the dome (centred at sensor_pose, axis along
// its heading) against a face. Non-contact when the centre is further than
// the dome radius from the face line, when the perpendicular foot lies off
// the segment, or when the face is behind the sensing hemisphere.
// Throws "degenerate surface" for a zero-length face.
ContactState contact_geometry(const Pose2& sensor_pose, const LineSegment& face,
                              const DomeGeometry& dome);

// Per-pin deformation for a given contact state. For pin direction u at
// pin angle p from the axis and contact angle a:
//   compression = max(0, R - s / cos(a + p)) when cos(a + p) > 0, else 0
//   lateral shift = (compression / R) *
//                   (kShearGain * shear + kLeverGain * R * tan(a + p))
// Non-contact states produce all zeros.
FeatureVector pin_compressions(const ContactState& state, const DomeGeometry& dome);

// Noisy observation: pin_compressions of contact_geometry with i.i.d.
// Gaussian noise on every channel; compressions re-clamped to >= 0.
FeatureVector sense(const Pose2& sensor_pose, const LineSegment& face,
                    const DomeGeometry& dome, double noise_std, Rng& rng);

// Simulation-mode sensor: the exact contact state, no noise.
ContactState bumper_oracle(const Pose2& sensor_pose, const LineSegment& face,
                           const DomeGeometry& dome);

}  // namespace taclift
