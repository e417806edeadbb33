#pragma once

#include <optional>
#include <span>
#include <vector>

#include "artic/collision.hpp"
#include "artic/geom.hpp"
#include "artic/shape.hpp"

namespace artic {

struct MotionSpec {
  enum class Kind { kPrismatic, kRevolute };

  Kind kind = Kind::kPrismatic;
  Dir3 axis;
  std::optional<Vec3> pivot;  // present iff revolute

  static MotionSpec prismatic(const Dir3& axis) { return {Kind::kPrismatic, axis, {}}; }
  static MotionSpec revolute(const Dir3& axis, const Vec3& pivot) {
    return {Kind::kRevolute, axis, pivot};
  }
};

// Pose of the moving part at motion parameter t: model units of translation
// for prismatic motions, radians of rotation for revolute ones. t = 0 is the
// rest pose for every spec.
RigidPose pose_at(const MotionSpec& spec, double t);

enum class PoseVerdict { kValid, kCollision, kDetached };

const char* to_string(PoseVerdict v);

// Maximal valid parameter interval [neg, pos] around the rest pose.
struct FreeRange {
  double neg = 0.0;  // <= 0
  double pos = 0.0;  // >= 0

  double span() const { return pos - neg; }
  double max_side() const { return std::max(-neg, pos); }
};

struct RestBaseline {
  double distance = 0.0;
  double penetration = 0.0;
};

// A moving part against the static remainder of its shape, with the rest
// contact baselines the classification thresholds are relative to.
struct MotionScene {
  PartGeom moving;
  std::vector<PartGeom> others;
  RestBaseline baseline;
};

// Per-shape BVHs, built once and shared across all motion queries.
struct ShapeGeometry {
  std::vector<Bvh> bvhs;

  static ShapeGeometry build(const Shape& shape);
};

MotionScene make_motion_scene(const Shape& shape, const ShapeGeometry& geometry,
                              int part_index, double eps_contact,
                              double distance_cutoff_factor = 4.0);

// Collision if penetration exceeds the rest penetration by more than the
// contact tolerance; detached if the part moves out of contact (or, for a
// part already separated at rest, further out than it started). Single-part
// shapes are always valid.
PoseVerdict classify_pose(const MotionScene& scene, const RigidPose& pose, double eps_contact,
                          double distance_cutoff_factor = 4.0);

struct SweepParams {
  double step = 0.0;        // coarse scan resolution
  double cap = 0.0;         // scan limit per side
  double bisect_tol = 0.0;  // boundary refinement tolerance
};

struct RangeDetail {
  FreeRange range;
  PoseVerdict neg_verdict = PoseVerdict::kValid;  // verdict bounding each side
  PoseVerdict pos_verdict = PoseVerdict::kValid;
  bool neg_capped = false;
  bool pos_capped = false;
};

// Coarse scan out from 0 in steps of `step` until the first non-valid pose,
// then bisection of the bracketing interval down to `bisect_tol`. A side with
// no invalid pose up to the cap reports the cap.
RangeDetail free_range(const MotionScene& scene, const MotionSpec& spec,
                       const SweepParams& params, double eps_contact,
                       double distance_cutoff_factor = 4.0);

}  // namespace artic
