#include "artic/motion.hpp"

#include <cmath>

#include "artic/error.hpp"

namespace artic {

const char* to_string(PoseVerdict v) {
  switch (v) {
    case PoseVerdict::kValid: return "valid";
    case PoseVerdict::kCollision: return "collision";
    case PoseVerdict::kDetached: return "detached";
  }
  return "unknown";
}

RigidPose pose_at(const MotionSpec& spec, double t) {
  RigidPose pose;
  if (spec.kind == MotionSpec::Kind::kPrismatic) {
    pose.translation = spec.axis.vec() * t;
    return pose;
  }
  if (!spec.pivot) {
    throw Error(ErrorKind::kInvalidInput, "pose_at: revolute spec without pivot");
  }
  pose.rotation = rotation_about_axis(spec.axis, t);
  pose.translation = *spec.pivot - pose.rotation * *spec.pivot;
  return pose;
}

ShapeGeometry ShapeGeometry::build(const Shape& shape) {
  ShapeGeometry geometry;
  geometry.bvhs.reserve(shape.parts.size());
  for (const Part& part : shape.parts) geometry.bvhs.push_back(Bvh::build(part.mesh));
  return geometry;
}

MotionScene make_motion_scene(const Shape& shape, const ShapeGeometry& geometry,
                              int part_index, double eps_contact,
                              double distance_cutoff_factor) {
  if (part_index < 0 || part_index >= static_cast<int>(shape.parts.size())) {
    throw Error(ErrorKind::kInvalidInput, "make_motion_scene: part index out of range");
  }
  MotionScene scene;
  scene.moving = {&shape.parts[part_index].mesh, &geometry.bvhs[part_index]};
  for (size_t i = 0; i < shape.parts.size(); ++i) {
    if (static_cast<int>(i) == part_index) continue;
    scene.others.push_back({&shape.parts[i].mesh, &geometry.bvhs[i]});
  }
  if (!scene.others.empty()) {
    const ContactReport rest =
        part_contact(scene.moving, RigidPose::identity(), scene.others,
                     distance_cutoff_factor * eps_contact);
    scene.baseline = {rest.min_distance, rest.max_penetration};
  }
  return scene;
}

PoseVerdict classify_pose(const MotionScene& scene, const RigidPose& pose, double eps_contact,
                          double distance_cutoff_factor) {
  if (scene.others.empty()) return PoseVerdict::kValid;

  const double collision_threshold =
      std::max(eps_contact, scene.baseline.penetration + eps_contact);
  const ContactReport report =
      part_contact(scene.moving, pose, scene.others, distance_cutoff_factor * eps_contact,
                   collision_threshold);
  if (report.max_penetration > collision_threshold) return PoseVerdict::kCollision;

  const bool attached_at_rest = scene.baseline.distance <= eps_contact;
  const double detach_threshold =
      attached_at_rest ? eps_contact : scene.baseline.distance + eps_contact;
  if (report.min_distance > detach_threshold) return PoseVerdict::kDetached;
  return PoseVerdict::kValid;
}

namespace {

struct SideResult {
  double bound = 0.0;
  PoseVerdict verdict = PoseVerdict::kValid;
  bool capped = false;
};

SideResult scan_side(const MotionScene& scene, const MotionSpec& spec, double direction,
                     const SweepParams& params, double eps_contact, double cutoff_factor) {
  double prev = 0.0;
  for (int k = 1;; ++k) {
    const double t = std::min(k * params.step, params.cap);
    const PoseVerdict verdict =
        classify_pose(scene, pose_at(spec, direction * t), eps_contact, cutoff_factor);
    if (verdict != PoseVerdict::kValid) {
      double lo = prev;
      double hi = t;
      PoseVerdict bound_verdict = verdict;
      while (hi - lo > params.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const PoseVerdict mid_verdict =
            classify_pose(scene, pose_at(spec, direction * mid), eps_contact, cutoff_factor);
        if (mid_verdict == PoseVerdict::kValid) {
          lo = mid;
        } else {
          hi = mid;
          bound_verdict = mid_verdict;
        }
      }
      return {lo, bound_verdict, false};
    }
    if (t >= params.cap) return {params.cap, PoseVerdict::kValid, true};
    prev = t;
  }
}

}  // namespace

RangeDetail free_range(const MotionScene& scene, const MotionSpec& spec,
                       const SweepParams& params, double eps_contact,
                       double distance_cutoff_factor) {
  if (!(params.step > 0.0) || !(params.cap > 0.0) || !(params.bisect_tol > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "free_range: sweep parameters must be positive");
  }
  RangeDetail detail;
  const SideResult pos =
      scan_side(scene, spec, 1.0, params, eps_contact, distance_cutoff_factor);
  const SideResult neg =
      scan_side(scene, spec, -1.0, params, eps_contact, distance_cutoff_factor);
  detail.range.pos = pos.bound;
  detail.range.neg = -neg.bound;
  detail.pos_verdict = pos.verdict;
  detail.neg_verdict = neg.verdict;
  detail.pos_capped = pos.capped;
  detail.neg_capped = neg.capped;
  return detail;
}

}  // namespace artic
