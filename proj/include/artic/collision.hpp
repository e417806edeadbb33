#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "artic/geom.hpp"
#include "artic/mesh.hpp"

namespace artic {

using Tri = std::array<Vec3, 3>;

// Median-split bounding-volume hierarchy over one mesh. Zero-area triangles
// are excluded here and in every narrow-phase path, so accelerated and
// brute-force queries see the same triangle set.
class Bvh {
 public:
  struct Node {
    Aabb box;
    int left = -1;   // internal: child indices; leaf: left == -1
    int right = -1;
    int first = 0;   // leaf: range into tri_order
    int count = 0;

    bool is_leaf() const { return left < 0; }
  };

  static Bvh build(const TriMesh& mesh);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& tri_order() const { return tri_order_; }
  const Aabb& tri_box(int tri) const { return tri_boxes_[tri]; }
  bool empty() const { return nodes_.empty(); }

 private:
  std::vector<Node> nodes_;
  std::vector<int> tri_order_;   // triangle indices, degenerate ones removed
  std::vector<Aabb> tri_boxes_;  // per original triangle index
};

// Distance between the convex hulls of two triangles, 0 when they intersect.
double gjk_distance(const Tri& a, const Tri& b);

struct EpaResult {
  double depth = 0.0;
  Vec3 normal{0, 0, 1};  // translating b by (depth + margin) * normal separates
};

// Penetration depth and minimal-translation direction for two intersecting
// triangles, via polytope expansion over the Minkowski difference. Flat
// configurations (e.g. coplanar triangles) have depth 0 by construction and
// are resolved analytically instead of erroring.
EpaResult epa_penetration(const Tri& a, const Tri& b);

struct ContactWitness {
  int moving_tri = -1;
  int other_part = -1;
  int other_tri = -1;
};

struct ContactReport {
  double min_distance = 0.0;    // clamped at the query cutoff
  double max_penetration = 0.0;
  std::optional<ContactWitness> witness;
  long long pairs_visited = 0;  // narrow-phase triangle pairs examined
};

struct PartGeom {
  const TriMesh* mesh = nullptr;
  const Bvh* bvh = nullptr;  // required for part_contact, unused by brute force
};

constexpr double kNoPenetrationStop = std::numeric_limits<double>::infinity();

// BVH-accelerated contact between a posed moving mesh and a set of static
// parts. min_distance is exact below the cutoff; max_penetration scanning
// stops early once it exceeds penetration_stop (the reported value is then a
// lower bound that is already past every threshold the caller compares with).
ContactReport part_contact(const PartGeom& moving, const RigidPose& pose,
                           std::span<const PartGeom> others, double cutoff,
                           double penetration_stop = kNoPenetrationStop);

// Same contract evaluated over all triangle pairs with no hierarchy and no
// early exits. Test oracle for part_contact.
ContactReport brute_force_contact(const TriMesh& moving, const RigidPose& pose,
                                  std::span<const PartGeom> others, double cutoff);

enum class ContactClass { kFree, kContact, kCollision };

inline ContactClass classify_contact(const ContactReport& report, double eps_contact) {
  if (report.max_penetration > eps_contact) return ContactClass::kCollision;
  if (report.min_distance <= eps_contact) return ContactClass::kContact;
  return ContactClass::kFree;
}

}  // namespace artic
