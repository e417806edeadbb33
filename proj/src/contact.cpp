#include <algorithm>

#include "artic/collision.hpp"

namespace artic {

namespace {

Tri posed_tri(const TriMesh& mesh, int tri, const RigidPose& pose) {
  return {pose.apply(mesh.tri_vertex(tri, 0)), pose.apply(mesh.tri_vertex(tri, 1)),
          pose.apply(mesh.tri_vertex(tri, 2))};
}

Tri local_tri(const TriMesh& mesh, int tri) {
  return {mesh.tri_vertex(tri, 0), mesh.tri_vertex(tri, 1), mesh.tri_vertex(tri, 2)};
}

Aabb posed_box(const Aabb& box, const RigidPose& pose) {
  Aabb out = Aabb::empty();
  for (int i = 0; i < 8; ++i) out.expand(pose.apply(box.corner(i)));
  return out;
}

struct DistanceQuery {
  const TriMesh* mesh_a;
  const Bvh* bvh_a;
  const RigidPose* pose;
  const TriMesh* mesh_b;
  const Bvh* bvh_b;
  double best;
  int best_tri_a = -1;
  int best_tri_b = -1;
  long long pairs = 0;

  void leaves(const Bvh::Node& na, const Bvh::Node& nb) {
    for (int i = na.first; i < na.first + na.count; ++i) {
      const int ta = bvh_a->tri_order()[i];
      const Tri tri_a = posed_tri(*mesh_a, ta, *pose);
      for (int j = nb.first; j < nb.first + nb.count; ++j) {
        const int tb = bvh_b->tri_order()[j];
        ++pairs;
        const double d = gjk_distance(tri_a, local_tri(*mesh_b, tb));
        if (d < best) {
          best = d;
          best_tri_a = ta;
          best_tri_b = tb;
          if (best == 0.0) return;
        }
      }
    }
  }

  void visit(int ia, int ib) {
    const Bvh::Node& na = bvh_a->nodes()[ia];
    const Bvh::Node& nb = bvh_b->nodes()[ib];
    if (aabb_distance(posed_box(na.box, *pose), nb.box) >= best) return;
    if (na.is_leaf() && nb.is_leaf()) {
      leaves(na, nb);
      return;
    }
    // Split the node with the larger box; visit the closer pairing first.
    const bool split_a =
        !na.is_leaf() &&
        (nb.is_leaf() || na.box.longest_side() >= nb.box.longest_side());
    if (split_a) {
      const double dl =
          aabb_distance(posed_box(bvh_a->nodes()[na.left].box, *pose), nb.box);
      const double dr =
          aabb_distance(posed_box(bvh_a->nodes()[na.right].box, *pose), nb.box);
      if (dl <= dr) {
        if (dl < best) visit(na.left, ib);
        if (dr < best) visit(na.right, ib);
      } else {
        if (dr < best) visit(na.right, ib);
        if (dl < best) visit(na.left, ib);
      }
    } else {
      const Aabb box_a = posed_box(na.box, *pose);
      const double dl = aabb_distance(box_a, bvh_b->nodes()[nb.left].box);
      const double dr = aabb_distance(box_a, bvh_b->nodes()[nb.right].box);
      if (dl <= dr) {
        if (dl < best) visit(ia, nb.left);
        if (dr < best) visit(ia, nb.right);
      } else {
        if (dr < best) visit(ia, nb.right);
        if (dl < best) visit(ia, nb.left);
      }
    }
  }
};

struct PenetrationQuery {
  const TriMesh* mesh_a;
  const Bvh* bvh_a;
  const RigidPose* pose;
  const TriMesh* mesh_b;
  const Bvh* bvh_b;
  double stop;
  double deepest = 0.0;
  int best_tri_a = -1;
  int best_tri_b = -1;
  long long pairs = 0;
  bool done = false;

  void leaves(const Bvh::Node& na, const Bvh::Node& nb) {
    for (int i = na.first; i < na.first + na.count && !done; ++i) {
      const int ta = bvh_a->tri_order()[i];
      const Tri tri_a = posed_tri(*mesh_a, ta, *pose);
      for (int j = nb.first; j < nb.first + nb.count; ++j) {
        const int tb = bvh_b->tri_order()[j];
        ++pairs;
        const Tri tri_b = local_tri(*mesh_b, tb);
        if (gjk_distance(tri_a, tri_b) > 0.0) continue;
        const double depth = epa_penetration(tri_a, tri_b).depth;
        if (depth > deepest) {
          deepest = depth;
          best_tri_a = ta;
          best_tri_b = tb;
          if (deepest > stop) {
            done = true;
            return;
          }
        }
      }
    }
  }

  void visit(int ia, int ib) {
    if (done) return;
    const Bvh::Node& na = bvh_a->nodes()[ia];
    const Bvh::Node& nb = bvh_b->nodes()[ib];
    if (!posed_box(na.box, *pose).overlaps(nb.box)) return;
    if (na.is_leaf() && nb.is_leaf()) {
      leaves(na, nb);
      return;
    }
    const bool split_a =
        !na.is_leaf() &&
        (nb.is_leaf() || na.box.longest_side() >= nb.box.longest_side());
    if (split_a) {
      visit(na.left, ib);
      visit(na.right, ib);
    } else {
      visit(ia, nb.left);
      visit(ia, nb.right);
    }
  }
};

}  // namespace

ContactReport part_contact(const PartGeom& moving, const RigidPose& pose,
                           std::span<const PartGeom> others, double cutoff,
                           double penetration_stop) {
  ContactReport report;
  report.min_distance = cutoff;

  for (size_t oi = 0; oi < others.size(); ++oi) {
    const PartGeom& other = others[oi];
    if (moving.bvh->empty() || other.bvh->empty()) continue;
    DistanceQuery dq{moving.mesh, moving.bvh, &pose, other.mesh, other.bvh,
                     report.min_distance};
    dq.visit(0, 0);
    report.pairs_visited += dq.pairs;
    if (dq.best < report.min_distance) {
      report.min_distance = dq.best;
      report.witness = ContactWitness{dq.best_tri_a, static_cast<int>(oi), dq.best_tri_b};
    }
  }

  if (report.min_distance == 0.0) {
    for (size_t oi = 0; oi < others.size(); ++oi) {
      const PartGeom& other = others[oi];
      if (moving.bvh->empty() || other.bvh->empty()) continue;
      PenetrationQuery pq{moving.mesh, moving.bvh, &pose,
                          other.mesh,  other.bvh,  penetration_stop};
      pq.visit(0, 0);
      report.pairs_visited += pq.pairs;
      if (pq.deepest > report.max_penetration) {
        report.max_penetration = pq.deepest;
        report.witness = ContactWitness{pq.best_tri_a, static_cast<int>(oi), pq.best_tri_b};
      }
      if (report.max_penetration > penetration_stop) break;
    }
  }
  return report;
}

ContactReport brute_force_contact(const TriMesh& moving, const RigidPose& pose,
                                  std::span<const PartGeom> others, double cutoff) {
  ContactReport report;
  report.min_distance = cutoff;

  std::vector<char> moving_valid(moving.triangles.size());
  for (size_t t = 0; t < moving.triangles.size(); ++t) {
    const auto& tri = moving.triangles[t];
    moving_valid[t] = triangle_area(moving.vertices[tri[0]], moving.vertices[tri[1]],
                                    moving.vertices[tri[2]]) > 0.0;
  }

  for (size_t oi = 0; oi < others.size(); ++oi) {
    const TriMesh& other = *others[oi].mesh;
    std::vector<char> other_valid(other.triangles.size());
    for (size_t t = 0; t < other.triangles.size(); ++t) {
      const auto& tri = other.triangles[t];
      other_valid[t] = triangle_area(other.vertices[tri[0]], other.vertices[tri[1]],
                                     other.vertices[tri[2]]) > 0.0;
    }
    for (size_t ta = 0; ta < moving.triangles.size(); ++ta) {
      if (!moving_valid[ta]) continue;
      const Tri tri_a = posed_tri(moving, static_cast<int>(ta), pose);
      for (size_t tb = 0; tb < other.triangles.size(); ++tb) {
        if (!other_valid[tb]) continue;
        ++report.pairs_visited;
        const Tri tri_b = local_tri(other, static_cast<int>(tb));
        const double d = gjk_distance(tri_a, tri_b);
        if (d < report.min_distance) {
          report.min_distance = d;
          report.witness = ContactWitness{static_cast<int>(ta), static_cast<int>(oi),
                                          static_cast<int>(tb)};
        }
        if (d == 0.0) {
          const double depth = epa_penetration(tri_a, tri_b).depth;
          if (depth > report.max_penetration) {
            report.max_penetration = depth;
            report.witness = ContactWitness{static_cast<int>(ta), static_cast<int>(oi),
                                            static_cast<int>(tb)};
          }
        }
      }
    }
  }
  return report;
}

}  // namespace artic
