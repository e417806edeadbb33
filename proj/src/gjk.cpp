#include <algorithm>
#include <cmath>

#include "artic/collision.hpp"

namespace artic {

namespace {

int support_index(const Tri& t, const Vec3& d) {
  int best = 0;
  double best_dot = dot(t[0], d);
  for (int i = 1; i < 3; ++i) {
    const double v = dot(t[i], d);
    if (v > best_dot) {
      best_dot = v;
      best = i;
    }
  }
  return best;
}

// Closest point to the origin on segment ab; mask bits 1,2 mark retained ends.
Vec3 closest_on_segment(const Vec3& a, const Vec3& b, int& mask) {
  const Vec3 ab = b - a;
  const double denom = dot(ab, ab);
  if (denom <= 0.0) {
    mask = 1;
    return a;
  }
  const double t = -dot(a, ab) / denom;
  if (t <= 0.0) {
    mask = 1;
    return a;
  }
  if (t >= 1.0) {
    mask = 2;
    return b;
  }
  mask = 3;
  return a + ab * t;
}

// Closest point to the origin on triangle abc; mask bits 1,2,4 mark retained
// vertices. Degenerate triangles fall back to the best edge.
Vec3 closest_on_triangle(const Vec3& a, const Vec3& b, const Vec3& c, int& mask) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = -a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) {
    mask = 1;
    return a;
  }
  const Vec3 bp = -b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) {
    mask = 2;
    return b;
  }
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    mask = 3;
    return a + ab * (d1 / (d1 - d3));
  }
  const Vec3 cp = -c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) {
    mask = 4;
    return c;
  }
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    mask = 5;
    return a + ac * (d2 / (d2 - d6));
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    mask = 6;
    return b + (c - b) * w;
  }
  const double denom = va + vb + vc;
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    // Collinear vertices: scan the three edges.
    int m01, m02, m12;
    const Vec3 p01 = closest_on_segment(a, b, m01);
    const Vec3 p02 = closest_on_segment(a, c, m02);
    const Vec3 p12 = closest_on_segment(b, c, m12);
    const double q01 = norm2(p01), q02 = norm2(p02), q12 = norm2(p12);
    if (q01 <= q02 && q01 <= q12) {
      mask = m01;
      return p01;
    }
    if (q02 <= q12) {
      mask = (m02 & 1) | ((m02 & 2) << 1);
      return p02;
    }
    mask = m12 << 1;
    return p12;
  }
  const double v = vb / denom;
  const double w = vc / denom;
  mask = 7;
  return a + ab * v + ac * w;
}

double segment_segment_distance2(const Vec3& p1, const Vec3& q1, const Vec3& p2,
                                 const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-30 && e <= 1e-30) {
    return norm2(p1 - p2);
  }
  if (a <= 1e-30) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 1e-30) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return norm2((p1 + d1 * s) - (p2 + d2 * t));
}

double point_triangle_distance2(const Vec3& p, const Tri& t) {
  int mask = 0;
  const Vec3 closest = closest_on_triangle(t[0] - p, t[1] - p, t[2] - p, mask);
  return norm2(closest);
}

// Exact closest-feature scan (9 edge-edge + 6 vertex-face candidates), used
// only when the iterative path fails to converge.
double feature_pair_distance(const Tri& a, const Tri& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    best = std::min(best, point_triangle_distance2(a[i], b));
    best = std::min(best, point_triangle_distance2(b[i], a));
    for (int j = 0; j < 3; ++j) {
      best = std::min(best, segment_segment_distance2(a[i], a[(i + 1) % 3], b[j],
                                                      b[(j + 1) % 3]));
    }
  }
  return std::sqrt(best);
}

struct SimplexResult {
  Vec3 closest;
  int mask = 0;       // retained vertex bits
  bool contained = false;
};

SimplexResult closest_on_tetrahedron(const Vec3& a, const Vec3& b, const Vec3& c,
                                     const Vec3& d) {
  // Origin side tests against each face, with the remaining vertex defining
  // the inside halfspace.
  auto outside = [](const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& opp,
                    bool& degenerate) {
    const Vec3 n = cross(p1 - p0, p2 - p0);
    const double sign_origin = dot(-p0, n);
    const double sign_opp = dot(opp - p0, n);
    degenerate = sign_opp == 0.0;
    return sign_origin * sign_opp < 0.0;
  };

  SimplexResult out;
  bool any_outside = false;
  bool any_degenerate = false;
  double best = std::numeric_limits<double>::infinity();

  struct Face {
    int i0, i1, i2, opp;
  };
  static const Face kFaces[4] = {{0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 3, 1}, {1, 2, 3, 0}};
  const Vec3 pts[4] = {a, b, c, d};

  for (const Face& f : kFaces) {
    bool degenerate = false;
    const bool is_out =
        outside(pts[f.i0], pts[f.i1], pts[f.i2], pts[f.opp], degenerate);
    any_degenerate = any_degenerate || degenerate;
    if (!is_out && !degenerate) continue;
    any_outside = any_outside || is_out;
    int tri_mask = 0;
    const Vec3 p = closest_on_triangle(pts[f.i0], pts[f.i1], pts[f.i2], tri_mask);
    const double q = norm2(p);
    if (q < best) {
      best = q;
      out.closest = p;
      out.mask = ((tri_mask & 1) ? (1 << f.i0) : 0) | ((tri_mask & 2) ? (1 << f.i1) : 0) |
                 ((tri_mask & 4) ? (1 << f.i2) : 0);
    }
  }
  if (!any_outside && !any_degenerate) {
    out.contained = true;
    out.mask = 15;
    out.closest = {0, 0, 0};
  } else if (!any_outside && any_degenerate && !std::isfinite(best)) {
    // Fully flat tetrahedron with no face evaluated: treat as containing.
    out.contained = true;
    out.mask = 15;
    out.closest = {0, 0, 0};
  }
  return out;
}

}  // namespace

double gjk_distance(const Tri& a, const Tri& b) {
  Vec3 w_pts[4];
  int w_ids[4];
  int n = 0;

  Vec3 v = a[0] - b[0];
  if (norm2(v) == 0.0) return 0.0;

  const int kMaxIterations = 64;
  double best_dist2 = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const int ia = support_index(a, -v);
    const int ib = support_index(b, v);
    const Vec3 w = a[ia] - b[ib];
    const int id = ia * 3 + ib;

    const double v2 = norm2(v);
    // Support gap bound: |v| - d* <= (v.v - v.w) / |v|.
    if (v2 - dot(v, w) <= 1e-12 * std::max(1.0, v2)) {
      return std::sqrt(v2);
    }
    bool duplicate = false;
    for (int i = 0; i < n; ++i) duplicate = duplicate || (w_ids[i] == id);
    if (duplicate) return std::sqrt(v2);

    w_pts[n] = w;
    w_ids[n] = id;
    ++n;

    int mask = 0;
    Vec3 closest;
    bool contained = false;
    switch (n) {
      case 1:
        closest = w_pts[0];
        mask = 1;
        break;
      case 2:
        closest = closest_on_segment(w_pts[0], w_pts[1], mask);
        break;
      case 3:
        closest = closest_on_triangle(w_pts[0], w_pts[1], w_pts[2], mask);
        break;
      default: {
        const SimplexResult r =
            closest_on_tetrahedron(w_pts[0], w_pts[1], w_pts[2], w_pts[3]);
        closest = r.closest;
        mask = r.mask;
        contained = r.contained;
        break;
      }
    }
    if (contained || norm2(closest) <= 1e-24) return 0.0;

    // Keep only the supporting vertices.
    int keep = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) {
        w_pts[keep] = w_pts[i];
        w_ids[keep] = w_ids[i];
        ++keep;
      }
    }
    n = keep;
    v = closest;
    const double d2 = norm2(v);
    if (d2 >= best_dist2) return std::sqrt(best_dist2);  // no progress
    best_dist2 = d2;
  }
  return std::min(std::sqrt(best_dist2), feature_pair_distance(a, b));
}

namespace {

struct HullFace {
  int i0, i1, i2;
  Vec3 normal;     // outward unit normal
  double offset;   // dot(normal, vertex)
};

// Expands the polytope over the Minkowski difference vertices until every
// vertex is enclosed, then reads the minimum face offset from the origin.
// The difference of two triangles has at most 9 vertices, so the expansion
// always terminates after a handful of insertions.
bool make_face(const std::vector<Vec3>& verts, int i0, int i1, int i2, const Vec3& interior,
               HullFace& out) {
  const Vec3& p0 = verts[i0];
  Vec3 n = cross(verts[i1] - p0, verts[i2] - p0);
  const double len = norm(n);
  if (len < 1e-14) return false;
  n = n / len;
  if (dot(n, p0 - interior) < 0.0) {
    n = -n;
    std::swap(i1, i2);
  }
  out = {i0, i1, i2, n, dot(n, p0)};
  return true;
}

}  // namespace

EpaResult epa_penetration(const Tri& a, const Tri& b) {
  std::vector<Vec3> verts;
  verts.reserve(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) verts.push_back(a[i] - b[j]);

  double scale = 0.0;
  for (const Vec3& v : verts) scale = std::max(scale, norm(v));
  scale = std::max(scale, 1e-12);

  // Spanning tetrahedron of the difference vertices.
  int e0 = 0, e1 = 0;
  double best = -1.0;
  for (int i = 0; i < 9; ++i) {
    for (int j = i + 1; j < 9; ++j) {
      const double d = norm2(verts[i] - verts[j]);
      if (d > best) {
        best = d;
        e0 = i;
        e1 = j;
      }
    }
  }
  if (best <= 1e-28 * scale * scale) {
    // All difference vertices coincide: the triangles are translates of a
    // point set; touching with zero depth.
    return {0.0, Vec3{0, 0, 1}};
  }
  const Vec3 edge = verts[e1] - verts[e0];
  int e2 = -1;
  best = -1.0;
  for (int i = 0; i < 9; ++i) {
    const double d = norm2(cross(edge, verts[i] - verts[e0]));
    if (d > best) {
      best = d;
      e2 = i;
    }
  }
  const double edge2 = norm2(edge);
  if (best <= 1e-24 * edge2 * scale * scale) {
    // Collinear difference: depth 0 along any perpendicular.
    Vec3 perp = cross(edge, Vec3{1, 0, 0});
    if (norm2(perp) < 1e-20 * edge2) perp = cross(edge, Vec3{0, 1, 0});
    return {0.0, perp / norm(perp)};
  }
  const Vec3 plane_n = cross(edge, verts[e2] - verts[e0]);
  int e3 = -1;
  best = -1.0;
  for (int i = 0; i < 9; ++i) {
    const double d = std::abs(dot(plane_n, verts[i] - verts[e0]));
    if (d > best) {
      best = d;
      e3 = i;
    }
  }
  const double plane_n_len = norm(plane_n);
  if (best <= 1e-9 * plane_n_len * scale) {
    // Flat (coplanar) difference: any out-of-plane translation separates.
    return {0.0, plane_n / plane_n_len};
  }

  const Vec3 interior =
      (verts[e0] + verts[e1] + verts[e2] + verts[e3]) * 0.25;

  std::vector<HullFace> faces;
  {
    HullFace f;
    const int t[4][3] = {{e0, e1, e2}, {e0, e1, e3}, {e0, e2, e3}, {e1, e2, e3}};
    for (const auto& idx : t) {
      if (make_face(verts, idx[0], idx[1], idx[2], interior, f)) faces.push_back(f);
    }
  }

  const double eps_out = 1e-12 * scale;
  for (int vi = 0; vi < static_cast<int>(verts.size()); ++vi) {
    if (vi == e0 || vi == e1 || vi == e2 || vi == e3) continue;
    // Collect faces visible from this vertex; replace them with a fan over
    // the horizon edges.
    std::vector<HullFace> kept;
    std::vector<std::pair<int, int>> horizon;
    bool outside = false;
    auto add_edge = [&horizon](int u, int v) {
      for (auto it = horizon.begin(); it != horizon.end(); ++it) {
        if (it->first == v && it->second == u) {
          horizon.erase(it);
          return;
        }
      }
      horizon.emplace_back(u, v);
    };
    for (const HullFace& f : faces) {
      if (dot(f.normal, verts[vi]) - f.offset > eps_out) {
        outside = true;
        add_edge(f.i0, f.i1);
        add_edge(f.i1, f.i2);
        add_edge(f.i2, f.i0);
      } else {
        kept.push_back(f);
      }
    }
    if (!outside) continue;
    for (const auto& [u, v] : horizon) {
      HullFace f;
      if (make_face(verts, u, v, vi, interior, f)) kept.push_back(f);
    }
    faces = std::move(kept);
  }

  EpaResult result;
  result.depth = std::numeric_limits<double>::infinity();
  for (const HullFace& f : faces) {
    if (f.offset < result.depth) {
      result.depth = f.offset;
      result.normal = f.normal;
    }
  }
  if (!std::isfinite(result.depth)) {
    return {0.0, Vec3{0, 0, 1}};
  }
  result.depth = std::max(0.0, result.depth);
  return result;
}

}  // namespace artic
