#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "artic/error.hpp"

namespace artic {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}
inline Vec3 cwise_min(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 cwise_max(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

// Unit-length direction. The constructor enforces |v| = 1 within 1e-9;
// use Dir3::normalized to build one from an arbitrary nonzero vector.
class Dir3 {
 public:
  Dir3() : v_{0, 0, 1} {}

  explicit Dir3(const Vec3& v) : v_(v) {
    if (!is_finite(v) || std::abs(norm(v) - 1.0) > 1e-9) {
      throw Error(ErrorKind::kInvalidInput, "Dir3: vector is not unit length");
    }
  }

  static Dir3 normalized(const Vec3& v) {
    const double len = norm(v);
    if (!(len > 1e-12) || !std::isfinite(len)) {
      throw Error(ErrorKind::kDegenerateInput, "Dir3: cannot normalize near-zero vector");
    }
    Dir3 d;
    d.v_ = v / len;
    return d;
  }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  Dir3 flipped() const {
    Dir3 d;
    d.v_ = -v_;
    return d;
  }

 private:
  Vec3 v_;
};

struct Mat3 {
  // Row-major.
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Mat3 out;
    out.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
    return out;
  }
  static Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 out;
    out.m = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
    return out;
  }

  double operator()(int r, int c) const { return m[r * 3 + c]; }
  double& operator()(int r, int c) { return m[r * 3 + c]; }

  Vec3 row(int r) const { return {m[r * 3], m[r * 3 + 1], m[r * 3 + 2]}; }
  Vec3 col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

  Vec3 operator*(const Vec3& v) const {
    return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        out(r, c) = m[r * 3] * o(0, c) + m[r * 3 + 1] * o(1, c) + m[r * 3 + 2] * o(2, c);
    return out;
  }
  Mat3 transposed() const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
    return out;
  }
  double determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
};

// Rotation matrix for a rotation of `angle` radians about the unit `axis`
// through the origin (Rodrigues form).
Mat3 rotation_about_axis(const Dir3& axis, double angle);

struct RigidPose {
  Mat3 rotation;
  Vec3 translation;

  static RigidPose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  bool is_identity() const;
  // Orthonormal with determinant +1 within tol.
  bool is_rigid(double tol = 1e-9) const;
};

struct Aabb {
  Vec3 min{0, 0, 0};
  Vec3 max{0, 0, 0};

  static Aabb empty() {
    Aabb b;
    constexpr double inf = std::numeric_limits<double>::infinity();
    b.min = {inf, inf, inf};
    b.max = {-inf, -inf, -inf};
    return b;
  }
  void expand(const Vec3& p) {
    min = cwise_min(min, p);
    max = cwise_max(max, p);
  }
  void expand(const Aabb& o) {
    min = cwise_min(min, o.min);
    max = cwise_max(max, o.max);
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
  bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
  bool overlaps(const Aabb& o) const {
    return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y &&
           min.z <= o.max.z && o.min.z <= max.z;
  }
  // Corner i uses bit 0 for x, bit 1 for y, bit 2 for z (set bit = max side).
  Vec3 corner(int i) const {
    return {(i & 1) ? max.x : min.x, (i & 2) ? max.y : min.y, (i & 4) ? max.z : min.z};
  }
  double longest_side() const {
    const Vec3 e = extent();
    return std::max(e.x, std::max(e.y, e.z));
  }
};

// Separation distance between two boxes (0 if overlapping).
double aabb_distance(const Aabb& a, const Aabb& b);

struct Obb {
  Vec3 center;
  std::array<Vec3, 3> axes;         // unit, mutually orthogonal, eigenvalue-descending
  Vec3 half_extents;                // along axes, nonnegative
  Vec3 eigenvalues;                 // descending

  // Maximum extent of the largest box axis.
  double max_extent() const {
    return 2.0 * std::max(half_extents.x, std::max(half_extents.y, half_extents.z));
  }
};

struct Line3 {
  Vec3 origin;
  Dir3 direction;

  Line3(const Vec3& o, const Dir3& d) : origin(o), direction(d) {}
};

struct PcaResult {
  std::array<Vec3, 3> axes;  // unit, right-handed, eigenvalue-descending
  Vec3 eigenvalues;          // descending, nonnegative
};

// PCA axes of a point set: eigenvectors of the 1/N covariance of mean-centered
// points, ordered by descending eigenvalue. Signs are canonicalized (largest-
// magnitude component positive, earliest index on ties) and the third axis is
// the cross product of the first two, so the frame is right-handed and the
// output is deterministic.
PcaResult pca_axes(std::span<const Vec3> points);

// Oriented bounding box from min/max projections onto the given PCA axes.
Obb obb_of(std::span<const Vec3> points, const PcaResult& pca);

// The 8 AABB corners of the point set plus its centroid, in corner-index
// order (see Aabb::corner) followed by the centroid. Always 9 entries;
// degenerate boxes keep their duplicates.
std::array<Vec3, 9> aabb_pivots(std::span<const Vec3> points);

Aabb aabb_of(std::span<const Vec3> points);

// Rodrigues rotation of p about the axis line (axis, pivot) by angle radians.
Vec3 rotate_about(const Vec3& p, const Dir3& axis, const Vec3& pivot, double angle);

inline Vec3 translate_along(const Vec3& p, const Dir3& axis, double t) {
  return p + axis.vec() * t;
}

// Minimum distance between two infinite lines; parallel lines fall back to
// point-to-line projection.
double line_line_distance(const Line3& a, const Line3& b);

double point_line_distance(const Vec3& p, const Line3& line);

}  // namespace artic
