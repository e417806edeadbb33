#include "artic/geom.hpp"

#include <algorithm>
#include <limits>

namespace artic {

namespace {

// Flip v so its largest-magnitude component is positive; ties pick the
// earliest coordinate index.
Vec3 canonical_sign(const Vec3& v) {
  int idx = 0;
  double best = std::abs(v.x);
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      idx = i;
    }
  }
  return v[idx] < 0.0 ? -v : v;
}

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

// Cyclic Jacobi eigendecomposition of a symmetric 3x3 matrix. Returns
// eigenvalues in w and eigenvectors as columns of v.
bool jacobi_symmetric3(const Mat3& a_in, Vec3& w, Mat3& v) {
  Mat3 a = a_in;
  v = Mat3::identity();
  const int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double diag = a(0, 0) * a(0, 0) + a(1, 1) * a(1, 1) + a(2, 2) * a(2, 2);
    if (off <= 1e-30 * std::max(1.0, diag)) {
      w = {a(0, 0), a(1, 1), a(2, 2)};
      return true;
    }
    static const int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pq : kPairs) {
      const int p = pq[0], q = pq[1];
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      Mat3 r = Mat3::identity();
      r(p, p) = c;
      r(q, q) = c;
      r(p, q) = s;
      r(q, p) = -s;
      a = r.transposed() * a * r;
      a(p, q) = a(q, p) = 0.0;
      v = v * r;
    }
  }
  return false;
}

}  // namespace

Mat3 rotation_about_axis(const Dir3& axis, double angle) {
  const Vec3 u = axis.vec();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  Mat3 r;
  r(0, 0) = c + u.x * u.x * t;
  r(0, 1) = u.x * u.y * t - u.z * s;
  r(0, 2) = u.x * u.z * t + u.y * s;
  r(1, 0) = u.y * u.x * t + u.z * s;
  r(1, 1) = c + u.y * u.y * t;
  r(1, 2) = u.y * u.z * t - u.x * s;
  r(2, 0) = u.z * u.x * t - u.y * s;
  r(2, 1) = u.z * u.y * t + u.x * s;
  r(2, 2) = c + u.z * u.z * t;
  return r;
}

bool RigidPose::is_identity() const {
  if (translation.x != 0.0 || translation.y != 0.0 || translation.z != 0.0) return false;
  const Mat3 id = Mat3::identity();
  for (int i = 0; i < 9; ++i)
    if (rotation.m[i] != id.m[i]) return false;
  return true;
}

bool RigidPose::is_rigid(double tol) const {
  const Mat3 rtr = rotation.transposed() * rotation;
  const Mat3 id = Mat3::identity();
  for (int i = 0; i < 9; ++i)
    if (std::abs(rtr.m[i] - id.m[i]) > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

double aabb_distance(const Aabb& a, const Aabb& b) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double gap = std::max(0.0, std::max(b.min[i] - a.max[i], a.min[i] - b.max[i]));
    d2 += gap * gap;
  }
  return std::sqrt(d2);
}

PcaResult pca_axes(std::span<const Vec3> points) {
  if (points.size() < 3) {
    throw Error(ErrorKind::kInvalidInput, "pca_axes: need at least 3 points");
  }
  Vec3 mean{0, 0, 0};
  for (const Vec3& p : points) {
    if (!is_finite(p)) throw Error(ErrorKind::kInvalidInput, "pca_axes: non-finite point");
    mean += p;
  }
  mean = mean / static_cast<double>(points.size());

  Mat3 cov;
  cov.m = {0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    cov(0, 0) += d.x * d.x;
    cov(0, 1) += d.x * d.y;
    cov(0, 2) += d.x * d.z;
    cov(1, 1) += d.y * d.y;
    cov(1, 2) += d.y * d.z;
    cov(2, 2) += d.z * d.z;
  }
  const double inv_n = 1.0 / static_cast<double>(points.size());
  cov(0, 0) *= inv_n;
  cov(0, 1) *= inv_n;
  cov(0, 2) *= inv_n;
  cov(1, 1) *= inv_n;
  cov(1, 2) *= inv_n;
  cov(2, 2) *= inv_n;
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);

  Vec3 evals;
  Mat3 evecs;
  if (!jacobi_symmetric3(cov, evals, evecs)) {
    throw Error(ErrorKind::kNumeric, "pca_axes: eigensolver did not converge");
  }

  struct Pair {
    double value;
    Vec3 axis;
  };
  std::array<Pair, 3> pairs;
  for (int i = 0; i < 3; ++i) {
    Vec3 axis = evecs.col(i);
    axis = axis / norm(axis);
    pairs[i] = {std::max(0.0, evals[i]), canonical_sign(axis)};
  }
  const double scale = std::max({pairs[0].value, pairs[1].value, pairs[2].value, 1e-300});
  std::sort(pairs.begin(), pairs.end(), [scale](const Pair& a, const Pair& b) {
    if (std::abs(a.value - b.value) > 1e-12 * scale) return a.value > b.value;
    return lex_less(a.axis, b.axis);
  });

  PcaResult out;
  out.eigenvalues = {pairs[0].value, pairs[1].value, pairs[2].value};
  out.axes[0] = pairs[0].axis;
  out.axes[1] = pairs[1].axis;
  Vec3 third = cross(out.axes[0], out.axes[1]);
  const double third_len = norm(third);
  if (third_len < 1e-9) {
    throw Error(ErrorKind::kNumeric, "pca_axes: degenerate eigenvector frame");
  }
  out.axes[2] = third / third_len;
  return out;
}

Obb obb_of(std::span<const Vec3> points, const PcaResult& pca) {
  if (points.empty()) {
    throw Error(ErrorKind::kInvalidInput, "obb_of: empty point set");
  }
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  for (const Vec3& p : points) {
    for (int i = 0; i < 3; ++i) {
      const double d = dot(p, pca.axes[i]);
      lo[i] = std::min(lo[i], d);
      hi[i] = std::max(hi[i], d);
    }
  }
  Obb box;
  box.axes = pca.axes;
  box.eigenvalues = pca.eigenvalues;
  box.half_extents = (hi - lo) * 0.5;
  const Vec3 mid = (hi + lo) * 0.5;
  box.center = pca.axes[0] * mid.x + pca.axes[1] * mid.y + pca.axes[2] * mid.z;
  return box;
}

Aabb aabb_of(std::span<const Vec3> points) {
  if (points.empty()) {
    throw Error(ErrorKind::kInvalidInput, "aabb_of: empty point set");
  }
  Aabb box = Aabb::empty();
  for (const Vec3& p : points) box.expand(p);
  return box;
}

std::array<Vec3, 9> aabb_pivots(std::span<const Vec3> points) {
  const Aabb box = aabb_of(points);
  Vec3 mean{0, 0, 0};
  for (const Vec3& p : points) mean += p;
  mean = mean / static_cast<double>(points.size());

  std::array<Vec3, 9> out;
  for (int i = 0; i < 8; ++i) out[i] = box.corner(i);
  out[8] = mean;
  return out;
}

Vec3 rotate_about(const Vec3& p, const Dir3& axis, const Vec3& pivot, double angle) {
  const Vec3 u = axis.vec();
  const Vec3 d = p - pivot;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vec3 rotated = d * c + cross(u, d) * s + u * (dot(u, d) * (1.0 - c));
  return rotated + pivot;
}

double line_line_distance(const Line3& a, const Line3& b) {
  const Vec3 n = cross(a.direction.vec(), b.direction.vec());
  const double n_len = norm(n);
  const Vec3 w = b.origin - a.origin;
  if (n_len < 1e-12) {
    return point_line_distance(b.origin, a);
  }
  return std::abs(dot(w, n)) / n_len;
}

double point_line_distance(const Vec3& p, const Line3& line) {
  const Vec3 w = p - line.origin;
  const Vec3 rej = w - line.direction.vec() * dot(w, line.direction.vec());
  return norm(rej);
}

}  // namespace artic
