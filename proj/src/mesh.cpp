#include "artic/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "artic/error.hpp"

namespace artic {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

std::vector<int> validate_mesh(const TriMesh& mesh) {
  if (mesh.triangles.empty()) {
    throw Error(ErrorKind::kValidation, "mesh has no triangles");
  }
  const int vcount = static_cast<int>(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) {
    if (!is_finite(v)) throw Error(ErrorKind::kValidation, "mesh has non-finite vertex");
  }
  std::vector<int> degenerate;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int idx = mesh.triangles[t][k];
      if (idx < 0 || idx >= vcount) {
        throw Error(ErrorKind::kValidation,
                    "triangle index out of range: " + std::to_string(idx));
      }
    }
    const auto& tri = mesh.triangles[t];
    if (triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) ==
        0.0) {
      degenerate.push_back(static_cast<int>(t));
    }
  }
  return degenerate;
}

double mesh_area(const TriMesh& mesh) {
  double area = 0.0;
  for (const auto& tri : mesh.triangles) {
    area += triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
  }
  return area;
}

Aabb mesh_aabb(const TriMesh& mesh) {
  return aabb_of(mesh.vertices);
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, int count, uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::kInvalidInput, "sample_surface: count must be >= 1");

  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    total += triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput, "sample_surface: mesh has zero total area");
  }

  SplitMix64 rng(seed);
  std::vector<Vec3> samples;
  samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double pick = rng.next_double() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const size_t t = std::min<size_t>(it - cumulative.begin(), cumulative.size() - 1);
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    const double r1 = std::sqrt(rng.next_double());
    const double r2 = rng.next_double();
    samples.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return samples;
}

}  // namespace artic
