#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "artic/geom.hpp"

namespace artic {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  Vec3 tri_vertex(int tri, int corner) const { return vertices[triangles[tri][corner]]; }
};

// Structural validation: index bounds, finite coordinates, at least one
// triangle. Returns the indices of zero-area triangles (permitted, flagged).
std::vector<int> validate_mesh(const TriMesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double mesh_area(const TriMesh& mesh);
Aabb mesh_aabb(const TriMesh& mesh);

// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
// needed so outputs are stable across platforms and worker counts.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  SplitMix64 rng(seed ^ (salt * 0xA24BAED4963EE407ull + 0x9FB21C651E98DF25ull));
  return rng.next();
}

// Area-weighted uniform surface samples, deterministic for a fixed seed.
std::vector<Vec3> sample_surface(const TriMesh& mesh, int count, uint64_t seed);

}  // namespace artic
