#pragma once

#include <optional>
#include <string>
#include <vector>

#include "artic/geom.hpp"
#include "artic/mesh.hpp"

namespace artic {

// Per-part annotation: two motion bits, axis/pivot present only when the
// bits require them, optional admissible ranges (degrees for revolute,
// model units for prismatic).
struct GroundTruthArticulation {
  int part_id = -1;
  bool m_rev = false;
  bool m_pri = false;
  std::optional<Dir3> axis;
  std::optional<Vec3> pivot;
  std::optional<std::array<double, 2>> range_rev_deg;
  std::optional<std::array<double, 2>> range_pri;
};

struct Part {
  int id = -1;
  std::string mesh_file;
  TriMesh mesh;
  std::optional<std::string> label;
  std::optional<GroundTruthArticulation> gt;

  // Filled by prepare_shape.
  std::vector<Vec3> samples;
  Obb obb;
  Aabb aabb;
  std::vector<int> degenerate_triangles;

  bool prepared() const { return !samples.empty(); }
};

struct Normalization {
  double scale = 1.0;
  Vec3 offset{0, 0, 0};  // applied as p' = scale * p + offset
};

struct Shape {
  std::string id;
  std::vector<Part> parts;
  std::string up_axis = "y";
  Normalization normalization;
};

// Loads a shape directory: a `shape.json` manifest plus one triangulated-OBJ
// mesh per part (only `v` and 3-index `f` records are honored; other record
// types are reported through `warnings` and skipped).
Shape load_shape(const std::string& directory, std::vector<std::string>* warnings = nullptr);

// Writes shape.json plus one OBJ per part. Floats use 17 significant digits
// so a reload reproduces the shape bit-exactly.
void save_shape(const Shape& shape, const std::string& directory);

// Dense surface sampling plus per-part OBB/AABB. The per-part sampling seed
// is the global seed mixed with the part id, so adding a part never perturbs
// the samples of existing parts.
void prepare_shape(Shape& shape, int sample_count, uint64_t seed);

// Uniform scale so the longest side of the union AABB equals 1, then a
// translation putting the mean of all part samples at the origin. Ground
// truth annotations are mapped by the same transform, which is recorded in
// shape.normalization. Requires prepare_shape to have run.
void normalize_shape(Shape& shape);

TriMesh load_obj(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_obj(const TriMesh& mesh, const std::string& path);

}  // namespace artic
