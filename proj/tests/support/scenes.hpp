#pragma once

#include <optional>
#include <string>

#include "artic/mesh.hpp"
#include "artic/shape.hpp"

namespace artic::testing {

// Axis-aligned box as a 12-triangle soup.
TriMesh make_box(const Vec3& lo, const Vec3& hi);
void append_box(TriMesh& mesh, const Vec3& lo, const Vec3& hi);

// Box rotated about its center.
TriMesh make_rotated_box(const Vec3& center, const Vec3& half, const Mat3& rotation);

// Random triangle soup inside a cube of the given extent.
TriMesh make_soup(int tri_count, double extent, double max_edge, SplitMix64& rng);

TriMesh make_uv_sphere(const Vec3& center, double radius, int stacks, int slices);

Mat3 random_rotation(SplitMix64& rng);
Vec3 random_unit(SplitMix64& rng);

// Four-part cabinet: frame body (0), edge-hinged door (1), drawer (2), and a
// shelf wedged between cleats (3). The base configuration searches to the
// pattern (fixed, revolute, prismatic, fixed).
struct CabinetParams {
  // Exterior post that stops the door swing at roughly this angle.
  std::optional<double> door_stop_angle_deg;
  // Front sill plus a deeper drawer: both drawer travel directions drop
  // below the prismatic threshold.
  bool drawer_sealed = false;
  // Widens the shelf into the side walls to create rest interpenetration.
  double shelf_embed = 0.0;
};

Shape make_cabinet(const CabinetParams& params = {});

// Geometry constants of the base cabinet, for analytic assertions.
struct CabinetFacts {
  Vec3 door_hinge_pivot;   // rear-bottom corner of the door's hinge edge
  Vec3 door_hinge_axis;    // vertical
  Vec3 drawer_pull_axis;   // front direction
  double drawer_back_gap;  // push-in clearance
};
CabinetFacts cabinet_facts();

// Block inside a closed shell with a gap well under the contact tolerance.
Shape make_snug_box();

// Flat panel with a handle resting on its front face.
Shape make_handle_panel();

// Single free-floating part.
Shape make_free_box();

// Random one- or two-part shape (box parts, arbitrary orientation).
Shape make_random_shape(SplitMix64& rng, const std::string& id);

// Writes `count` synthetic shapes (a mix of the above) under dir/shape_XXX.
void write_synthetic_dataset(const std::string& dir, int count, uint64_t seed);

}  // namespace artic::testing
