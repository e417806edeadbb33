#include <doctest.h>

#include <cmath>

#include "artic/candidates_io.hpp"
#include "artic/eval.hpp"
#include "artic/search.hpp"
#include "support/scenes.hpp"

using namespace artic;

namespace {

Shape prepared(Shape shape, int samples = 4096, uint64_t seed = 0) {
  prepare_shape(shape, samples, seed);
  normalize_shape(shape);
  return shape;
}

double axis_angle_deg(const Dir3& a, const Vec3& b) {
  const double c = std::clamp(std::abs(dot(a.vec(), b)) / norm(b), 0.0, 1.0);
  return rad_to_deg(std::acos(c));
}

const CandidateArticulation* find_part(const std::vector<CandidateArticulation>& results,
                                       int part_id) {
  for (const auto& r : results) {
    if (r.part_id == part_id) return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("candidate_axes: elongated handle and flat panel") {
  Shape handle;
  handle.id = "handle";
  Part part;
  part.id = 0;
  part.mesh = testing::make_box({-0.04, -0.5, -0.04}, {0.04, 0.5, 0.04});
  handle.parts.push_back(part);
  prepare_shape(handle, 2048, 1);
  const auto axes = candidate_axes(handle.parts[0]);
  CHECK(axes.size() == 3);
  CHECK(axis_angle_deg(axes[0].first, {0, 1, 0}) < 2.0);
  CHECK(axes[0].second >= axes[1].second);
  CHECK(axes[1].second >= axes[2].second);

  Shape panel;
  panel.id = "panel";
  Part flat;
  flat.id = 0;
  flat.mesh = testing::make_box({-0.5, -0.3, -0.01}, {0.5, 0.3, 0.01});
  panel.parts.push_back(flat);
  prepare_shape(panel, 2048, 1);
  const auto panel_axes = candidate_axes(panel.parts[0]);
  // Third axis = panel normal.
  CHECK(axis_angle_deg(panel_axes[2].first, {0, 0, 1}) < 2.0);
}

TEST_CASE("enumerate_revolute: always 27 specs, axis-major, pivots finite") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Shape shape = prepared(testing::make_random_shape(rng, "r"), 512, trial);
    for (const Part& part : shape.parts) {
      const auto specs = enumerate_revolute(part);
      REQUIRE(specs.size() == 27);
      const auto axes = candidate_axes(part);
      for (int a = 0; a < 3; ++a) {
        for (int p = 0; p < 9; ++p) {
          const MotionSpec& spec = specs[a * 9 + p];
          CHECK(spec.kind == MotionSpec::Kind::kRevolute);
          CHECK(dot(spec.axis.vec(), axes[a].first.vec()) == doctest::Approx(1.0));
          REQUIRE(spec.pivot.has_value());
          CHECK(is_finite(*spec.pivot));
        }
      }
      // Pivot order: the 8 box corners then the centroid.
      const auto pivots = aabb_pivots(part.samples);
      for (int p = 0; p < 9; ++p) {
        CHECK(norm(*specs[p].pivot - pivots[p]) == 0.0);
      }
    }
  }
}

TEST_CASE("search_shape: cabinet pattern (fixed, revolute, prismatic, fixed)") {
  const Shape shape = prepared(testing::make_cabinet());
  const SearchConfig config;
  const auto results = search_shape(shape, config);
  REQUIRE(results.size() == 4);

  const CandidateArticulation& body = *find_part(results, 0);
  CHECK_FALSE(body.m_rev);
  CHECK_FALSE(body.m_pri);
  CHECK(body.pruned.size() == 30);

  const CandidateArticulation& door = *find_part(results, 1);
  CHECK(door.m_rev);
  CHECK_FALSE(door.m_pri);
  CHECK(door.revolute.size() <= 3);

  // The hinge candidate: vertical axis, pivot on the hinge edge, at least a
  // quarter turn of range on one side.
  const testing::CabinetFacts facts = testing::cabinet_facts();
  bool hinge_found = false;
  for (const RevoluteCandidate& rc : door.revolute) {
    if (axis_angle_deg(rc.axis, facts.door_hinge_axis) < 2.0) {
      hinge_found = true;
      const Vec3 hinge_point =
          facts.door_hinge_pivot * shape.normalization.scale + shape.normalization.offset;
      const Line3 hinge_line(hinge_point, Dir3::normalized(facts.door_hinge_axis));
      CHECK(line_line_distance(Line3(rc.pivot, rc.axis), hinge_line) < 0.05);
      CHECK(rc.range.max_side() >= deg_to_rad(90.0));
    }
  }
  CHECK(hinge_found);

  const CandidateArticulation& drawer = *find_part(results, 2);
  CHECK_FALSE(drawer.m_rev);
  CHECK(drawer.m_pri);
  REQUIRE(drawer.prismatic.size() >= 1);
  bool pull_found = false;
  for (const PrismaticCandidate& pc : drawer.prismatic) {
    if (axis_angle_deg(pc.axis, facts.drawer_pull_axis) < 2.0) pull_found = true;
  }
  CHECK(pull_found);

  const CandidateArticulation& shelf = *find_part(results, 3);
  CHECK_FALSE(shelf.m_rev);
  CHECK_FALSE(shelf.m_pri);
  CHECK(shelf.pruned.size() == 30);
}

TEST_CASE("search_part: candidate counts and pivot pruning bookkeeping") {
  const Shape shape = prepared(testing::make_cabinet(), 1024);
  const SearchConfig config;
  const auto results = search_shape(shape, config);
  for (const auto& part : results) {
    CHECK(part.prismatic.size() <= 3);
    CHECK(part.revolute.size() <= 3);
    // Pre-pruning pool: 27 revolute + 3 prismatic, split between survivors
    // and the pruned table.
    int rev_pruned = 0, pri_pruned = 0;
    for (const auto& pruned : part.pruned) {
      if (pruned.kind == MotionSpec::Kind::kRevolute) {
        ++rev_pruned;
        CHECK(pruned.pivot_index >= 0);
        CHECK(pruned.pivot_index < 9);
      } else {
        ++pri_pruned;
        CHECK(pruned.pivot_index == -1);
      }
    }
    CHECK(rev_pruned + int(part.revolute.size()) == 27);
    CHECK(pri_pruned + int(part.prismatic.size()) == 3);
    CHECK(part.m_rev == !part.revolute.empty());
    CHECK(part.m_pri == !part.prismatic.empty());
    // Lists ordered by eigenvalue rank.
    for (size_t i = 1; i < part.revolute.size(); ++i) {
      CHECK(part.revolute[i - 1].eigenvalue_rank < part.revolute[i].eigenvalue_rank);
    }
    for (size_t i = 1; i < part.prismatic.size(); ++i) {
      CHECK(part.prismatic[i - 1].eigenvalue_rank < part.prismatic[i].eigenvalue_rank);
    }
    // Every surviving revolute range clears omega; prismatic clears epsilon.
    for (const auto& rc : part.revolute) {
      CHECK(rc.range.max_side() >= deg_to_rad(config.omega_deg));
    }
  }
}

TEST_CASE("search_shape: single-part shape gets cap-limited candidates") {
  const Shape shape = prepared(testing::make_free_box(), 1024);
  const auto results = search_shape(shape, SearchConfig{});
  REQUIRE(results.size() == 1);
  const CandidateArticulation& part = results[0];
  CHECK(part.m_rev);
  CHECK(part.m_pri);
  CHECK(part.prismatic.size() == 3);
  CHECK(part.revolute.size() == 3);
  const double extent = shape.parts[0].obb.max_extent();
  for (const auto& pc : part.prismatic) {
    CHECK(pc.range.pos == doctest::Approx(extent));
    CHECK(pc.range.neg == doctest::Approx(-extent));
  }
  for (const auto& rc : part.revolute) {
    CHECK(rc.range.pos == doctest::Approx(kPi));
    CHECK(rc.range.neg == doctest::Approx(-kPi));
  }
}

TEST_CASE("search_shape: deterministic byte-identical reruns") {
  const Shape shape = prepared(testing::make_cabinet(), 512, 7);
  SearchConfig config;
  config.sample_count = 512;
  config.seed = 7;
  const auto first = search_shape(shape, config);
  const auto second = search_shape(shape, config);
  const std::string a = candidates_to_json("cabinet", "h", first);
  const std::string b = candidates_to_json("cabinet", "h", second);
  CHECK(a == b);
}

TEST_CASE("search results re-validate at a quarter step") {
  const Shape shape = prepared(testing::make_cabinet(), 1024);
  const SearchConfig config;
  const ShapeGeometry geometry = ShapeGeometry::build(shape);
  const auto results = search_shape(shape, config);
  for (size_t i = 0; i < results.size(); ++i) {
    const MotionScene scene =
        make_motion_scene(shape, geometry, int(i), config.eps_contact);
    const double extent = shape.parts[i].obb.max_extent();
    for (const auto& pc : results[i].prismatic) {
      const MotionSpec spec = MotionSpec::prismatic(pc.axis);
      const double step = extent / config.prismatic_step_div / 4.0;
      for (double t = pc.range.neg; t <= pc.range.pos; t += step) {
        CHECK(classify_pose(scene, pose_at(spec, t), config.eps_contact) ==
              PoseVerdict::kValid);
      }
    }
    for (const auto& rc : results[i].revolute) {
      const MotionSpec spec = MotionSpec::revolute(rc.axis, rc.pivot);
      const double step = deg_to_rad(config.revolute_step_deg) / 4.0;
      for (double t = rc.range.neg; t <= rc.range.pos; t += step) {
        CHECK(classify_pose(scene, pose_at(spec, t), config.eps_contact) ==
              PoseVerdict::kValid);
      }
    }
  }
}

TEST_CASE("search_shape: whole-shape translation cancels after normalization") {
  Shape base = testing::make_cabinet();
  Shape moved = testing::make_cabinet();
  for (Part& part : moved.parts) {
    for (Vec3& v : part.mesh.vertices) v += Vec3{0.25, -0.5, 0.125};
    if (part.gt && part.gt->pivot) *part.gt->pivot += Vec3{0.25, -0.5, 0.125};
  }
  prepare_shape(base, 1024, 3);
  prepare_shape(moved, 1024, 3);
  normalize_shape(base);
  normalize_shape(moved);

  SearchConfig config;
  config.sample_count = 1024;
  config.seed = 3;
  const auto a = search_shape(base, config);
  const auto b = search_shape(moved, config);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].m_rev == b[i].m_rev);
    CHECK(a[i].m_pri == b[i].m_pri);
    REQUIRE(a[i].revolute.size() == b[i].revolute.size());
    for (size_t k = 0; k < a[i].revolute.size(); ++k) {
      CHECK(std::abs(dot(a[i].revolute[k].axis.vec(), b[i].revolute[k].axis.vec())) >
            0.9999);
      CHECK(a[i].revolute[k].range.pos ==
            doctest::Approx(b[i].revolute[k].range.pos).epsilon(1e-6));
    }
  }
}

TEST_CASE("search_part: degenerate part reports fixed with a diagnostic") {
  Shape shape = prepared(testing::make_cabinet(), 512);
  // Forge a degenerate part: all samples identical.
  shape.parts[3].samples.assign(shape.parts[3].samples.size(), Vec3{0.1, 0.1, 0.1});
  shape.parts[3].obb.eigenvalues = {0, 0, 0};
  shape.parts[3].obb.half_extents = {0, 0, 0};
  const ShapeGeometry geometry = ShapeGeometry::build(shape);
  const CandidateArticulation result = search_part(shape, geometry, 3, SearchConfig{});
  CHECK_FALSE(result.m_rev);
  CHECK_FALSE(result.m_pri);
  REQUIRE(result.diagnostic.has_value());
  CHECK(result.diagnostic->find("degenerate") != std::string::npos);
}

TEST_CASE("search_shape survives pathological segmentations") {
  // Two identical fully overlapping parts: huge rest penetration, absorbed
  // by the baselines; must complete without crashing.
  Shape twins;
  twins.id = "twins";
  for (int i = 0; i < 2; ++i) {
    Part part;
    part.id = i;
    part.mesh = testing::make_box({-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3});
    twins.parts.push_back(part);
  }
  prepare_shape(twins, 512, 0);
  normalize_shape(twins);
  SearchConfig config;
  config.sample_count = 512;
  const auto twin_results = search_shape(twins, config);
  CHECK(twin_results.size() == 2);

  // A flat single-triangle part next to a box: planar PCA (one zero
  // eigenvalue) still yields three axes and a searchable part.
  Shape flat;
  flat.id = "flat";
  Part tri;
  tri.id = 0;
  tri.mesh.vertices = {{-0.3, 0.0, -0.3}, {0.3, 0.0, -0.3}, {0.0, 0.0, 0.3}};
  tri.mesh.triangles = {{0, 1, 2}};
  flat.parts.push_back(tri);
  Part box;
  box.id = 1;
  box.mesh = testing::make_box({-0.3, -0.4, -0.3}, {0.3, 0.0, 0.3});
  flat.parts.push_back(box);
  prepare_shape(flat, 512, 0);
  normalize_shape(flat);
  const auto flat_results = search_shape(flat, config);
  CHECK(flat_results.size() == 2);
  CHECK_FALSE(flat_results[0].diagnostic.has_value());
  const auto axes = candidate_axes(flat.parts[0]);
  CHECK(axes[2].second == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("candidates json round-trip") {
  const Shape shape = prepared(testing::make_cabinet(), 512);
  SearchConfig config;
  config.sample_count = 512;
  const auto results = search_shape(shape, config);
  const std::string text = candidates_to_json(shape.id, "deadbeef01234567", results);
  const CandidatesFile file = parse_candidates_json(text, "mem");
  CHECK(file.shape_id == shape.id);
  CHECK(file.config_hash == "deadbeef01234567");
  REQUIRE(file.parts.size() == results.size());
  for (size_t i = 0; i < results.size(); ++i) {
    CHECK(file.parts[i].part_id == results[i].part_id);
    CHECK(file.parts[i].m_rev == results[i].m_rev);
    CHECK(file.parts[i].m_pri == results[i].m_pri);
    REQUIRE(file.parts[i].revolute.size() == results[i].revolute.size());
    for (size_t k = 0; k < results[i].revolute.size(); ++k) {
      CHECK(file.parts[i].revolute[k].pivot == results[i].revolute[k].pivot);
      CHECK(file.parts[i].revolute[k].range.pos ==
            doctest::Approx(results[i].revolute[k].range.pos).epsilon(1e-15));
    }
    CHECK(file.parts[i].pruned.size() == results[i].pruned.size());
  }
}
