// Acceptance suite: one criterion per case, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "artic/candidates_io.hpp"
#include "artic/eval.hpp"
#include "artic/motion.hpp"
#include "artic/pipeline.hpp"
#include "artic/search.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"

using namespace artic;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::ostringstream detail;
  int failures = 0;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      detail << (detail.tellp() > 0 ? "; " : "") << what;
    }
  }
};

Shape prepared_cabinet(const testing::CabinetParams& params = {}) {
  Shape shape = testing::make_cabinet(params);
  prepare_shape(shape, 4096, 0);
  normalize_shape(shape);
  return shape;
}

double axis_angle_deg(const Dir3& a, const Vec3& b) {
  const double c = std::clamp(std::abs(dot(a.vec(), b)) / norm(b), 0.0, 1.0);
  return rad_to_deg(std::acos(c));
}

Tri random_tri(SplitMix64& rng, const Vec3& center, double size) {
  auto point = [&] {
    return center + Vec3{rng.uniform(-size, size), rng.uniform(-size, size),
                         rng.uniform(-size, size)};
  };
  return {point(), point(), point()};
}

// --- Criterion 1: candidate-count contract on random synthetic parts -------

bool criterion_candidate_counts(std::string& detail) {
  Check check;
  SplitMix64 rng(101);
  int parts_checked = 0;
  int shape_index = 0;
  while (parts_checked < 50) {
    Shape shape = testing::make_random_shape(rng, "rand" + std::to_string(shape_index++));
    prepare_shape(shape, 1024, shape_index);
    normalize_shape(shape);
    SearchConfig config;
    config.sample_count = 1024;
    const auto results = search_shape(shape, config);
    for (size_t i = 0; i < results.size(); ++i) {
      const auto specs = enumerate_revolute(shape.parts[i]);
      check.expect(specs.size() == 27, "pre-pruning revolute pool != 27");
      const auto& r = results[i];
      int rev_pruned = 0, pri_pruned = 0;
      for (const auto& pruned : r.pruned) {
        (pruned.kind == MotionSpec::Kind::kRevolute ? rev_pruned : pri_pruned) += 1;
      }
      check.expect(rev_pruned + int(r.revolute.size()) == 27, "revolute accounting != 27");
      check.expect(pri_pruned + int(r.prismatic.size()) == 3, "prismatic accounting != 3");
      check.expect(r.revolute.size() <= 3, "more than 3 revolute survivors");
      check.expect(r.prismatic.size() <= 3, "more than 3 prismatic survivors");
      ++parts_checked;
    }
  }
  detail = std::to_string(parts_checked) + " parts";
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 2: synthetic-cabinet end-to-end ------------------------------

bool criterion_cabinet(std::string& detail) {
  Check check;
  const Shape shape = prepared_cabinet();
  const SearchConfig config;
  const auto results = search_shape(shape, config);

  const bool pattern = !results[0].m_rev && !results[0].m_pri &&  // body fixed
                       results[1].m_rev && !results[1].m_pri &&   // door revolute
                       !results[2].m_rev && results[2].m_pri &&   // drawer prismatic
                       !results[3].m_rev && !results[3].m_pri;    // shelf fixed
  check.expect(pattern, "part pattern is not (fixed, revolute, prismatic, fixed)");

  const testing::CabinetFacts facts = testing::cabinet_facts();
  const Vec3 hinge_point =
      facts.door_hinge_pivot * shape.normalization.scale + shape.normalization.offset;
  const Line3 hinge_line(hinge_point, Dir3::normalized(facts.door_hinge_axis));
  double best_axis_deg = 180.0;
  double best_pivot_dist = 1e9;
  for (const RevoluteCandidate& rc : results[1].revolute) {
    const double angle = axis_angle_deg(rc.axis, facts.door_hinge_axis);
    if (angle < best_axis_deg) {
      best_axis_deg = angle;
      best_pivot_dist = line_line_distance(Line3(rc.pivot, rc.axis), hinge_line);
    }
  }
  check.expect(best_axis_deg <= 2.0, "door axis deviates more than 2 deg from the hinge");
  check.expect(best_pivot_dist <= 0.05, "surviving pivot farther than 0.05 from the hinge");

  double drawer_axis_deg = 180.0;
  for (const PrismaticCandidate& pc : results[2].prismatic) {
    drawer_axis_deg = std::min(drawer_axis_deg, axis_angle_deg(pc.axis, facts.drawer_pull_axis));
  }
  check.expect(drawer_axis_deg <= 2.0, "drawer axis deviates more than 2 deg from the pull");

  std::vector<GroundTruthArticulation> gts;
  for (const Part& part : shape.parts) {
    if (part.gt) gts.push_back(*part.gt);
  }
  const RecallResult recall = candidate_recall(results, gts, {5.0, 0.1});
  check.expect(recall.movable_total == 2, "expected 2 movable ground-truth parts");
  check.expect(recall.recall == 1.0, "candidate recall below 1.0");

  std::ostringstream ss;
  ss << "door axis " << best_axis_deg << " deg, pivot " << best_pivot_dist << ", drawer axis "
     << drawer_axis_deg << " deg, recall " << recall.recall;
  detail = ss.str();
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 3: threshold behavior ----------------------------------------

bool criterion_thresholds(std::string& detail) {
  Check check;
  const SearchConfig config;

  // (a) Drawer clearance below epsilon on both sides: flips to fixed.
  testing::CabinetParams sealed;
  sealed.drawer_sealed = true;
  const Shape sealed_shape = prepared_cabinet(sealed);
  const auto sealed_results = search_shape(sealed_shape, config);
  check.expect(!sealed_results[2].m_pri && !sealed_results[2].m_rev,
               "sealed drawer is not fixed");
  check.expect(sealed_results[1].m_rev, "sealed variant lost the door candidate");

  // (b) Door clearance reduced to 80 degrees (< omega): hinge candidate pruned.
  testing::CabinetParams stopped;
  stopped.door_stop_angle_deg = 80.0;
  const Shape stopped_shape = prepared_cabinet(stopped);
  const auto stopped_results = search_shape(stopped_shape, config);
  check.expect(!stopped_results[1].m_rev, "80-degree door still has a revolute candidate");
  check.expect(stopped_results[2].m_pri, "stop-post variant lost the drawer candidate");
  bool stop_bound_seen = false;
  for (const auto& pruned : stopped_results[1].pruned) {
    if (pruned.kind != MotionSpec::Kind::kRevolute) continue;
    const double side = rad_to_deg(pruned.range.max_side());
    if (side > 60.0 && side < 90.0) stop_bound_seen = true;
  }
  check.expect(stop_bound_seen, "no pruned door candidate bounded between 60 and 90 deg");

  // (c) Rest interpenetration above eps is absorbed by the baseline rule.
  testing::CabinetParams embedded;
  embedded.shelf_embed = 0.02;
  const Shape embedded_shape = prepared_cabinet(embedded);
  const ShapeGeometry geometry = ShapeGeometry::build(embedded_shape);
  const MotionScene shelf_scene = make_motion_scene(embedded_shape, geometry, 3, 0.01);
  check.expect(shelf_scene.baseline.penetration > 0.01,
               "embedded shelf does not interpenetrate at rest");
  for (size_t i = 0; i < embedded_shape.parts.size(); ++i) {
    const MotionScene scene = make_motion_scene(embedded_shape, geometry, int(i), 0.01);
    check.expect(classify_pose(scene, RigidPose::identity(), 0.01) == PoseVerdict::kValid,
                 "rest pose not valid under baseline rule");
  }
  const auto embedded_results = search_shape(embedded_shape, config);
  check.expect(embedded_results[1].m_rev, "embedded variant lost the door candidate");
  check.expect(embedded_results[2].m_pri, "embedded variant lost the drawer candidate");

  detail = check.failures == 0 ? "sealed, stopped, embedded variants behave"
                               : check.detail.str();
  return check.failures == 0;
}

// --- Criterion 4: collision oracle equivalence ------------------------------

bool criterion_oracle_equivalence(std::string& detail) {
  Check check;
  SplitMix64 rng(404);
  const double eps = 0.01;
  const double cutoff = 4 * eps;
  int classifications[3] = {0, 0, 0};
  double max_diff = 0.0;
  for (int scene = 0; scene < 1000; ++scene) {
    const int n = 50 + static_cast<int>(rng.next() % 451);
    const int m = 50 + static_cast<int>(rng.next() % 451);
    const TriMesh mesh_a = testing::make_soup(n, 0.5, 0.15, rng);
    const TriMesh mesh_b = testing::make_soup(m, 0.5, 0.15, rng);
    const Bvh bvh_a = Bvh::build(mesh_a);
    const Bvh bvh_b = Bvh::build(mesh_b);

    RigidPose pose;
    pose.rotation = testing::random_rotation(rng);
    pose.translation = testing::random_unit(rng) * rng.uniform(0.0, 2.0);

    const std::vector<PartGeom> others{{&mesh_b, &bvh_b}};
    const ContactReport fast = part_contact({&mesh_a, &bvh_a}, pose, others, cutoff);
    const ContactReport slow = brute_force_contact(mesh_a, pose, others, cutoff);

    const double diff = std::abs(fast.min_distance - slow.min_distance);
    max_diff = std::max(max_diff, diff);
    check.expect(diff < 1e-7, "distance disagreement at scene " + std::to_string(scene));
    const ContactClass fc = classify_contact(fast, eps);
    check.expect(fc == classify_contact(slow, eps),
                 "classification disagreement at scene " + std::to_string(scene));
    ++classifications[static_cast<int>(fc)];
    if (check.failures > 8) break;
  }
  std::ostringstream ss;
  ss << "1000 scenes (free/contact/collision " << classifications[0] << "/"
     << classifications[1] << "/" << classifications[2] << "), max distance diff "
     << max_diff;
  detail = ss.str();
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 5: EPA separation property and GJK vs feature oracle ---------

bool criterion_epa_separation(std::string& detail) {
  Check check;
  SplitMix64 rng(505);
  int intersecting = 0;
  while (intersecting < 500) {
    const Tri a = random_tri(rng, {0, 0, 0}, 1.0);
    const Tri b = random_tri(
        rng, {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}, 1.0);
    if (gjk_distance(a, b) > 0.0) continue;
    ++intersecting;
    const EpaResult epa = epa_penetration(a, b);
    const Vec3 shift = epa.normal * (epa.depth + 1e-6);
    const Tri moved{b[0] + shift, b[1] + shift, b[2] + shift};
    check.expect(gjk_distance(a, moved) > 0.0,
                 "translation along the EPA normal failed to separate");
    if (check.failures > 8) break;
  }

  int separated = 0;
  double max_diff = 0.0;
  while (separated < 500) {
    const Tri a = random_tri(rng, {0, 0, 0}, 1.0);
    const Tri b = random_tri(
        rng, {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}, 1.0);
    const double oracle = testing::oracle_triangle_distance(a, b);
    if (oracle == 0.0) continue;
    ++separated;
    const double diff = std::abs(gjk_distance(a, b) - oracle);
    max_diff = std::max(max_diff, diff);
    check.expect(diff < 1e-7, "distance oracle disagreement");
    if (check.failures > 8) break;
  }
  std::ostringstream ss;
  ss << "500 intersecting + 500 separated pairs, max distance diff " << max_diff;
  detail = ss.str();
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 6: metric exactness and invariances ---------------------------

bool criterion_metrics(std::string& detail) {
  Check check;

  // Fixture: axis off by exactly 30 degrees, pivot off by exactly 0.2.
  Shape fixture;
  fixture.id = "fixture";
  for (int i = 0; i < 2; ++i) {
    Part part;
    part.id = i;
    part.mesh = testing::make_box({-0.1, -0.1, -0.1}, {0.1, 0.1, 0.1});
    fixture.parts.push_back(part);
  }
  prepare_shape(fixture, 64, 0);
  GroundTruthArticulation gt0;
  gt0.part_id = 0;
  gt0.m_rev = true;
  gt0.axis = Dir3(Vec3{0, 0, 1});
  gt0.pivot = Vec3{0, 0, 0};
  fixture.parts[0].gt = gt0;
  GroundTruthArticulation gt1 = gt0;
  gt1.part_id = 1;
  fixture.parts[1].gt = gt1;

  ShapeEvalInput input;
  input.shape = &fixture;
  PredictionRecord p0;
  p0.part_id = 0;
  p0.m_rev = true;
  p0.axis = Dir3::normalized({0, std::sin(deg_to_rad(30.0)), std::cos(deg_to_rad(30.0))});
  p0.pivot = Vec3{0, 0, 0};
  PredictionRecord p1;
  p1.part_id = 1;
  p1.m_rev = true;
  p1.axis = Dir3(Vec3{0, 0, 1});
  p1.pivot = Vec3{0.2, 0, 0};
  input.predictions = {p0, p1};
  const std::vector<ShapeEvalInput> inputs{input};
  const MetricsReport report = evaluate(inputs, EvalOptions{});
  check.expect(std::abs(*report.per_part[0].ae_deg - 30.0) <= 1e-9, "AE fixture not 30.0");
  check.expect(std::abs(*report.per_part[1].pe - 0.2) <= 1e-9, "PE fixture not 0.2");

  // Property sweeps: flip invariance of AE, slide invariance of PE.
  SplitMix64 rng(606);
  double worst_flip = 0.0, worst_slide = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Dir3 a = Dir3::normalized(testing::random_unit(rng));
    const Dir3 b = Dir3::normalized(testing::random_unit(rng));
    const double e = axis_error(a, b, true);
    worst_flip = std::max({worst_flip, std::abs(e - axis_error(a.flipped(), b, true)),
                           std::abs(e - axis_error(a, b.flipped(), true))});

    const Vec3 o1{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Vec3 o2{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double pe = point_error(Line3(o1, a), Line3(o2, b));
    const double slid =
        point_error(Line3(o1 + a.vec() * rng.uniform(-10, 10), a), Line3(o2, b));
    worst_slide = std::max(worst_slide, std::abs(pe - slid));
  }
  check.expect(worst_flip <= 1e-9, "axis_error flip invariance violated");
  check.expect(worst_slide <= 1e-9, "point_error slide invariance violated");

  std::ostringstream ss;
  ss << "fixture exact, worst flip dev " << worst_flip << ", worst slide dev " << worst_slide;
  detail = ss.str();
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 7: PCA vs independent Jacobi oracle ---------------------------

bool criterion_pca_oracle(std::string& detail) {
  Check check;
  SplitMix64 rng(707);
  double worst_sin = 0.0;
  double worst_equivariance = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Anisotropic box-ish cloud with separated eigenvalues.
    Vec3 half{rng.uniform(0.8, 1.0), rng.uniform(0.35, 0.55), rng.uniform(0.05, 0.2)};
    std::vector<Vec3> points;
    for (int i = 0; i < 300; ++i) {
      points.push_back({half.x * rng.uniform(-1, 1), half.y * rng.uniform(-1, 1),
                        half.z * rng.uniform(-1, 1)});
    }
    const Mat3 rot = testing::random_rotation(rng);
    const Vec3 shift{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    std::vector<Vec3> moved;
    moved.reserve(points.size());
    for (const Vec3& p : points) moved.push_back(rot * p + shift);

    const PcaResult ours = pca_axes(moved);
    const testing::EigenOracle oracle = testing::eigen_oracle_of_points(moved);
    for (int k = 0; k < 3; ++k) {
      const double s = norm(cross(ours.axes[k], oracle.vectors[k]));
      worst_sin = std::max(worst_sin, s);
    }

    const PcaResult base = pca_axes(points);
    for (int k = 0; k < 3; ++k) {
      const Vec3 expected = rot * base.axes[k];
      const double angle =
          std::asin(std::clamp(norm(cross(ours.axes[k], expected)), 0.0, 1.0));
      worst_equivariance = std::max(worst_equivariance, angle);
    }
  }
  check.expect(worst_sin <= 1e-6, "axis deviates from the Jacobi oracle by > 1e-6");
  check.expect(worst_equivariance <= 1e-3, "rotation equivariance above 1e-3 rad");

  std::ostringstream ss;
  ss << "1000 point sets, worst axis sin " << worst_sin << ", worst equivariance "
     << worst_equivariance << " rad";
  detail = ss.str();
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 8: pipeline determinism ---------------------------------------

bool criterion_determinism(std::string& detail) {
  Check check;
  const fs::path root = fs::temp_directory_path() / "artic_acceptance";
  fs::remove_all(root);
  const fs::path dataset = root / "dataset";
  testing::write_synthetic_dataset(dataset.string(), 10, 77);

  RunConfig config;
  config.search.sample_count = 1024;
  config.search.seed = 3;

  auto run = [&](const fs::path& out, int workers) {
    RunConfig c = config;
    c.workers = workers;
    return run_search(dataset.string(), out.string(), c);
  };
  check.expect(run(root / "w1", 1) == 0, "workers=1 run failed");
  check.expect(run(root / "w8", 8) == 0, "workers=8 run failed");
  check.expect(run(root / "w1b", 1) == 0, "repeat run failed");

  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  };
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "w1")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "w1");
    if (rel.filename() != "candidates.json") continue;
    ++files;
    const std::string base = slurp(entry.path());
    check.expect(slurp(root / "w8" / rel) == base,
                 "workers=8 differs for " + rel.string());
    check.expect(slurp(root / "w1b" / rel) == base, "rerun differs for " + rel.string());
  }
  check.expect(files == 10, "expected 10 candidate files, saw " + std::to_string(files));

  detail = std::to_string(files) + " candidate files byte-identical across runs";
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

// --- Criterion 9: BVH performance sanity -------------------------------------

bool criterion_performance(std::string& detail) {
  Check check;
  // Gap 0.02 below the 0.04 cutoff: the query has to resolve the true
  // distance rather than pruning at the root.
  const TriMesh sphere_a = testing::make_uv_sphere({0, 0, 0}, 0.5, 72, 72);
  const TriMesh sphere_b = testing::make_uv_sphere({1.02, 0, 0}, 0.5, 72, 72);
  const Bvh bvh_a = Bvh::build(sphere_a);
  const Bvh bvh_b = Bvh::build(sphere_b);
  const std::vector<PartGeom> others{{&sphere_b, &bvh_b}};

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const ContactReport fast =
      part_contact({&sphere_a, &bvh_a}, RigidPose::identity(), others, 0.04);
  const auto t1 = clock::now();
  const ContactReport slow =
      brute_force_contact(sphere_a, RigidPose::identity(), others, 0.04);
  const auto t2 = clock::now();

  const double fast_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  const double slow_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  const long long total_pairs = slow.pairs_visited;

  check.expect(sphere_a.triangles.size() >= 10000, "test mesh below 10k triangles");
  check.expect(fast.min_distance == slow.min_distance, "distance mismatch");
  check.expect(fast.min_distance < 0.04, "scene unexpectedly beyond the cutoff");
  check.expect(fast.pairs_visited * 20 < total_pairs,
               "BVH visited 5% or more of the brute-force pairs");
  check.expect(slow_ms >= 10.0 * fast_ms, "speedup below 10x");

  std::ostringstream ss;
  ss << sphere_a.triangles.size() << " tris/mesh, pairs " << fast.pairs_visited << " vs "
     << total_pairs << " (" << (100.0 * fast.pairs_visited / total_pairs) << "%), time "
     << fast_ms << " ms vs " << slow_ms << " ms (" << (slow_ms / fast_ms) << "x)";
  detail = ss.str();
  if (check.failures > 0) detail += "; " + check.detail.str();
  return check.failures == 0;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "candidate-count contract on random parts", 60, criterion_candidate_counts},
      {2, "synthetic-cabinet end-to-end pattern", 120, criterion_cabinet},
      {3, "threshold behavior (epsilon, omega, baseline)", 120, criterion_thresholds},
      {4, "collision oracle equivalence on 1000 scenes", 300, criterion_oracle_equivalence},
      {5, "EPA separation property and GJK feature oracle", 120, criterion_epa_separation},
      {6, "metric exactness and invariances", 60, criterion_metrics},
      {7, "PCA vs independent Jacobi oracle", 60, criterion_pca_oracle},
      {8, "search determinism across workers and reruns", 300, criterion_determinism},
      {9, "BVH performance sanity at 10k triangles", 300, criterion_performance},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > criterion.budget_seconds) {
      ok = false;
      detail += "; over time budget";
    }
    std::printf("%s  %d. %s (%.1fs) %s\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.title, seconds, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  if (failed == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failed);
  }
  return failed;
}
