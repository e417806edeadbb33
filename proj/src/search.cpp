#include "artic/search.hpp"

#include <algorithm>
#include <cmath>

#include "artic/error.hpp"

namespace artic {

void SearchConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::kInvalidInput, std::string("SearchConfig: ") + what);
  };
  require(epsilon_frac > 0.0 && epsilon_frac < 1.0, "epsilon_frac must be in (0, 1)");
  require(omega_deg > 0.0 && omega_deg <= 180.0, "omega_deg must be in (0, 180]");
  require(eps_contact > 0.0, "eps_contact must be positive");
  require(prismatic_step_div >= 2.0, "prismatic_step_div must be >= 2");
  require(revolute_step_deg > 0.0 && revolute_step_deg <= 45.0,
          "revolute_step_deg must be in (0, 45]");
  require(bisect_div >= 2.0, "bisect_div must be >= 2");
  require(distance_cutoff_factor >= 2.0, "distance_cutoff_factor must be >= 2");
  require(sample_count >= 16, "sample_count must be >= 16");
}

const char* to_string(PruneReason reason) {
  switch (reason) {
    case PruneReason::kShortRange: return "short-range";
    case PruneReason::kCollision: return "collision";
    case PruneReason::kDetachment: return "detachment";
    case PruneReason::kPivotSuperseded: return "pivot-superseded";
  }
  return "unknown";
}

namespace {

// Attributes a below-threshold range to what bounded it: both sides stopped
// by collisions, both by detachments, or a mix (plain short-range).
PruneReason range_prune_reason(const RangeDetail& detail) {
  const bool neg_col = !detail.neg_capped && detail.neg_verdict == PoseVerdict::kCollision;
  const bool pos_col = !detail.pos_capped && detail.pos_verdict == PoseVerdict::kCollision;
  const bool neg_det = !detail.neg_capped && detail.neg_verdict == PoseVerdict::kDetached;
  const bool pos_det = !detail.pos_capped && detail.pos_verdict == PoseVerdict::kDetached;
  if (neg_col && pos_col) return PruneReason::kCollision;
  if (neg_det && pos_det) return PruneReason::kDetachment;
  return PruneReason::kShortRange;
}

}  // namespace

std::array<std::pair<Dir3, double>, 3> candidate_axes(const Part& part) {
  if (part.samples.size() < 3) {
    throw Error(ErrorKind::kDegenerateInput,
                "candidate_axes: part " + std::to_string(part.id) + " has too few samples");
  }
  const Obb& obb = part.obb;
  if (!(obb.eigenvalues[0] > 1e-18) || !(obb.max_extent() > 0.0)) {
    throw Error(ErrorKind::kDegenerateInput,
                "candidate_axes: part " + std::to_string(part.id) + " has no spatial extent");
  }
  return {std::make_pair(Dir3::normalized(obb.axes[0]), obb.eigenvalues[0]),
          std::make_pair(Dir3::normalized(obb.axes[1]), obb.eigenvalues[1]),
          std::make_pair(Dir3::normalized(obb.axes[2]), obb.eigenvalues[2])};
}

std::vector<MotionSpec> enumerate_revolute(const Part& part) {
  const auto axes = candidate_axes(part);
  const auto pivots = aabb_pivots(part.samples);
  std::vector<MotionSpec> specs;
  specs.reserve(axes.size() * pivots.size());
  for (const auto& [axis, eigenvalue] : axes) {
    for (const Vec3& pivot : pivots) {
      specs.push_back(MotionSpec::revolute(axis, pivot));
    }
  }
  return specs;
}

CandidateArticulation search_part(const Shape& shape, const ShapeGeometry& geometry,
                                  int part_index, const SearchConfig& config) {
  const Part& part = shape.parts[part_index];
  CandidateArticulation out;
  out.part_id = part.id;

  std::optional<std::array<std::pair<Dir3, double>, 3>> axes_opt;
  try {
    axes_opt = candidate_axes(part);
  } catch (const Error& e) {
    out.diagnostic = std::string("fixed by ") + to_string(e.kind()) + ": " + e.what();
    return out;
  }
  const auto& axes = *axes_opt;

  const double extent = part.obb.max_extent();
  const MotionScene scene = make_motion_scene(shape, geometry, part_index, config.eps_contact,
                                              config.distance_cutoff_factor);

  // Prismatic: one candidate per PCA axis, translations capped at the part's
  // largest oriented-box extent; keep ranges of at least epsilon_frac * L.
  const double epsilon = config.epsilon_frac * extent;
  const double pri_step = extent / config.prismatic_step_div;
  const SweepParams pri_params{pri_step, extent, pri_step / config.bisect_div};
  for (int rank = 0; rank < 3; ++rank) {
    const MotionSpec spec = MotionSpec::prismatic(axes[rank].first);
    const RangeDetail detail = free_range(scene, spec, pri_params, config.eps_contact,
                                          config.distance_cutoff_factor);
    if (detail.range.max_side() >= epsilon) {
      out.prismatic.push_back({spec.axis, rank, detail.range});
    } else {
      out.pruned.push_back({MotionSpec::Kind::kPrismatic, rank, -1, spec.axis, {},
                            detail.range, range_prune_reason(detail)});
    }
  }

  // Revolute: 3 axes x 9 pivots, rotations capped at a half turn per side;
  // keep ranges of at least omega, then keep only the best pivot per axis.
  const double omega = deg_to_rad(config.omega_deg);
  const double rev_step = deg_to_rad(config.revolute_step_deg);
  const SweepParams rev_params{rev_step, kPi, rev_step / config.bisect_div};
  const auto pivots = aabb_pivots(part.samples);
  for (int rank = 0; rank < 3; ++rank) {
    std::optional<RevoluteCandidate> best;
    int best_pivot_index = -1;
    for (int pivot_index = 0; pivot_index < static_cast<int>(pivots.size()); ++pivot_index) {
      const MotionSpec spec = MotionSpec::revolute(axes[rank].first, pivots[pivot_index]);
      const RangeDetail detail = free_range(scene, spec, rev_params, config.eps_contact,
                                            config.distance_cutoff_factor);
      if (detail.range.max_side() < omega) {
        out.pruned.push_back({MotionSpec::Kind::kRevolute, rank, pivot_index, spec.axis,
                              *spec.pivot, detail.range, range_prune_reason(detail)});
        continue;
      }
      if (!best || detail.range.max_side() > best->range.max_side()) {
        if (best) {
          out.pruned.push_back({MotionSpec::Kind::kRevolute, rank, best_pivot_index,
                                best->axis, best->pivot, best->range,
                                PruneReason::kPivotSuperseded});
        }
        best = RevoluteCandidate{spec.axis, rank, *spec.pivot, detail.range};
        best_pivot_index = pivot_index;
      } else {
        out.pruned.push_back({MotionSpec::Kind::kRevolute, rank, pivot_index, spec.axis,
                              *spec.pivot, detail.range, PruneReason::kPivotSuperseded});
      }
    }
    if (best) out.revolute.push_back(*best);
  }

  out.m_pri = !out.prismatic.empty();
  out.m_rev = !out.revolute.empty();
  return out;
}

std::vector<CandidateArticulation> search_shape(const Shape& shape,
                                                const SearchConfig& config) {
  config.validate();
  for (const Part& part : shape.parts) {
    if (!part.prepared()) {
      throw Error(ErrorKind::kInvalidInput, "search_shape: shape is not prepared");
    }
  }
  const ShapeGeometry geometry = ShapeGeometry::build(shape);
  std::vector<CandidateArticulation> results;
  results.reserve(shape.parts.size());
  for (size_t i = 0; i < shape.parts.size(); ++i) {
    try {
      results.push_back(search_part(shape, geometry, static_cast<int>(i), config));
    } catch (const Error& e) {
      CandidateArticulation failed;
      failed.part_id = shape.parts[i].id;
      failed.diagnostic = std::string("fixed by ") + to_string(e.kind()) + ": " + e.what();
      results.push_back(std::move(failed));
    }
  }
  return results;
}

}  // namespace artic
