#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "artic/motion.hpp"
#include "artic/shape.hpp"

namespace artic {

// All search thresholds and resolutions. Defaults: prismatic ranges below
// L/10 are discarded, revolute ranges below 90 degrees are discarded, and
// contacts within 0.01 model units are tolerated.
struct SearchConfig {
  double epsilon_frac = 0.1;          // prismatic range threshold as a fraction of L
  double omega_deg = 90.0;            // revolute range threshold
  double eps_contact = 0.01;          // contact / detachment tolerance
  double prismatic_step_div = 64.0;   // coarse step = L / prismatic_step_div
  double revolute_step_deg = 2.0;     // coarse step for rotations
  double bisect_div = 64.0;           // bisection tolerance = step / bisect_div
  double distance_cutoff_factor = 4.0;
  int sample_count = 4096;
  uint64_t seed = 0;

  void validate() const;
};

struct PrismaticCandidate {
  Dir3 axis;
  int eigenvalue_rank = 0;  // 0 = largest PCA eigenvalue
  FreeRange range;          // model units
};

struct RevoluteCandidate {
  Dir3 axis;
  int eigenvalue_rank = 0;
  Vec3 pivot;
  FreeRange range;  // radians
};

enum class PruneReason { kShortRange, kCollision, kDetachment, kPivotSuperseded };

const char* to_string(PruneReason reason);

struct PrunedCandidate {
  MotionSpec::Kind kind = MotionSpec::Kind::kPrismatic;
  int axis_rank = 0;
  int pivot_index = -1;  // 0..7 box corners, 8 centroid; -1 for prismatic
  Dir3 axis;
  std::optional<Vec3> pivot;
  FreeRange range;
  PruneReason reason = PruneReason::kShortRange;
};

// Surviving candidate articulations for one part, axes ordered by descending
// PCA eigenvalue. Both lists empty means the part is fixed; both non-empty
// means cylindrical capability.
struct CandidateArticulation {
  int part_id = -1;
  bool m_rev = false;
  bool m_pri = false;
  std::vector<PrismaticCandidate> prismatic;  // <= 3, eigenvalue_rank ascending
  std::vector<RevoluteCandidate> revolute;    // <= 3, one pivot per surviving axis
  std::vector<PrunedCandidate> pruned;
  std::optional<std::string> diagnostic;
};

// The part's 3 PCA axes with their eigenvalues, descending. Degenerate
// sample sets (no spatial extent) raise a degenerate-input error.
std::array<std::pair<Dir3, double>, 3> candidate_axes(const Part& part);

// The full revolute candidate pool: 3 axes x 9 pivots in axis-major order,
// pivots ordered box corners first, centroid last. Always 27 specs.
std::vector<MotionSpec> enumerate_revolute(const Part& part);

CandidateArticulation search_part(const Shape& shape, const ShapeGeometry& geometry,
                                  int part_index, const SearchConfig& config);

// search_part over every part, in part order. Per-part failures become fixed
// verdicts with a diagnostic; they never abort the remaining parts.
std::vector<CandidateArticulation> search_shape(const Shape& shape,
                                                const SearchConfig& config);

}  // namespace artic
