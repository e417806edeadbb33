#pragma once

#include <optional>
#include <string>
#include <vector>

#include "artic/search.hpp"
#include "artic/shape.hpp"

namespace artic {

struct PredictionRecord {
  int part_id = -1;
  bool m_rev = false;
  bool m_pri = false;
  std::optional<Dir3> axis;
  std::optional<Vec3> pivot;
};

// Angular deviation in degrees. Flip-invariant mode (the default elsewhere)
// folds antipodal axes together, giving [0, 90].
double axis_error(const Dir3& pred, const Dir3& gt, bool flip_invariant);

// Minimum distance between the two infinite rotation-axis lines; invariant to
// where each pivot sits on its own axis.
double point_error(const Line3& pred, const Line3& gt);

double axis_cosine(const Dir3& a, const Dir3& b);

double pivot_l1(const Vec3& pred, const Vec3& gt);

// Exact-match fraction per motion bit over all parts. Part ids must align.
std::pair<double, double> motion_type_accuracy(std::span<const PredictionRecord> preds,
                                               std::span<const GroundTruthArticulation> gts);

struct PerPartRow {
  std::string shape_id;
  int part_id = -1;
  bool pred_rev = false, pred_pri = false;
  bool gt_rev = false, gt_pri = false;
  std::optional<double> ae_deg;
  std::optional<double> pe;                // line-to-line
  std::optional<double> pe_pivot_to_line;  // diagnostic variant
  std::optional<bool> recovered;           // candidate-recall verdict
  std::string note;
};

struct MetricsReport {
  double ae_deg = 0.0;  // mean over parts where both sides are movable with axes
  double pe = 0.0;      // mean over parts where both sides are revolute
  double r_acc = 0.0;
  double p_acc = 0.0;
  std::optional<double> recall;
  int shapes_evaluated = 0;
  int shapes_skipped = 0;  // no ground truth available
  int parts_total = 0;
  int parts_with_ae = 0;
  int parts_skipped_ae = 0;
  int parts_with_pe = 0;
  int parts_skipped_pe = 0;
  int gt_movable_total = 0;
  int gt_recovered = 0;
  // Dataset statistic: deviation of ground-truth axes from the nearest part
  // PCA axis.
  std::optional<double> gt_axis_vs_pca_mean_deg;
  std::optional<double> gt_axis_vs_pca_frac_within_5deg;
  std::vector<PerPartRow> per_part;
};

struct RecallThresholds {
  double ae_deg = 5.0;
  double pe = 0.1;
};

struct RecallResult {
  double recall = 0.0;
  int movable_total = 0;
  int recovered = 0;
  std::vector<PerPartRow> rows;
};

// A ground-truth articulation counts as recovered when, for each of its set
// motion bits, some candidate of the same part matches: axis within ae_deg
// and, for revolute, axis line within pe of the ground-truth line.
RecallResult candidate_recall(std::span<const CandidateArticulation> candidates,
                              std::span<const GroundTruthArticulation> gts,
                              const RecallThresholds& thresholds);

struct EvalOptions {
  bool flip_invariant = true;
  RecallThresholds recall_thresholds;
};

struct ShapeEvalInput {
  const Shape* shape = nullptr;
  // Exactly one of the two is used per input.
  std::vector<PredictionRecord> predictions;
  std::vector<CandidateArticulation> candidates;
  bool has_candidates = false;
};

// Aggregates the metrics over a dataset. For candidate inputs, AE/PE are
// computed against the best-matching candidate of each part (the same
// matching recall uses) and the recall field is populated.
MetricsReport evaluate(std::span<const ShapeEvalInput> inputs, const EvalOptions& options);

std::string report_to_json(const MetricsReport& report, const std::string& config_hash,
                           const EvalOptions& options);
std::string report_to_csv(const MetricsReport& report);

}  // namespace artic
