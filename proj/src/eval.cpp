#include "artic/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "artic/error.hpp"
#include "artic/jsonw.hpp"

namespace artic {

double axis_error(const Dir3& pred, const Dir3& gt, bool flip_invariant) {
  double c = dot(pred.vec(), gt.vec());
  if (flip_invariant) c = std::abs(c);
  c = std::clamp(c, -1.0, 1.0);
  return rad_to_deg(std::acos(c));
}

double point_error(const Line3& pred, const Line3& gt) {
  return line_line_distance(pred, gt);
}

double axis_cosine(const Dir3& a, const Dir3& b) { return dot(a.vec(), b.vec()); }

double pivot_l1(const Vec3& pred, const Vec3& gt) {
  return std::abs(pred.x - gt.x) + std::abs(pred.y - gt.y) + std::abs(pred.z - gt.z);
}

std::pair<double, double> motion_type_accuracy(
    std::span<const PredictionRecord> preds, std::span<const GroundTruthArticulation> gts) {
  if (preds.empty() || gts.empty()) {
    throw Error(ErrorKind::kInvalidInput, "motion_type_accuracy: empty part set");
  }
  if (preds.size() != gts.size()) {
    throw Error(ErrorKind::kValidation, "motion_type_accuracy: part count mismatch");
  }
  std::map<int, const GroundTruthArticulation*> by_id;
  for (const auto& gt : gts) by_id[gt.part_id] = &gt;
  int rev_correct = 0, pri_correct = 0;
  for (const auto& pred : preds) {
    const auto it = by_id.find(pred.part_id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::kValidation,
                  "motion_type_accuracy: no ground truth for part " +
                      std::to_string(pred.part_id));
    }
    if (pred.m_rev == it->second->m_rev) ++rev_correct;
    if (pred.m_pri == it->second->m_pri) ++pri_correct;
  }
  const double n = static_cast<double>(preds.size());
  return {rev_correct / n, pri_correct / n};
}

namespace {

struct CandidateMatch {
  bool recovered = false;
  std::optional<double> best_ae;
  std::optional<double> best_pe;
};

CandidateMatch match_candidates(const CandidateArticulation& cand,
                                const GroundTruthArticulation& gt,
                                const RecallThresholds& thresholds) {
  CandidateMatch match;
  bool rev_ok = !gt.m_rev;
  bool pri_ok = !gt.m_pri;
  if (!gt.axis) return match;

  if (gt.m_rev && gt.pivot) {
    const Line3 gt_line(*gt.pivot, *gt.axis);
    for (const RevoluteCandidate& rc : cand.revolute) {
      const double ae = axis_error(rc.axis, *gt.axis, true);
      const double pe = point_error(Line3(rc.pivot, rc.axis), gt_line);
      if (!match.best_ae || ae < *match.best_ae) match.best_ae = ae;
      if (!match.best_pe || pe < *match.best_pe) match.best_pe = pe;
      if (ae <= thresholds.ae_deg && pe <= thresholds.pe) rev_ok = true;
    }
  }
  if (gt.m_pri) {
    for (const PrismaticCandidate& pc : cand.prismatic) {
      const double ae = axis_error(pc.axis, *gt.axis, true);
      if (!match.best_ae || ae < *match.best_ae) match.best_ae = ae;
      if (ae <= thresholds.ae_deg) pri_ok = true;
    }
  }
  match.recovered = rev_ok && pri_ok;
  return match;
}

}  // namespace

RecallResult candidate_recall(std::span<const CandidateArticulation> candidates,
                              std::span<const GroundTruthArticulation> gts,
                              const RecallThresholds& thresholds) {
  RecallResult result;
  std::map<int, const CandidateArticulation*> by_id;
  for (const auto& cand : candidates) by_id[cand.part_id] = &cand;

  for (const auto& gt : gts) {
    if (!(gt.m_rev || gt.m_pri) || !gt.axis) continue;
    ++result.movable_total;
    PerPartRow row;
    row.part_id = gt.part_id;
    row.gt_rev = gt.m_rev;
    row.gt_pri = gt.m_pri;
    const auto it = by_id.find(gt.part_id);
    if (it != by_id.end()) {
      const CandidateMatch match = match_candidates(*it->second, gt, thresholds);
      row.recovered = match.recovered;
      row.ae_deg = match.best_ae;
      row.pe = match.best_pe;
      row.pred_rev = it->second->m_rev;
      row.pred_pri = it->second->m_pri;
      if (match.recovered) ++result.recovered;
    } else {
      row.recovered = false;
      row.note = "no candidate record";
    }
    result.rows.push_back(std::move(row));
  }
  result.recall = result.movable_total == 0
                      ? 0.0
                      : static_cast<double>(result.recovered) / result.movable_total;
  return result;
}

namespace {

// Derives a single per-part prediction from a candidate record; when ground
// truth is available the best-matching axis is chosen (an oracle-best upper
// bound for candidate quality), otherwise the first by eigenvalue rank.
PredictionRecord candidate_to_prediction(const CandidateArticulation& cand,
                                         const GroundTruthArticulation* gt) {
  PredictionRecord pred;
  pred.part_id = cand.part_id;
  pred.m_rev = cand.m_rev;
  pred.m_pri = cand.m_pri;

  const Dir3* gt_axis = (gt && gt->axis) ? &*gt->axis : nullptr;
  const bool want_pivot = gt && gt->m_rev;

  double best_ae = std::numeric_limits<double>::infinity();
  if (want_pivot || cand.prismatic.empty()) {
    for (const RevoluteCandidate& rc : cand.revolute) {
      const double ae = gt_axis ? axis_error(rc.axis, *gt_axis, true) : 0.0;
      if (!pred.axis || ae < best_ae) {
        pred.axis = rc.axis;
        pred.pivot = rc.pivot;
        best_ae = ae;
      }
      if (!gt_axis) break;
    }
  }
  if (!pred.axis) {
    for (const PrismaticCandidate& pc : cand.prismatic) {
      const double ae = gt_axis ? axis_error(pc.axis, *gt_axis, true) : 0.0;
      if (!pred.axis || ae < best_ae) {
        pred.axis = pc.axis;
        best_ae = ae;
      }
      if (!gt_axis) break;
    }
  }
  return pred;
}

}  // namespace

MetricsReport evaluate(std::span<const ShapeEvalInput> inputs, const EvalOptions& options) {
  MetricsReport report;
  double ae_sum = 0.0, pe_sum = 0.0;
  int rev_correct = 0, pri_correct = 0;
  double pca_dev_sum = 0.0;
  int pca_dev_count = 0, pca_dev_within5 = 0;

  for (const ShapeEvalInput& input : inputs) {
    if (input.shape == nullptr) {
      throw Error(ErrorKind::kInvalidInput, "evaluate: null shape");
    }
    const Shape& shape = *input.shape;
    std::map<int, const Part*> parts_by_id;
    for (const Part& part : shape.parts) parts_by_id[part.id] = &part;

    const bool has_gt =
        std::any_of(shape.parts.begin(), shape.parts.end(),
                    [](const Part& p) { return p.gt.has_value(); });
    if (!has_gt) {
      ++report.shapes_skipped;
      continue;
    }
    ++report.shapes_evaluated;

    std::map<int, const CandidateArticulation*> cands_by_id;
    std::vector<PredictionRecord> preds;
    if (input.has_candidates) {
      for (const auto& cand : input.candidates) {
        if (!parts_by_id.count(cand.part_id)) {
          throw Error(ErrorKind::kValidation,
                      "evaluate: shape " + shape.id + " has no part " +
                          std::to_string(cand.part_id));
        }
        cands_by_id[cand.part_id] = &cand;
        const Part& part = *parts_by_id[cand.part_id];
        preds.push_back(
            candidate_to_prediction(cand, part.gt ? &*part.gt : nullptr));
      }
    } else {
      for (const auto& pred : input.predictions) {
        if (!parts_by_id.count(pred.part_id)) {
          throw Error(ErrorKind::kValidation,
                      "evaluate: shape " + shape.id + " has no part " +
                          std::to_string(pred.part_id));
        }
      }
      preds = input.predictions;
    }

    for (const PredictionRecord& pred : preds) {
      const Part& part = *parts_by_id[pred.part_id];
      if (!part.gt) continue;  // unannotated part, nothing to score
      const GroundTruthArticulation& gt = *part.gt;

      PerPartRow row;
      row.shape_id = shape.id;
      row.part_id = pred.part_id;
      row.pred_rev = pred.m_rev;
      row.pred_pri = pred.m_pri;
      row.gt_rev = gt.m_rev;
      row.gt_pri = gt.m_pri;

      ++report.parts_total;
      if (pred.m_rev == gt.m_rev) ++rev_correct;
      if (pred.m_pri == gt.m_pri) ++pri_correct;

      const bool gt_movable = (gt.m_rev || gt.m_pri) && gt.axis.has_value();
      const bool pred_movable = (pred.m_rev || pred.m_pri) && pred.axis.has_value();
      if (gt_movable && pred_movable) {
        row.ae_deg = axis_error(*pred.axis, *gt.axis, options.flip_invariant);
        ae_sum += *row.ae_deg;
        ++report.parts_with_ae;
      } else if (gt_movable) {
        ++report.parts_skipped_ae;
        row.note = "no predicted axis";
      }

      const bool gt_revolute = gt.m_rev && gt.axis && gt.pivot;
      const bool pred_revolute = pred.m_rev && pred.axis && pred.pivot;
      if (gt_revolute && pred_revolute) {
        const Line3 gt_line(*gt.pivot, *gt.axis);
        row.pe = point_error(Line3(*pred.pivot, *pred.axis), gt_line);
        row.pe_pivot_to_line = point_line_distance(*pred.pivot, gt_line);
        pe_sum += *row.pe;
        ++report.parts_with_pe;
      } else if (gt_revolute) {
        ++report.parts_skipped_pe;
      }

      if (gt_movable) {
        double best = 180.0;
        for (const Vec3& axis : part.obb.axes) {
          best = std::min(best, axis_error(Dir3::normalized(axis), *gt.axis, true));
        }
        pca_dev_sum += best;
        ++pca_dev_count;
        if (best <= 5.0) ++pca_dev_within5;
      }

      if (input.has_candidates && gt_movable) {
        const auto it = cands_by_id.find(pred.part_id);
        if (it != cands_by_id.end()) {
          const CandidateMatch match =
              match_candidates(*it->second, gt, options.recall_thresholds);
          row.recovered = match.recovered;
          ++report.gt_movable_total;
          if (match.recovered) ++report.gt_recovered;
        }
      }
      if (input.has_candidates && row.note.empty()) {
        const auto it = cands_by_id.find(pred.part_id);
        if (it != cands_by_id.end()) {
          int counts[4] = {0, 0, 0, 0};
          for (const PrunedCandidate& pruned : it->second->pruned) {
            ++counts[static_cast<int>(pruned.reason)];
          }
          std::ostringstream note;
          note << "pruned short-range=" << counts[0] << " collision=" << counts[1]
               << " detachment=" << counts[2] << " pivot-superseded=" << counts[3];
          if (it->second->diagnostic) note << "; " << *it->second->diagnostic;
          row.note = note.str();
        }
      }
      report.per_part.push_back(std::move(row));
    }
  }

  if (report.parts_total == 0) {
    throw Error(ErrorKind::kValidation, "evaluate: no parts with ground truth to evaluate");
  }
  report.ae_deg = report.parts_with_ae > 0 ? ae_sum / report.parts_with_ae : 0.0;
  report.pe = report.parts_with_pe > 0 ? pe_sum / report.parts_with_pe : 0.0;
  report.r_acc = static_cast<double>(rev_correct) / report.parts_total;
  report.p_acc = static_cast<double>(pri_correct) / report.parts_total;
  if (report.gt_movable_total > 0) {
    report.recall = static_cast<double>(report.gt_recovered) / report.gt_movable_total;
  }
  if (pca_dev_count > 0) {
    report.gt_axis_vs_pca_mean_deg = pca_dev_sum / pca_dev_count;
    report.gt_axis_vs_pca_frac_within_5deg =
        static_cast<double>(pca_dev_within5) / pca_dev_count;
  }
  return report;
}

std::string report_to_json(const MetricsReport& report, const std::string& config_hash,
                           const EvalOptions& options) {
  JsonWriter w;
  w.begin_object();
  w.kv("format", "artic-report-v1");
  w.kv("config_hash", config_hash);
  w.kv("angles", "degrees");
  w.kv("lengths", "normalized model units");
  w.kv("flip_invariant", options.flip_invariant);
  w.key("recall_thresholds").begin_object();
  w.kv("ae_deg", options.recall_thresholds.ae_deg);
  w.kv("pe", options.recall_thresholds.pe);
  w.end_object();
  w.kv("AE", report.ae_deg);
  w.kv("PE", report.pe);
  w.kv("R_ACC", report.r_acc);
  w.kv("P_ACC", report.p_acc);
  if (report.recall) {
    w.kv("recall", *report.recall);
  } else {
    w.key("recall").null();
  }
  w.key("counts").begin_object();
  w.kv("shapes_evaluated", report.shapes_evaluated);
  w.kv("shapes_skipped", report.shapes_skipped);
  w.kv("parts_total", report.parts_total);
  w.kv("parts_with_ae", report.parts_with_ae);
  w.kv("parts_skipped_ae", report.parts_skipped_ae);
  w.kv("parts_with_pe", report.parts_with_pe);
  w.kv("parts_skipped_pe", report.parts_skipped_pe);
  w.kv("gt_movable_total", report.gt_movable_total);
  w.kv("gt_recovered", report.gt_recovered);
  w.end_object();
  if (report.gt_axis_vs_pca_mean_deg) {
    w.key("gt_axis_vs_pca").begin_object();
    w.kv("mean_deg", *report.gt_axis_vs_pca_mean_deg);
    w.kv("frac_within_5deg", *report.gt_axis_vs_pca_frac_within_5deg);
    w.end_object();
  }
  w.end_object();
  return std::move(w).str();
}

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "shape,part,pred_rev,pred_pri,gt_rev,gt_pri,ae_deg,pe,pe_pivot_to_line,recovered,"
         "note\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt_g17(*v) : std::string();
  };
  for (const PerPartRow& row : report.per_part) {
    out << row.shape_id << ',' << row.part_id << ',' << (row.pred_rev ? 1 : 0) << ','
        << (row.pred_pri ? 1 : 0) << ',' << (row.gt_rev ? 1 : 0) << ','
        << (row.gt_pri ? 1 : 0) << ',' << opt(row.ae_deg) << ',' << opt(row.pe) << ','
        << opt(row.pe_pivot_to_line) << ','
        << (row.recovered ? (*row.recovered ? "1" : "0") : "") << ',' << row.note << '\n';
  }
  return out.str();
}

}  // namespace artic
