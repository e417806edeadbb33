#include "artic/candidates_io.hpp"

#include <json.hpp>

#include "artic/error.hpp"
#include "artic/jsonw.hpp"

using nlohmann::json;

namespace artic {

namespace {

void write_range(JsonWriter& w, const char* key, const FreeRange& range, double unit_scale) {
  w.key(key).begin_object();
  w.kv("neg", range.neg * unit_scale);
  w.kv("pos", range.pos * unit_scale);
  w.kv("span", range.span() * unit_scale);
  w.end_object();
}

Vec3 parse_vec3(const json& j, const std::string& origin, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::kParse, origin + ": " + what + " must be a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

FreeRange parse_range(const json& j, double unit_scale) {
  FreeRange range;
  range.neg = j.at("neg").get<double>() * unit_scale;
  range.pos = j.at("pos").get<double>() * unit_scale;
  return range;
}

PruneReason parse_reason(const std::string& text, const std::string& origin) {
  if (text == "short-range") return PruneReason::kShortRange;
  if (text == "collision") return PruneReason::kCollision;
  if (text == "detachment") return PruneReason::kDetachment;
  if (text == "pivot-superseded") return PruneReason::kPivotSuperseded;
  throw Error(ErrorKind::kParse, origin + ": unknown prune reason '" + text + "'");
}

}  // namespace

std::string candidates_to_json(const std::string& shape_id, const std::string& config_hash,
                               std::span<const CandidateArticulation> parts) {
  JsonWriter w;
  w.begin_object();
  w.kv("format", "artic-candidates-v1");
  w.kv("config_hash", config_hash);
  w.kv("angles", "degrees");
  w.kv("lengths", "normalized model units");
  w.kv("shape", shape_id);
  w.key("parts").begin_array();
  for (const CandidateArticulation& part : parts) {
    w.begin_object();
    w.kv("part", part.part_id);
    w.kv("m_rev", part.m_rev ? 1 : 0);
    w.kv("m_pri", part.m_pri ? 1 : 0);
    w.key("prismatic").begin_array();
    for (const PrismaticCandidate& pc : part.prismatic) {
      w.begin_object();
      w.kv("eigenvalue_rank", pc.eigenvalue_rank);
      w.key("axis").vec3(pc.axis.x(), pc.axis.y(), pc.axis.z());
      write_range(w, "range", pc.range, 1.0);
      w.end_object();
    }
    w.end_array();
    w.key("revolute").begin_array();
    for (const RevoluteCandidate& rc : part.revolute) {
      w.begin_object();
      w.kv("eigenvalue_rank", rc.eigenvalue_rank);
      w.key("axis").vec3(rc.axis.x(), rc.axis.y(), rc.axis.z());
      w.key("pivot").vec3(rc.pivot.x, rc.pivot.y, rc.pivot.z);
      write_range(w, "range_deg", rc.range, 180.0 / kPi);
      w.end_object();
    }
    w.end_array();
    w.key("pruned").begin_array();
    for (const PrunedCandidate& pr : part.pruned) {
      const bool revolute = pr.kind == MotionSpec::Kind::kRevolute;
      w.begin_object();
      w.kv("kind", revolute ? "revolute" : "prismatic");
      w.kv("axis_rank", pr.axis_rank);
      w.kv("pivot_index", pr.pivot_index);
      w.key("axis").vec3(pr.axis.x(), pr.axis.y(), pr.axis.z());
      if (pr.pivot) w.key("pivot").vec3(pr.pivot->x, pr.pivot->y, pr.pivot->z);
      write_range(w, revolute ? "range_deg" : "range", pr.range,
                  revolute ? 180.0 / kPi : 1.0);
      w.kv("reason", to_string(pr.reason));
      w.end_object();
    }
    w.end_array();
    if (part.diagnostic) w.kv("diagnostic", *part.diagnostic);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return std::move(w).str();
}

CandidatesFile parse_candidates_json(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
  CandidatesFile file;
  try {
    if (root.value("format", "") != "artic-candidates-v1") {
      throw Error(ErrorKind::kParse, origin + ": not an artic-candidates-v1 file");
    }
    file.shape_id = root.at("shape").get<std::string>();
    file.config_hash = root.value("config_hash", "");
    const double deg = kPi / 180.0;
    for (const json& jp : root.at("parts")) {
      CandidateArticulation part;
      part.part_id = jp.at("part").get<int>();
      part.m_rev = jp.at("m_rev").get<int>() != 0;
      part.m_pri = jp.at("m_pri").get<int>() != 0;
      for (const json& jc : jp.at("prismatic")) {
        PrismaticCandidate pc{
            Dir3::normalized(parse_vec3(jc.at("axis"), origin, "axis")),
            jc.at("eigenvalue_rank").get<int>(), parse_range(jc.at("range"), 1.0)};
        part.prismatic.push_back(pc);
      }
      for (const json& jc : jp.at("revolute")) {
        RevoluteCandidate rc{
            Dir3::normalized(parse_vec3(jc.at("axis"), origin, "axis")),
            jc.at("eigenvalue_rank").get<int>(), parse_vec3(jc.at("pivot"), origin, "pivot"),
            parse_range(jc.at("range_deg"), deg)};
        part.revolute.push_back(rc);
      }
      if (jp.contains("pruned")) {
        for (const json& jc : jp["pruned"]) {
          PrunedCandidate pr;
          const bool revolute = jc.at("kind").get<std::string>() == "revolute";
          pr.kind = revolute ? MotionSpec::Kind::kRevolute : MotionSpec::Kind::kPrismatic;
          pr.axis_rank = jc.at("axis_rank").get<int>();
          pr.pivot_index = jc.at("pivot_index").get<int>();
          pr.axis = Dir3::normalized(parse_vec3(jc.at("axis"), origin, "axis"));
          if (jc.contains("pivot")) pr.pivot = parse_vec3(jc["pivot"], origin, "pivot");
          pr.range = parse_range(jc.at(revolute ? "range_deg" : "range"),
                                 revolute ? deg : 1.0);
          pr.reason = parse_reason(jc.at("reason").get<std::string>(), origin);
          part.pruned.push_back(pr);
        }
      }
      if (jp.contains("diagnostic")) part.diagnostic = jp["diagnostic"].get<std::string>();
      file.parts.push_back(std::move(part));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
  return file;
}

std::vector<PredictionRecord> parse_predictions_json(const std::string& text,
                                                     const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
  std::vector<PredictionRecord> preds;
  try {
    for (const json& jp : root.at("parts")) {
      PredictionRecord pred;
      pred.part_id = jp.at("part").get<int>();
      pred.m_rev = jp.at("m_rev").get<int>() != 0;
      pred.m_pri = jp.at("m_pri").get<int>() != 0;
      if (jp.contains("axis")) {
        pred.axis = Dir3::normalized(parse_vec3(jp["axis"], origin, "axis"));
      }
      if (jp.contains("pivot")) pred.pivot = parse_vec3(jp["pivot"], origin, "pivot");
      preds.push_back(pred);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
  return preds;
}

}  // namespace artic
