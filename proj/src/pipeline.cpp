#include "artic/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "artic/error.hpp"
#include "artic/jsonw.hpp"
#include "artic/motion.hpp"
#include "artic/shape.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace artic {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write file: " + path);
  out << content;
}

void log_line(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

Shape load_prepared_shape(const std::string& dir, const RunConfig& config,
                          std::vector<std::string>* warnings) {
  Shape shape = load_shape(dir, warnings);
  prepare_shape(shape, config.search.sample_count, config.search.seed);
  normalize_shape(shape);
  return shape;
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
  JsonWriter w;
  w.begin_object();
  w.kv("epsilon_frac", config.search.epsilon_frac);
  w.kv("omega_deg", config.search.omega_deg);
  w.kv("eps_contact", config.search.eps_contact);
  w.kv("prismatic_step_div", config.search.prismatic_step_div);
  w.kv("revolute_step_deg", config.search.revolute_step_deg);
  w.kv("bisect_div", config.search.bisect_div);
  w.kv("distance_cutoff_factor", config.search.distance_cutoff_factor);
  w.kv("sample_count", config.search.sample_count);
  w.kv("seed", static_cast<unsigned long long>(config.search.seed));
  w.kv("ae_thresh_deg", config.ae_thresh_deg);
  w.kv("pe_thresh", config.pe_thresh);
  w.kv("flip_invariant", config.flip_invariant);
  w.end_object();
  return std::move(w).str();
}

RunConfig load_run_config(const std::string& path) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  RunConfig config;
  for (const auto& [key, value] : root.items()) {
    if (key == "epsilon_frac") config.search.epsilon_frac = value.get<double>();
    else if (key == "omega_deg") config.search.omega_deg = value.get<double>();
    else if (key == "eps_contact") config.search.eps_contact = value.get<double>();
    else if (key == "prismatic_step_div") config.search.prismatic_step_div = value.get<double>();
    else if (key == "revolute_step_deg") config.search.revolute_step_deg = value.get<double>();
    else if (key == "bisect_div") config.search.bisect_div = value.get<double>();
    else if (key == "distance_cutoff_factor")
      config.search.distance_cutoff_factor = value.get<double>();
    else if (key == "sample_count") config.search.sample_count = value.get<int>();
    else if (key == "seed") config.search.seed = value.get<uint64_t>();
    else if (key == "ae_thresh_deg") config.ae_thresh_deg = value.get<double>();
    else if (key == "pe_thresh") config.pe_thresh = value.get<double>();
    else if (key == "flip_invariant") config.flip_invariant = value.get<bool>();
    else if (key == "workers") config.workers = value.get<int>();
    else throw Error(ErrorKind::kParse, path + ": unknown config key '" + key + "'");
  }
  return config;
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config_to_json(config);
  uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<std::string> discover_shape_dirs(const std::string& dataset_dir) {
  if (!fs::is_directory(dataset_dir)) {
    throw Error(ErrorKind::kNotFound, "dataset directory not found: " + dataset_dir);
  }
  std::vector<std::string> dirs;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "shape.json")) {
      dirs.push_back(entry.path().filename().string());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int run_search(const std::string& dataset_dir, const std::string& out_dir,
               const RunConfig& config, const LogFn& log) {
  std::vector<std::string> shape_dirs;
  try {
    config.search.validate();
    shape_dirs = discover_shape_dirs(dataset_dir);
    if (shape_dirs.empty()) {
      throw Error(ErrorKind::kNotFound, "no shape directories under " + dataset_dir);
    }
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    log_line(log, std::string("error: ") + e.what());
    return 2;
  }

  const std::string hash = config_hash(config);

  struct ShapeResult {
    std::string shape_id;
    std::string candidates_json;
    bool ok = false;
    std::string message;
    std::vector<std::string> warnings;
    double wall_ms = 0.0;
  };
  std::vector<ShapeResult> results(shape_dirs.size());

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                              : hardware;
  std::atomic<size_t> next{0};
  auto worker_fn = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= shape_dirs.size()) break;
      const auto start = std::chrono::steady_clock::now();
      ShapeResult& result = results[i];
      try {
        // Warnings are buffered per shape and logged after the join, so
        // workers never touch the log concurrently and output order is
        // stable.
        const Shape shape =
            load_prepared_shape((fs::path(dataset_dir) / shape_dirs[i]).string(), config,
                                &result.warnings);
        const auto candidates = search_shape(shape, config.search);
        result.shape_id = shape.id;
        result.candidates_json = candidates_to_json(shape.id, hash, candidates);
        result.ok = true;
      } catch (const std::exception& e) {
        result.ok = false;
        result.message = e.what();
      }
      result.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
  };
  {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t + 1 < workers; ++t) pool.emplace_back(worker_fn);
    worker_fn();
    for (std::thread& t : pool) t.join();
  }

  // Buffered results, written in dataset order regardless of which worker
  // finished first.
  bool any_error = false;
  try {
    for (size_t i = 0; i < shape_dirs.size(); ++i) {
      for (const std::string& warning : results[i].warnings) {
        log_line(log, "warning: " + warning);
      }
      if (!results[i].ok) {
        any_error = true;
        log_line(log, "error in shape " + shape_dirs[i] + ": " + results[i].message);
        continue;
      }
      const fs::path shape_out = fs::path(out_dir) / shape_dirs[i];
      fs::create_directories(shape_out);
      write_file((shape_out / "candidates.json").string(),
                 results[i].candidates_json + "\n");
    }

    JsonWriter manifest;
    manifest.begin_object();
    manifest.kv("format", "artic-run-manifest-v1");
    manifest.kv("tool", kToolVersion);
    manifest.kv("config_hash", hash);
    manifest.kv("angles", "degrees");
    manifest.kv("lengths", "normalized model units");
    manifest.key("config").raw(config_to_json(config));
    manifest.kv("dataset", dataset_dir);
    manifest.key("shapes").begin_array();
    for (size_t i = 0; i < shape_dirs.size(); ++i) {
      manifest.begin_object();
      manifest.kv("dir", shape_dirs[i]);
      if (results[i].ok) manifest.kv("id", results[i].shape_id);
      manifest.kv("status", results[i].ok ? "ok" : "error");
      if (!results[i].ok) manifest.kv("message", results[i].message);
      manifest.kv("wall_ms", results[i].wall_ms);
      manifest.end_object();
    }
    manifest.end_array();
    manifest.end_object();
    write_file((fs::path(out_dir) / "run_manifest.json").string(),
               std::move(manifest).str() + "\n");
  } catch (const std::exception& e) {
    log_line(log, std::string("error: ") + e.what());
    return 2;
  }
  return any_error ? 1 : 0;
}

std::string labels_to_text(std::span<const CandidatesFile> files) {
  std::ostringstream out;
  out << "# artic-labels-v1\n";
  out << "# angles=degrees lengths=normalized-model-units\n";
  if (!files.empty()) out << "# config_hash=" << files.front().config_hash << "\n";
  out << "# slot k holds the axis of PCA eigenvalue rank k; invalid slots are "
         "zero-padded with valid=0\n";
  out << "shape\tpart\tm_rev\tm_pri";
  for (int k = 0; k < 3; ++k) {
    out << "\tpri" << k << "_valid\tpri" << k << "_ax\tpri" << k << "_ay\tpri" << k
        << "_az\tpri" << k << "_neg\tpri" << k << "_pos";
  }
  for (int k = 0; k < 3; ++k) {
    out << "\trev" << k << "_valid\trev" << k << "_ax\trev" << k << "_ay\trev" << k
        << "_az\trev" << k << "_px\trev" << k << "_py\trev" << k << "_pz\trev" << k
        << "_neg_deg\trev" << k << "_pos_deg";
  }
  out << "\n";

  for (const CandidatesFile& file : files) {
    for (const CandidateArticulation& part : file.parts) {
      out << file.shape_id << '\t' << part.part_id << '\t' << (part.m_rev ? 1 : 0) << '\t'
          << (part.m_pri ? 1 : 0);
      std::array<const PrismaticCandidate*, 3> pri{};
      for (const PrismaticCandidate& pc : part.prismatic) {
        if (pc.eigenvalue_rank >= 0 && pc.eigenvalue_rank < 3) pri[pc.eigenvalue_rank] = &pc;
      }
      std::array<const RevoluteCandidate*, 3> rev{};
      for (const RevoluteCandidate& rc : part.revolute) {
        if (rc.eigenvalue_rank >= 0 && rc.eigenvalue_rank < 3) rev[rc.eigenvalue_rank] = &rc;
      }
      for (int k = 0; k < 3; ++k) {
        if (pri[k]) {
          out << "\t1\t" << fmt_g17(pri[k]->axis.x()) << '\t' << fmt_g17(pri[k]->axis.y())
              << '\t' << fmt_g17(pri[k]->axis.z()) << '\t' << fmt_g17(pri[k]->range.neg)
              << '\t' << fmt_g17(pri[k]->range.pos);
        } else {
          out << "\t0\t0\t0\t0\t0\t0";
        }
      }
      for (int k = 0; k < 3; ++k) {
        if (rev[k]) {
          out << "\t1\t" << fmt_g17(rev[k]->axis.x()) << '\t' << fmt_g17(rev[k]->axis.y())
              << '\t' << fmt_g17(rev[k]->axis.z()) << '\t' << fmt_g17(rev[k]->pivot.x)
              << '\t' << fmt_g17(rev[k]->pivot.y) << '\t' << fmt_g17(rev[k]->pivot.z) << '\t'
              << fmt_g17(rad_to_deg(rev[k]->range.neg)) << '\t'
              << fmt_g17(rad_to_deg(rev[k]->range.pos));
        } else {
          out << "\t0\t0\t0\t0\t0\t0\t0\t0\t0";
        }
      }
      out << "\n";
    }
  }
  return out.str();
}

std::vector<LabelRow> parse_labels(const std::string& text) {
  std::vector<LabelRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    const size_t expected = 4 + 3 * 6 + 3 * 9;
    if (fields.size() != expected) {
      throw Error(ErrorKind::kParse, "label row has " + std::to_string(fields.size()) +
                                         " fields, expected " + std::to_string(expected));
    }
    LabelRow row;
    size_t f = 0;
    row.shape_id = fields[f++];
    row.part_id = std::stoi(fields[f++]);
    row.m_rev = fields[f++] == "1";
    row.m_pri = fields[f++] == "1";
    for (int k = 0; k < 3; ++k) {
      LabelRow::PriSlot& slot = row.pri[k];
      slot.valid = fields[f++] == "1";
      slot.axis = {std::stod(fields[f]), std::stod(fields[f + 1]), std::stod(fields[f + 2])};
      f += 3;
      slot.neg = std::stod(fields[f++]);
      slot.pos = std::stod(fields[f++]);
    }
    for (int k = 0; k < 3; ++k) {
      LabelRow::RevSlot& slot = row.rev[k];
      slot.valid = fields[f++] == "1";
      slot.axis = {std::stod(fields[f]), std::stod(fields[f + 1]), std::stod(fields[f + 2])};
      f += 3;
      slot.pivot = {std::stod(fields[f]), std::stod(fields[f + 1]), std::stod(fields[f + 2])};
      f += 3;
      slot.neg_deg = std::stod(fields[f++]);
      slot.pos_deg = std::stod(fields[f++]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_export_labels(const std::string& candidates_dir, const std::string& out_file,
                      const LogFn& log) {
  std::vector<CandidatesFile> files;
  try {
    if (!fs::is_directory(candidates_dir)) {
      throw Error(ErrorKind::kNotFound, "candidates directory not found: " + candidates_dir);
    }
    std::vector<std::string> dirs;
    for (const auto& entry : fs::directory_iterator(candidates_dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "candidates.json")) {
        dirs.push_back(entry.path().filename().string());
      }
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) {
      throw Error(ErrorKind::kNotFound,
                  "no candidates.json files under " + candidates_dir);
    }
    for (const std::string& dir : dirs) {
      const std::string path =
          (fs::path(candidates_dir) / dir / "candidates.json").string();
      files.push_back(parse_candidates_json(read_file(path), path));
    }
    write_file(out_file, labels_to_text(files));
  } catch (const std::exception& e) {
    log_line(log, std::string("error: ") + e.what());
    return 2;
  }
  return 0;
}

int run_eval(const std::string& input_dir, const std::string& dataset_dir,
             const std::string& out_dir, const RunConfig& config, const LogFn& log) {
  try {
    const std::vector<std::string> shape_dirs = discover_shape_dirs(dataset_dir);
    std::vector<Shape> shapes;
    std::vector<ShapeEvalInput> inputs;
    shapes.reserve(shape_dirs.size());

    int missing_inputs = 0;
    for (const std::string& dir : shape_dirs) {
      const fs::path input_path = fs::path(input_dir) / dir;
      const fs::path cand_file = input_path / "candidates.json";
      const fs::path pred_file = input_path / "predictions.json";
      if (!fs::exists(cand_file) && !fs::exists(pred_file)) {
        ++missing_inputs;
        log_line(log, "warning: no candidates/predictions for shape " + dir + ", skipped");
        continue;
      }
      shapes.push_back(
          load_prepared_shape((fs::path(dataset_dir) / dir).string(), config, nullptr));
      ShapeEvalInput input;
      input.shape = &shapes.back();
      if (fs::exists(cand_file)) {
        CandidatesFile file =
            parse_candidates_json(read_file(cand_file.string()), cand_file.string());
        if (file.shape_id != shapes.back().id) {
          throw Error(ErrorKind::kValidation,
                      "id mismatch: candidates file " + cand_file.string() + " is for '" +
                          file.shape_id + "' but dataset shape is '" + shapes.back().id +
                          "'");
        }
        input.candidates = std::move(file.parts);
        input.has_candidates = true;
      } else {
        input.predictions =
            parse_predictions_json(read_file(pred_file.string()), pred_file.string());
      }
      inputs.push_back(std::move(input));
    }
    if (inputs.empty()) {
      throw Error(ErrorKind::kNotFound, "no evaluable shapes found");
    }

    EvalOptions options;
    options.flip_invariant = config.flip_invariant;
    options.recall_thresholds = {config.ae_thresh_deg, config.pe_thresh};
    MetricsReport report = evaluate(inputs, options);
    report.shapes_skipped += missing_inputs;

    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "report.json").string(),
               report_to_json(report, config_hash(config), options) + "\n");
    write_file((fs::path(out_dir) / "report.csv").string(), report_to_csv(report));
  } catch (const std::exception& e) {
    log_line(log, std::string("error: ") + e.what());
    return 2;
  }
  return 0;
}

int run_validate(const std::string& dataset_dir, const std::string& articulation_file,
                 const std::string& out_file, const RunConfig& config, const LogFn& log) {
  try {
    json root;
    try {
      root = json::parse(read_file(articulation_file));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, articulation_file + ": " + e.what());
    }
    if (!root.is_array()) {
      throw Error(ErrorKind::kParse, articulation_file + ": expected a JSON array");
    }

    // Shapes are loaded lazily and cached per directory name.
    std::map<std::string, Shape> shapes;
    std::map<std::string, ShapeGeometry> geometries;

    JsonWriter w;
    w.begin_object();
    w.kv("format", "artic-validate-v1");
    w.kv("config_hash", config_hash(config));
    w.kv("angles", "degrees");
    w.kv("lengths", "normalized model units");
    w.key("entries").begin_array();

    for (const json& entry : root) {
      const std::string shape_dir = entry.at("shape").get<std::string>();
      const int part_id = entry.at("part").get<int>();
      const std::string kind = entry.at("kind").get<std::string>();
      if (kind != "revolute" && kind != "prismatic") {
        throw Error(ErrorKind::kValidation, "unknown motion kind: " + kind);
      }
      const bool revolute = kind == "revolute";

      if (!shapes.count(shape_dir)) {
        const fs::path dir = fs::path(dataset_dir) / shape_dir;
        if (!fs::is_directory(dir)) {
          throw Error(ErrorKind::kNotFound, "unknown shape directory: " + shape_dir);
        }
        shapes.emplace(shape_dir, load_prepared_shape(dir.string(), config, nullptr));
        geometries.emplace(shape_dir, ShapeGeometry::build(shapes.at(shape_dir)));
      }
      const Shape& shape = shapes.at(shape_dir);
      int part_index = -1;
      for (size_t i = 0; i < shape.parts.size(); ++i) {
        if (shape.parts[i].id == part_id) part_index = static_cast<int>(i);
      }
      if (part_index < 0) {
        throw Error(ErrorKind::kValidation, "unknown part id " + std::to_string(part_id) +
                                                " in shape " + shape_dir);
      }

      // Entries are in normalized coordinates by default (the frame of
      // candidates.json); "frame": "dataset" maps raw annotation coordinates
      // through the shape's recorded normalization.
      const std::string frame = entry.value("frame", "normalized");
      if (frame != "normalized" && frame != "dataset") {
        throw Error(ErrorKind::kValidation, "unknown frame: " + frame);
      }
      const bool dataset_frame = frame == "dataset";
      const Normalization& norm = shape.normalization;

      const Vec3 axis_raw = {entry.at("axis")[0].get<double>(),
                             entry.at("axis")[1].get<double>(),
                             entry.at("axis")[2].get<double>()};
      const Dir3 axis = Dir3::normalized(axis_raw);
      MotionSpec spec = MotionSpec::prismatic(axis);
      if (revolute) {
        if (!entry.contains("pivot")) {
          throw Error(ErrorKind::kValidation, "revolute entry without pivot");
        }
        Vec3 pivot{entry["pivot"][0].get<double>(), entry["pivot"][1].get<double>(),
                   entry["pivot"][2].get<double>()};
        if (dataset_frame) pivot = pivot * norm.scale + norm.offset;
        spec = MotionSpec::revolute(axis, pivot);
      }
      double lo = entry.at("range")[0].get<double>();
      double hi = entry.at("range")[1].get<double>();
      if (revolute) {
        lo = deg_to_rad(lo);
        hi = deg_to_rad(hi);
      } else if (dataset_frame) {
        lo *= norm.scale;
        hi *= norm.scale;
      }
      if (lo > hi) std::swap(lo, hi);

      const MotionScene scene =
          make_motion_scene(shape, geometries.at(shape_dir), part_index,
                            config.search.eps_contact, config.search.distance_cutoff_factor);
      const double extent = shape.parts[part_index].obb.max_extent();
      const double step = revolute ? deg_to_rad(config.search.revolute_step_deg)
                                   : extent / config.search.prismatic_step_div;
      const double cap = revolute ? kPi : extent;
      const SweepParams params{step, cap, step / config.search.bisect_div};
      const RangeDetail actual = free_range(scene, spec, params, config.search.eps_contact,
                                            config.search.distance_cutoff_factor);

      // Re-simulate across the claimed range at the sweep resolution.
      int valid = 0, collision = 0, detached = 0;
      const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
      for (int s = 0; s <= steps; ++s) {
        const double t = lo + (hi - lo) * s / steps;
        const PoseVerdict verdict =
            classify_pose(scene, pose_at(spec, t), config.search.eps_contact,
                          config.search.distance_cutoff_factor);
        if (verdict == PoseVerdict::kValid) ++valid;
        else if (verdict == PoseVerdict::kCollision) ++collision;
        else ++detached;
      }
      const bool within =
          lo >= actual.range.neg - params.bisect_tol && hi <= actual.range.pos + params.bisect_tol;

      const double unit = revolute ? 180.0 / kPi : 1.0;
      w.begin_object();
      w.kv("shape", shape_dir);
      w.kv("part", part_id);
      w.kv("kind", kind);
      w.key("claimed_range").begin_array();
      w.value(lo * unit).value(hi * unit);
      w.end_array();
      w.key("free_range").begin_array();
      w.value(actual.range.neg * unit).value(actual.range.pos * unit);
      w.end_array();
      w.key("verdicts").begin_object();
      w.kv("valid", valid);
      w.kv("collision", collision);
      w.kv("detached", detached);
      w.end_object();
      w.kv("valid_throughout", collision == 0 && detached == 0);
      w.kv("within_free_range", within);
      w.end_object();
    }
    w.end_array();
    w.end_object();

    const std::string text = std::move(w).str() + "\n";
    if (out_file.empty()) {
      std::cout << text;
    } else {
      write_file(out_file, text);
    }
  } catch (const std::exception& e) {
    log_line(log, std::string("error: ") + e.what());
    return 2;
  }
  return 0;
}

}  // namespace artic
