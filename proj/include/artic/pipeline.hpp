#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "artic/candidates_io.hpp"
#include "artic/eval.hpp"
#include "artic/search.hpp"

namespace artic {

inline constexpr const char* kToolVersion = "artic 0.1.0";

struct RunConfig {
  SearchConfig search;
  double ae_thresh_deg = 5.0;
  double pe_thresh = 0.1;
  bool flip_invariant = true;
  int workers = 0;  // 0 = hardware concurrency
};

// Flat JSON mirroring the config fields; unknown keys rejected so typos in a
// config file never pass silently.
RunConfig load_run_config(const std::string& path);
std::string config_to_json(const RunConfig& config);

// FNV-1a hash of the canonical config JSON; embedded in every output file.
std::string config_hash(const RunConfig& config);

using LogFn = std::function<void(const std::string&)>;

// Exit codes shared by all commands: 0 success, 1 per-shape errors occurred
// (run completed), 2 configuration or I/O failure.
int run_search(const std::string& dataset_dir, const std::string& out_dir,
               const RunConfig& config, const LogFn& log = {});

int run_export_labels(const std::string& candidates_dir, const std::string& out_file,
                      const LogFn& log = {});

int run_eval(const std::string& input_dir, const std::string& dataset_dir,
             const std::string& out_dir, const RunConfig& config, const LogFn& log = {});

int run_validate(const std::string& dataset_dir, const std::string& articulation_file,
                 const std::string& out_file, const RunConfig& config, const LogFn& log = {});

// Shape directories (those containing shape.json) under a dataset root,
// sorted by name; this is the dataset order all outputs follow.
std::vector<std::string> discover_shape_dirs(const std::string& dataset_dir);

// Parsed row of the exported label file, used for round-trip verification.
struct LabelRow {
  std::string shape_id;
  int part_id = -1;
  bool m_rev = false, m_pri = false;
  struct PriSlot {
    bool valid = false;
    Vec3 axis;
    double neg = 0.0, pos = 0.0;
  };
  struct RevSlot {
    bool valid = false;
    Vec3 axis;
    Vec3 pivot;
    double neg_deg = 0.0, pos_deg = 0.0;
  };
  std::array<PriSlot, 3> pri;
  std::array<RevSlot, 3> rev;
};

std::string labels_to_text(std::span<const CandidatesFile> files);
std::vector<LabelRow> parse_labels(const std::string& text);

}  // namespace artic
