#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "artic/pipeline.hpp"

namespace {

enum class LogLevel { kSilent = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level_from_env() {
  const char* env = std::getenv("ARTIC_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  const std::string value(env);
  if (value == "silent" || value == "0") return LogLevel::kSilent;
  if (value == "debug" || value == "2") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

artic::LogFn make_logger() {
  const LogLevel level = log_level_from_env();
  if (level == LogLevel::kSilent) return {};
  return [](const std::string& line) { std::cerr << line << "\n"; };
}

struct ConfigFlags {
  std::string config_file;
  double epsilon_frac = -1.0;
  double omega_deg = -1.0;
  double eps_contact = -1.0;
  double ae_thresh = -1.0;
  double pe_thresh = -1.0;
  int workers = -1;
  long long seed = -1;
  bool flip_invariant = false;
  bool no_flip_invariant = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_file, "Config file (flat JSON; flags override)");
  cmd->add_option("--epsilon-frac", flags.epsilon_frac,
                  "Prismatic range threshold as a fraction of L");
  cmd->add_option("--omega-deg", flags.omega_deg, "Revolute range threshold in degrees");
  cmd->add_option("--eps-contact", flags.eps_contact, "Contact/detachment tolerance");
  cmd->add_option("--ae-thresh", flags.ae_thresh, "Recall axis-error threshold in degrees");
  cmd->add_option("--pe-thresh", flags.pe_thresh, "Recall point-error threshold");
  cmd->add_option("--workers", flags.workers, "Worker threads (default: all cores)");
  cmd->add_option("--seed", flags.seed, "Sampling seed");
  cmd->add_flag("--flip-invariant", flags.flip_invariant,
                "Fold antipodal axes in axis error (default)");
  cmd->add_flag("--no-flip-invariant", flags.no_flip_invariant, "Use raw axis angles");
}

artic::RunConfig resolve_config(const ConfigFlags& flags) {
  artic::RunConfig config;
  if (!flags.config_file.empty()) config = artic::load_run_config(flags.config_file);
  if (flags.epsilon_frac >= 0.0) config.search.epsilon_frac = flags.epsilon_frac;
  if (flags.omega_deg >= 0.0) config.search.omega_deg = flags.omega_deg;
  if (flags.eps_contact >= 0.0) config.search.eps_contact = flags.eps_contact;
  if (flags.ae_thresh >= 0.0) config.ae_thresh_deg = flags.ae_thresh;
  if (flags.pe_thresh >= 0.0) config.pe_thresh = flags.pe_thresh;
  if (flags.workers >= 0) config.workers = flags.workers;
  if (flags.seed >= 0) config.search.seed = static_cast<uint64_t>(flags.seed);
  if (flags.flip_invariant) config.flip_invariant = true;
  if (flags.no_flip_invariant) config.flip_invariant = false;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric articulation candidate search and evaluation"};
  app.require_subcommand(1);

  std::string dataset_dir, out_dir, candidates_dir, input_dir, out_file, articulation_file;

  ConfigFlags search_flags;
  CLI::App* search = app.add_subcommand(
      "search", "Discover candidate articulations for every shape in a dataset");
  search->add_option("dataset", dataset_dir, "Dataset directory")->required();
  search->add_option("--out", out_dir, "Output directory")->required();
  add_config_flags(search, search_flags);

  CLI::App* export_labels = app.add_subcommand(
      "export-labels", "Flatten candidate files into one training-label table");
  export_labels->add_option("candidates", candidates_dir, "Search output directory")
      ->required();
  export_labels->add_option("--out", out_file, "Output label file")->required();

  ConfigFlags eval_flags;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score candidates or predictions against dataset ground truth");
  eval->add_option("input", input_dir, "Directory of candidates.json/predictions.json trees")
      ->required();
  eval->add_option("dataset", dataset_dir, "Dataset directory with ground truth")->required();
  eval->add_option("--out", out_dir, "Report output directory")->required();
  add_config_flags(eval, eval_flags);

  ConfigFlags validate_flags;
  CLI::App* validate = app.add_subcommand(
      "validate", "Re-simulate proposed articulations and audit their ranges");
  validate->add_option("dataset", dataset_dir, "Dataset directory")->required();
  validate->add_option("articulations", articulation_file,
                       "JSON list of {shape, part, kind, axis, pivot?, range}")
      ->required();
  validate->add_option("--out", out_file, "Report file (default: stdout)");
  add_config_flags(validate, validate_flags);

  CLI11_PARSE(app, argc, argv);

  const artic::LogFn log = make_logger();
  try {
    if (search->parsed()) {
      return artic::run_search(dataset_dir, out_dir, resolve_config(search_flags), log);
    }
    if (export_labels->parsed()) {
      return artic::run_export_labels(candidates_dir, out_file, log);
    }
    if (eval->parsed()) {
      return artic::run_eval(input_dir, dataset_dir, out_dir, resolve_config(eval_flags), log);
    }
    if (validate->parsed()) {
      return artic::run_validate(dataset_dir, articulation_file, out_file,
                                 resolve_config(validate_flags), log);
    }
  } catch (const std::exception& e) {
    if (log) log(std::string("error: ") + e.what());
    return 2;
  }
  return 2;
}
