#ifndef ARRAYSYNTH_RUN_HPP
#define ARRAYSYNTH_RUN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arraysynth/beams.hpp"
#include "arraysynth/cost.hpp"
#include "arraysynth/optimizer.hpp"
#include "arraysynth/realization.hpp"
#include "arraysynth/toy_em.hpp"

namespace arraysynth {

struct RealizationConfig {
  std::string load_reflection = "open";  // "open", "short"
  double chi_step_deg = 1.0;
  SnapGrid snap;

  Matrix load_matrix(int n_ports) const;
};

/// Declarative run configuration; parsed from a JSON file, with CLI flags
/// layered on top.
struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  std::string strategy = "PointSymmetry";
  ArrayModel grid;
  std::vector<BeamSpec> beams = paper_beam_table();
  StageSchedule schedule;
  RealizationConfig realization;
  bool baseline_mode = false;

  void validate_common() const;
};

RunConfig parse_run_config(const std::filesystem::path& file);

// Built-in preset reproducing the flagship 8x8 configuration.
RunConfig preset_config(const std::string& name);

struct PreprocessSummary {
  int n_elements = 0;
  int n_modes = 0;
  int n_ports = 0;
  int n_blocks = 0;
  int n_nonzero_blocks = 0;
  double seconds = 0.0;
  std::filesystem::path dataset_path;
};

// Builds the toy dataset for the configured grid and writes it to
// config.dataset.
PreprocessSummary cmd_preprocess(const RunConfig& config);

struct OptimizeSummary {
  long complex_design_values = 0;
  long real_parameters = 0;
  double final_cost = 0.0;
  std::vector<double> stage_final_costs;
  bool any_stalled = false;
  int polish_iterations = 0;
  double final_penalty = 0.0;
  std::filesystem::path checkpoint_path;
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
};

OptimizeSummary cmd_optimize(const RunConfig& config);

struct BeamReportRow {
  int beam = 0;
  double theta_t_deg = 0.0;
  BeamMetrics metrics;
  bool sll_pass = false;
  bool xpr_pass = false;
};

struct EvaluateSummary {
  std::vector<BeamReportRow> rows;
  bool all_pass = false;
  double baseline_sll_db = 0.0;  // baseline mode only
  std::filesystem::path report_path;
};

EvaluateSummary cmd_evaluate(const RunConfig& config,
                             const std::filesystem::path& checkpoint);

struct RealizeClassReport {
  int class_id = 0;
  bool ok = false;
  std::string error;
  double chi_star_deg = 0.0;
  bool pole_proximity = false;
  bool flat_sweep = false;
  Eigen::VectorXd lambdas;
  double rotation_deg = 0.0;
  double gsm_residual = 0.0;
};

struct RealizeSummary {
  std::vector<RealizeClassReport> classes;
  std::filesystem::path summary_path;
};

RealizeSummary cmd_realize(const RunConfig& config,
                           const std::filesystem::path& checkpoint);

}  // namespace arraysynth

#endif
