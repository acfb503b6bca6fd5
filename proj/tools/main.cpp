#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>

#include "arraysynth/errors.hpp"
#include "arraysynth/run.hpp"

namespace {

using namespace arraysynth;

struct CommonFlags {
  std::string config;
  std::string preset;
  std::string dataset;
  std::string checkpoint;
  std::string out;
  std::string strategy;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool baseline = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Run configuration file (JSON)");
  cmd->add_option("--preset", flags.preset, "Built-in configuration preset (paper-8x8)");
  cmd->add_option("--dataset", flags.dataset, "Dataset directory");
  cmd->add_option("--out", flags.out, "Output directory");
  cmd->add_option("--strategy", flags.strategy,
                  "DOF strategy (PointSymmetry, EqualElements, EdgeCornerInternal, "
                  "Alternating)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&flags](const std::uint64_t& s) { flags.seed = s; flags.seed_set = true; },
      "Random seed");
}

RunConfig resolve_config(const CommonFlags& flags) {
  if (!flags.config.empty() && !flags.preset.empty()) {
    throw config_error("--config and --preset cannot be combined");
  }
  RunConfig config;
  if (!flags.config.empty()) {
    config = parse_run_config(flags.config);
  } else if (!flags.preset.empty()) {
    config = preset_config(flags.preset);
  }
  if (!flags.dataset.empty()) config.dataset = flags.dataset;
  if (!flags.out.empty()) config.out = flags.out;
  if (!flags.strategy.empty()) config.strategy = flags.strategy;
  if (flags.seed_set) config.seed = flags.seed;
  config.baseline_mode = config.baseline_mode || flags.baseline;
  return config;
}

int run_preprocess(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const PreprocessSummary s = cmd_preprocess(config);
  std::printf("dataset: %s\n", s.dataset_path.string().c_str());
  std::printf("elements: %d (modes per element: %d, ports: %d)\n", s.n_elements,
              s.n_modes, s.n_ports);
  std::printf("coupling blocks: %d (%d nonzero)\n", s.n_blocks, s.n_nonzero_blocks);
  std::printf("elapsed: %.3f s\n", s.seconds);
  return 0;
}

int run_optimize(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const OptimizeSummary s = cmd_optimize(config);
  std::printf("complex design values: %ld (real parameters: %ld)\n",
              s.complex_design_values, s.real_parameters);
  for (std::size_t l = 0; l < s.stage_final_costs.size(); ++l) {
    std::printf("stage %zu final cost: %.9g\n", l, s.stage_final_costs[l]);
  }
  std::printf("final cost: %.9g\n", s.final_cost);
  if (s.any_stalled) std::printf("note: line search stalled in at least one stage\n");
  std::printf("checkpoint: %s\n", s.checkpoint_path.string().c_str());
  std::printf("trace: %s\n", s.trace_path.string().c_str());
  std::printf("summary: %s\n", s.summary_path.string().c_str());
  return 0;
}

int run_evaluate(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  if (!config.baseline_mode && flags.checkpoint.empty()) {
    throw config_error("evaluate: --checkpoint required (or --baseline)");
  }
  const EvaluateSummary s = cmd_evaluate(config, flags.checkpoint);
  if (config.baseline_mode) {
    std::printf("baseline max sidelobe: %.3f dB\n", s.baseline_sll_db);
  } else {
    std::printf("%4s %8s %12s %9s %9s %5s\n", "beam", "theta_t", "directivity", "sll_db",
                "xpr_db", "pass");
    for (const auto& row : s.rows) {
      std::printf("%4d %8.1f %12.2f %9.2f %9.2f %5s\n", row.beam, row.theta_t_deg,
                  row.metrics.directivity_dbi, row.metrics.sll_db, row.metrics.xpr_db,
                  (row.sll_pass && row.xpr_pass) ? "yes" : "no");
    }
    std::printf("all pass: %s\n", s.all_pass ? "yes" : "no");
  }
  std::printf("report: %s\n", s.report_path.string().c_str());
  return 0;
}

int run_realize(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  if (flags.checkpoint.empty()) throw config_error("realize: --checkpoint required");
  const RealizeSummary s = cmd_realize(config, flags.checkpoint);
  for (const auto& r : s.classes) {
    if (!r.ok) {
      std::printf("class %2d: sweep failed (%s)\n", r.class_id, r.error.c_str());
      continue;
    }
    std::printf("class %2d: chi* = %6.1f deg, rotation = %7.2f deg, residual = %.3g%s\n",
                r.class_id, r.chi_star_deg, r.rotation_deg, r.gsm_residual,
                r.pole_proximity ? " [near pole]" : (r.flat_sweep ? " [flat sweep]" : ""));
  }
  std::printf("summary: %s\n", s.summary_path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupling-aware antenna-array synthesis on GSM manifolds"};
  app.require_subcommand(1);

  CommonFlags pre_flags, opt_flags, eval_flags, real_flags;
  CLI::App* pre = app.add_subcommand("preprocess", "Build a toy-model dataset");
  add_common(pre, pre_flags);
  CLI::App* opt = app.add_subcommand("optimize", "Run the staged-penalty optimization");
  add_common(opt, opt_flags);
  CLI::App* eval = app.add_subcommand("evaluate", "Evaluate a checkpoint against targets");
  add_common(eval, eval_flags);
  eval->add_option("--checkpoint", eval_flags.checkpoint, "Design checkpoint directory");
  eval->add_flag("--baseline", eval_flags.baseline,
                 "Report the Chebyshev array-factor baseline instead of a checkpoint");
  CLI::App* real = app.add_subcommand("realize", "Map optimized GSMs to element targets");
  add_common(real, real_flags);
  real->add_option("--checkpoint", real_flags.checkpoint, "Design checkpoint directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return run_preprocess(pre_flags);
    if (opt->parsed()) return run_optimize(opt_flags);
    if (eval->parsed()) return run_evaluate(eval_flags);
    if (real->parsed()) return run_realize(real_flags);
  } catch (const arraysynth::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const arraysynth::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const arraysynth::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
