#include "arraysynth/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "arraysynth/dataset.hpp"
#include "arraysynth/chebyshev.hpp"
#include "arraysynth/errors.hpp"

namespace arraysynth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw io_error("cannot open " + file.string() + " for writing");
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw io_error("cannot create output directory " + dir.string());
  }
}

}  // namespace

Matrix RealizationConfig::load_matrix(int n_ports) const {
  Complex value;
  if (load_reflection == "open") {
    value = Complex(1.0, 0.0);
  } else if (load_reflection == "short") {
    value = Complex(-1.0, 0.0);
  } else {
    throw config_error("realization.load_reflection must be 'open' or 'short'");
  }
  return value * Matrix::Identity(n_ports, n_ports);
}

void RunConfig::validate_common() const {
  grid.validate();
  if (beams.empty()) throw config_error("config: beam table is empty");
  for (const auto& b : beams) {
    if (b.target.theta < -90.0 || b.target.theta > 90.0) {
      throw config_error("config: beam target angle outside [-90, 90] degrees");
    }
    b.validate();
  }
  schedule.validate();
  if (realization.chi_step_deg <= 0.0) {
    throw config_error("config: realization.chi_step_deg must be positive");
  }
}

RunConfig preset_config(const std::string& name) {
  if (name != "paper-8x8") throw config_error("unknown preset '" + name + "'");
  RunConfig config;
  config.grid.rows = 8;
  config.grid.cols = 8;
  config.grid.dx_wavelengths = 0.5;
  config.grid.dy_wavelengths = 0.5;
  config.grid.n_ports = 1;
  config.strategy = "PointSymmetry";
  config.beams = paper_beam_table();
  config.schedule = StageSchedule{};
  return config;
}

RunConfig parse_run_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot open config file " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error("malformed config " + file.string() + ": " + e.what());
  }

  RunConfig config;
  if (j.contains("preset")) config = preset_config(j.at("preset").get<std::string>());
  try {
    if (j.contains("dataset")) config.dataset = j.at("dataset").get<std::string>();
    if (j.contains("out")) config.out = j.at("out").get<std::string>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("strategy")) config.strategy = j.at("strategy").get<std::string>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      config.grid.rows = g.value("rows", config.grid.rows);
      config.grid.cols = g.value("cols", config.grid.cols);
      config.grid.dx_wavelengths = g.value("dx_wavelengths", config.grid.dx_wavelengths);
      config.grid.dy_wavelengths = g.value("dy_wavelengths", config.grid.dy_wavelengths);
      config.grid.n_ports = g.value("n_ports", config.grid.n_ports);
    }
    if (j.contains("beams")) {
      const auto& b = j.at("beams");
      if (b.contains("table")) {
        if (b.at("table").get<std::string>() != "paper-8x8") {
          throw config_error("beams.table: unknown table name");
        }
        config.beams = paper_beam_table();
      } else if (b.contains("scan_thetas_deg")) {
        config.beams = make_beam_table(
            b.at("scan_thetas_deg").get<std::vector<double>>(), b.value("sll_db", -15.0),
            b.value("xpr_db", -30.0), b.value("window_halfwidth_deg", 15.0));
      } else {
        throw config_error("beams: expected 'table' or 'scan_thetas_deg'");
      }
    }
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      if (s.contains("alphas")) {
        config.schedule.alphas = s.at("alphas").get<std::vector<double>>();
      }
      config.schedule.tolerance = s.value("tolerance", config.schedule.tolerance);
      config.schedule.max_iterations =
          s.value("max_iterations", config.schedule.max_iterations);
    }
    if (j.contains("realization")) {
      const auto& r = j.at("realization");
      config.realization.load_reflection =
          r.value("load_reflection", config.realization.load_reflection);
      config.realization.chi_step_deg =
          r.value("chi_step_deg", config.realization.chi_step_deg);
      config.realization.snap.lambda_step =
          r.value("snap_lambda_step", config.realization.snap.lambda_step);
      config.realization.snap.angle_step_deg =
          r.value("snap_angle_step_deg", config.realization.snap.angle_step_deg);
    }
    if (j.contains("baseline")) config.baseline_mode = j.at("baseline").get<bool>();
  } catch (const json::exception& e) {
    throw config_error("invalid config value in " + file.string() + ": " + e.what());
  }
  config.validate_common();
  return config;
}

// -- preprocess ---------------------------------------------------------------

PreprocessSummary cmd_preprocess(const RunConfig& config) {
  config.grid.validate();
  if (config.dataset.empty()) {
    throw config_error("preprocess: dataset output path required");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const CouplingMatrix coupling = coupling_matrix(config.grid, CouplingAssembly::toeplitz);
  const ModalFarFieldSet fields = build_far_field_set(config.grid);
  export_dataset(config.grid, coupling, fields, config.dataset);

  PreprocessSummary summary;
  summary.n_elements = config.grid.n_elements();
  summary.n_modes = config.grid.n_modes();
  summary.n_ports = config.grid.n_ports;
  summary.n_blocks = summary.n_elements * summary.n_elements;
  summary.n_nonzero_blocks = summary.n_blocks - summary.n_elements;
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  summary.dataset_path = config.dataset;
  return summary;
}

// -- optimize -----------------------------------------------------------------

OptimizeSummary cmd_optimize(const RunConfig& config) {
  config.validate_common();
  if (config.dataset.empty() || !fs::exists(config.dataset)) {
    throw config_error("optimize: dataset path does not exist: " +
                       config.dataset.string());
  }
  Dataset data = import_dataset(config.dataset);
  if (data.model.rows != config.grid.rows || data.model.cols != config.grid.cols) {
    throw validation_error("optimize: dataset grid does not match the configuration");
  }
  if (data.model.n_ports != 1) {
    throw validation_error("optimize: factored excitations require P = 1 datasets");
  }
  const DofAssignment assignment =
      dof_strategy(config.strategy, data.model.rows, data.model.cols);
  SynthesisProblem problem(data.coupling, assignment, data.fields, config.beams);

  const DesignPoint x0 = random_design_point(
      assignment.n_classes, data.model.n_modes(), 1, data.model.rows, data.model.cols,
      problem.n_states(), config.seed);
  const OptimizationResult result = staged_optimize(problem, x0, config.schedule);

  ensure_dir(config.out);
  OptimizeSummary summary;
  summary.complex_design_values = problem.complex_design_value_count(1);
  summary.real_parameters = 2 * summary.complex_design_values;
  summary.final_cost = result.stage_final_costs.back();
  summary.stage_final_costs = result.stage_final_costs;
  summary.any_stalled = result.any_stalled;
  summary.polish_iterations = result.polish_iterations;
  summary.final_penalty = result.final_penalty;
  summary.checkpoint_path = config.out / "checkpoint";
  summary.trace_path = config.out / "trace.csv";
  summary.summary_path = config.out / "summary.txt";

  save_checkpoint(result.point, config.strategy, summary.checkpoint_path);

  auto trace = open_out(summary.trace_path);
  trace << "stage,iter,cost,grad_norm,step,elapsed_s\n";
  for (const auto& rec : result.trace) {
    trace << rec.stage << ',' << rec.iteration << ',' << fmt(rec.cost) << ','
          << fmt(rec.grad_norm) << ',' << fmt(rec.step) << ',' << fmt(rec.elapsed_s)
          << '\n';
  }

  auto out = open_out(summary.summary_path);
  out << "strategy = " << config.strategy << "\n";
  out << "seed = " << config.seed << "\n";
  out << "states = " << problem.n_states() << "\n";
  out << "classes = " << assignment.n_classes << "\n";
  out << "complex_design_values = " << summary.complex_design_values << "\n";
  out << "real_parameters = " << summary.real_parameters << "\n";
  out << "stages = " << config.schedule.alphas.size() << "\n";
  for (std::size_t l = 0; l < summary.stage_final_costs.size(); ++l) {
    out << "stage_" << l << "_alpha = " << fmt(config.schedule.alphas[l]) << "\n";
    out << "stage_" << l << "_final_cost = " << fmt(summary.stage_final_costs[l]) << "\n";
  }
  out << "final_cost = " << fmt(summary.final_cost) << "\n";
  out << "polish_iterations = " << summary.polish_iterations << "\n";
  out << "final_penalty = " << fmt(summary.final_penalty) << "\n";
  out << "stalled = " << (summary.any_stalled ? "true" : "false") << "\n";
  return summary;
}

// -- evaluate -----------------------------------------------------------------

namespace {

EvaluateSummary evaluate_baseline(const RunConfig& config) {
  const auto& beam = config.beams.front();
  const ArrayFactor af = chebyshev_baseline(config.grid.cols, beam.sll_target_db,
                                            config.grid.dx_wavelengths, 0.0);
  ensure_dir(config.out);
  EvaluateSummary summary;
  summary.baseline_sll_db = max_sidelobe_db(af);
  summary.report_path = config.out / "baseline.txt";

  auto csv = open_out(config.out / "baseline_af.csv");
  csv << "theta_deg,af_db\n";
  Eigen::VectorXd thetas(1801);
  for (int i = 0; i < 1801; ++i) thetas(i) = -90.0 + 0.1 * i;
  const Eigen::VectorXd mag = af.magnitude_db(thetas);
  for (int i = 0; i < 1801; ++i) {
    csv << fmt(thetas(i)) << ',' << fmt(mag(i)) << '\n';
  }

  auto out = open_out(summary.report_path);
  out << "mode = chebyshev-baseline\n";
  out << "elements = " << config.grid.cols << "\n";
  out << "spacing_wavelengths = " << fmt(config.grid.dx_wavelengths) << "\n";
  out << "sll_target_db = " << fmt(beam.sll_target_db) << "\n";
  out << "sll_achieved_db = " << fmt(summary.baseline_sll_db) << "\n";
  return summary;
}

}  // namespace

EvaluateSummary cmd_evaluate(const RunConfig& config, const fs::path& checkpoint) {
  config.validate_common();
  if (config.baseline_mode) return evaluate_baseline(config);

  if (config.dataset.empty() || !fs::exists(config.dataset)) {
    throw config_error("evaluate: dataset path does not exist: " +
                       config.dataset.string());
  }
  Dataset data = import_dataset(config.dataset);
  Checkpoint ck = load_checkpoint(checkpoint);
  const DofAssignment assignment =
      dof_strategy(ck.strategy.empty() ? config.strategy : ck.strategy, data.model.rows,
                   data.model.cols);
  if (ck.point.n_classes() != assignment.n_classes ||
      ck.point.excitation.n_rows() != data.model.rows ||
      ck.point.excitation.n_cols() != data.model.cols) {
    throw validation_error("evaluate: checkpoint incompatible with the dataset grid");
  }
  if (ck.point.excitation.n_states() != static_cast<int>(config.beams.size())) {
    throw validation_error("evaluate: checkpoint state count does not match beam table");
  }
  SynthesisProblem problem(data.coupling, assignment, data.fields, config.beams);
  problem.check_point(ck.point);

  const Matrix f = problem.solve_modal(ck.point);
  Matrix f_theta, f_phi;
  data.fields.evaluate_cut(f, f_theta, f_phi);
  const std::vector<BeamMetrics> all_metrics = problem.evaluate_metrics(ck.point);

  ensure_dir(config.out);
  EvaluateSummary summary;
  summary.report_path = config.out / "metrics.txt";
  summary.all_pass = true;

  const auto& cut = data.fields.cut_grid();
  for (std::size_t s = 0; s < config.beams.size(); ++s) {
    const auto& beam = config.beams[s];
    BeamReportRow row;
    row.beam = static_cast<int>(s + 1);
    row.theta_t_deg = beam.target.theta;
    row.metrics = all_metrics[s];
    row.sll_pass = row.metrics.sll_db <= beam.sll_target_db;
    row.xpr_pass = row.metrics.xpr_db <= beam.xpr_target_db;
    summary.all_pass = summary.all_pass && row.sll_pass && row.xpr_pass;
    summary.rows.push_back(row);

    char name[64];
    std::snprintf(name, sizeof(name), "pattern_cut_beam%02zu.csv", s + 1);
    auto csv = open_out(config.out / name);
    csv << "theta_deg,phi_deg,co_db,cross_db\n";
    const int target_row = *cut.find(beam.target);
    const double co_t =
        std::abs(std::conj(beam.pol_desired(0)) * f_theta(target_row, Eigen::Index(s)) +
                 std::conj(beam.pol_desired(1)) * f_phi(target_row, Eigen::Index(s)));
    for (int a = 0; a < cut.size(); ++a) {
      const AngleDeg ang = cut.angle(a);
      const Complex ft = f_theta(a, Eigen::Index(s)), fp = f_phi(a, Eigen::Index(s));
      const double co = std::abs(std::conj(beam.pol_desired(0)) * ft +
                                 std::conj(beam.pol_desired(1)) * fp);
      const double cross = std::abs(std::conj(beam.pol_undesired(0)) * ft +
                                    std::conj(beam.pol_undesired(1)) * fp);
      csv << fmt(ang.theta) << ',' << fmt(ang.phi) << ','
          << fmt(20.0 * std::log10(std::max(co / co_t, 1e-300))) << ','
          << fmt(20.0 * std::log10(std::max(cross / co_t, 1e-300))) << '\n';
    }
  }

  auto out = open_out(summary.report_path);
  for (const auto& row : summary.rows) {
    out << "[beam " << row.beam << "]\n";
    out << "theta_t_deg = " << fmt(row.theta_t_deg) << "\n";
    out << "directivity_dbi = " << fmt(row.metrics.directivity_dbi) << "\n";
    out << "sll_db = " << fmt(row.metrics.sll_db) << "\n";
    out << "xpr_db = " << fmt(row.metrics.xpr_db) << "\n";
    out << "sll_pass = " << (row.sll_pass ? "true" : "false") << "\n";
    out << "xpr_pass = " << (row.xpr_pass ? "true" : "false") << "\n";
  }
  out << "[summary]\n";
  out << "all_pass = " << (summary.all_pass ? "true" : "false") << "\n";
  return summary;
}

// -- realize ------------------------------------------------------------------

RealizeSummary cmd_realize(const RunConfig& config, const fs::path& checkpoint) {
  config.validate_common();
  Checkpoint ck = load_checkpoint(checkpoint);
  ensure_dir(config.out);

  RealizeSummary summary;
  summary.summary_path = config.out / "realization_summary.txt";
  const auto grid = default_chi_grid(config.realization.chi_step_deg);

  for (int d = 0; d < ck.point.n_classes(); ++d) {
    const Gsm& gsm = ck.point.class_gsms[static_cast<std::size_t>(d)];
    const Matrix gamma_load = config.realization.load_matrix(gsm.n_ports());
    RealizeClassReport report;
    report.class_id = d + 1;
    try {
      const ChiSweepResult sweep = chi_sweep(gsm, gamma_load, grid);
      const RealizationTarget target = make_realization_target(gsm, gamma_load, sweep);
      const ToyElementFit fit = fit_toy_element(target, config.realization.snap);
      report.ok = true;
      report.chi_star_deg = sweep.chi_star_deg;
      report.pole_proximity = sweep.pole_proximity;
      report.flat_sweep = sweep.flat_sweep;
      report.lambdas = fit.lambdas;
      report.rotation_deg = fit.rotation_deg;
      report.gsm_residual = fit.gsm_residual;

      char name[64];
      std::snprintf(name, sizeof(name), "chi_sweep_class%02d.csv", d + 1);
      auto csv = open_out(config.out / name);
      csv << "chi_deg,lambda1,lambda2,t1_abs,t2_abs\n";
      for (const auto& rec : sweep.records) {
        if (!rec.valid) continue;
        csv << fmt(rec.chi_deg);
        for (std::size_t m = 0; m < rec.lambdas.size(); ++m) csv << ',' << fmt(rec.lambdas[m]);
        for (std::size_t m = 0; m < rec.transmit_abs.size(); ++m) {
          csv << ',' << fmt(rec.transmit_abs[m]);
        }
        csv << '\n';
      }

      std::snprintf(name, sizeof(name), "realization_class%02d.txt", d + 1);
      auto rep = open_out(config.out / name);
      rep << "class = " << report.class_id << "\n";
      for (Eigen::Index m = 0; m < fit.lambdas.size(); ++m) {
        rep << "lambda" << (m + 1) << " = " << fmt(fit.lambdas(m)) << "\n";
        rep << "lambda" << (m + 1) << "_raw = " << fmt(fit.lambdas_raw(m)) << "\n";
      }
      rep << "rotation_deg = " << fmt(fit.rotation_deg) << "\n";
      rep << "rotation_raw_deg = " << fmt(fit.rotation_raw_deg) << "\n";
      rep << "chi_star_deg = " << fmt(sweep.chi_star_deg) << "\n";
      rep << "chi_max_deg = " << fmt(sweep.chi_max_deg) << "\n";
      rep << "chi_argmin_deg = " << fmt(sweep.chi_min_deg) << "\n";
      rep << "pole_proximity = " << (sweep.pole_proximity ? "true" : "false") << "\n";
      rep << "flat_sweep = " << (sweep.flat_sweep ? "true" : "false") << "\n";
      rep << "gsm_residual = " << fmt(fit.gsm_residual) << "\n";
    } catch (const numeric_error& e) {
      report.ok = false;
      report.error = e.what();
    }
    summary.classes.push_back(std::move(report));
  }

  auto out = open_out(summary.summary_path);
  out << "classes = " << summary.classes.size() << "\n";
  for (const auto& r : summary.classes) {
    out << "[class " << r.class_id << "]\n";
    if (!r.ok) {
      out << "status = failed\n";
      out << "error = " << r.error << "\n";
      continue;
    }
    out << "status = ok\n";
    for (Eigen::Index m = 0; m < r.lambdas.size(); ++m) {
      out << "lambda" << (m + 1) << " = " << fmt(r.lambdas(m)) << "\n";
    }
    out << "rotation_deg = " << fmt(r.rotation_deg) << "\n";
    out << "chi_star_deg = " << fmt(r.chi_star_deg) << "\n";
    out << "pole_proximity = " << (r.pole_proximity ? "true" : "false") << "\n";
    out << "flat_sweep = " << (r.flat_sweep ? "true" : "false") << "\n";
    out << "gsm_residual = " << fmt(r.gsm_residual) << "\n";
  }
  return summary;
}

}  // namespace arraysynth
