#include "arraysynth/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "arraysynth/errors.hpp"

namespace arraysynth {

DofStrategy dof_strategy_from_name(const std::string& name) {
  if (name == "PointSymmetry") return DofStrategy::PointSymmetry;
  if (name == "EqualElements") return DofStrategy::EqualElements;
  if (name == "EdgeCornerInternal") return DofStrategy::EdgeCornerInternal;
  if (name == "Alternating") return DofStrategy::Alternating;
  throw config_error("unknown DOF strategy '" + name +
                     "' (expected PointSymmetry, EqualElements, EdgeCornerInternal or "
                     "Alternating)");
}

std::string to_string(DofStrategy strategy) {
  switch (strategy) {
    case DofStrategy::PointSymmetry: return "PointSymmetry";
    case DofStrategy::EqualElements: return "EqualElements";
    case DofStrategy::EdgeCornerInternal: return "EdgeCornerInternal";
    case DofStrategy::Alternating: return "Alternating";
  }
  throw config_error("invalid DOF strategy value");
}

DofAssignment dof_strategy(DofStrategy strategy, int rows, int cols) {
  if (rows < 1 || cols < 1) throw config_error("dof_strategy: grid must be >= 1x1");
  const int k = rows * cols;
  DofAssignment a;
  a.rows = rows;
  a.cols = cols;
  a.strategy = to_string(strategy);
  a.class_of.resize(static_cast<std::size_t>(k));
  switch (strategy) {
    case DofStrategy::EqualElements:
      a.n_classes = 1;
      std::fill(a.class_of.begin(), a.class_of.end(), 1);
      break;
    case DofStrategy::PointSymmetry:
      // Element k pairs with its point reflection K-1-k about the array center.
      a.n_classes = (k + 1) / 2;
      for (int i = 0; i < k; ++i) {
        a.class_of[static_cast<std::size_t>(i)] = std::min(i, k - 1 - i) + 1;
      }
      break;
    case DofStrategy::EdgeCornerInternal: {
      // internal -> 1, corner -> 2, edge -> 3; compressed when a group is empty.
      std::vector<int> raw(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        const int c = i / rows, r = i % rows;
        const bool r_edge = (r == 0 || r == rows - 1);
        const bool c_edge = (c == 0 || c == cols - 1);
        raw[static_cast<std::size_t>(i)] = (r_edge && c_edge) ? 2 : (r_edge || c_edge) ? 3 : 1;
      }
      std::vector<int> remap(4, 0);
      int next = 0;
      for (int cls : {1, 2, 3}) {
        if (std::find(raw.begin(), raw.end(), cls) != raw.end()) {
          remap[static_cast<std::size_t>(cls)] = ++next;
        }
      }
      a.n_classes = next;
      for (int i = 0; i < k; ++i) {
        a.class_of[static_cast<std::size_t>(i)] =
            remap[static_cast<std::size_t>(raw[static_cast<std::size_t>(i)])];
      }
      break;
    }
    case DofStrategy::Alternating:
      a.n_classes = (k > 1) ? 2 : 1;
      for (int i = 0; i < k; ++i) {
        const int c = i / rows, r = i % rows;
        a.class_of[static_cast<std::size_t>(i)] = 1 + ((r + c) % 2) % a.n_classes;
      }
      break;
  }
  a.validate();
  return a;
}

DofAssignment dof_strategy(const std::string& name, int rows, int cols) {
  return dof_strategy(dof_strategy_from_name(name), rows, cols);
}

// -- problem ----------------------------------------------------------------

SynthesisProblem::SynthesisProblem(const CouplingMatrix& coupling,
                                   DofAssignment assignment,
                                   const ModalFarFieldSet& fields,
                                   std::vector<BeamSpec> beams)
    : coupling_(&coupling),
      fields_(&fields),
      assignment_(std::move(assignment)),
      beams_(std::move(beams)) {
  assignment_.validate();
  if (assignment_.n_elements() != coupling_->n_elements() ||
      assignment_.n_elements() != fields_->n_elements()) {
    throw dimension_error("SynthesisProblem: element counts disagree");
  }
  if (coupling_->n_modes() != fields_->n_modes()) {
    throw dimension_error("SynthesisProblem: mode counts disagree");
  }
  if (beams_.empty()) throw validation_error("SynthesisProblem: no beams");
  rows_.reserve(beams_.size());
  for (const auto& b : beams_) {
    b.validate();
    BeamRows br;
    auto lookup = [this](const AngleDeg& a) {
      const auto idx = fields_->cut_grid().find(a);
      if (!idx) throw missing_sample_error("SynthesisProblem: beam angle off the grid");
      return *idx;
    };
    br.target = lookup(b.target);
    br.sidelobe.reserve(b.sidelobe_angles.size());
    for (const auto& a : b.sidelobe_angles) br.sidelobe.push_back(lookup(a));
    br.crosspol.reserve(b.crosspol_angles.size());
    for (const auto& a : b.crosspol_angles) br.crosspol.push_back(lookup(a));
    rows_.push_back(std::move(br));
  }
}

long SynthesisProblem::complex_design_value_count(int n_ports) const {
  const long np = coupling_->n_modes() + n_ports;
  return np * np * assignment_.n_classes +
         long(assignment_.cols) * assignment_.rows +
         long(assignment_.cols) * n_states();
}

void SynthesisProblem::check_point(const DesignPoint& x) const {
  if (x.n_classes() != assignment_.n_classes) {
    throw dimension_error("design point has wrong class count");
  }
  for (const auto& g : x.class_gsms) {
    if (g.n_modes() != coupling_->n_modes()) {
      throw dimension_error("design point GSM mode count mismatch");
    }
    if (g.n_ports() != 1) {
      throw dimension_error("factored excitations require single-port elements");
    }
  }
  if (x.excitation.n_rows() != assignment_.rows ||
      x.excitation.n_cols() != assignment_.cols ||
      x.excitation.n_states() != n_states()) {
    throw dimension_error("design point excitation shape mismatch");
  }
}

Matrix SynthesisProblem::solve_modal(const DesignPoint& x) const {
  check_point(x);
  const auto element_gsms = assemble_element_gsms(assignment_, x.class_gsms);
  CoupledSystem system(element_gsms, *coupling_);
  return system.solve_outgoing(x.excitation.port_waves());
}

namespace {

// Polarization projection u^H F of one state's far field at one angle row.
Complex co_project(const Matrix& f_theta, const Matrix& f_phi,
                   const Eigen::Vector2cd& u, int row, int state) {
  return std::conj(u(0)) * f_theta(row, state) + std::conj(u(1)) * f_phi(row, state);
}

}  // namespace

double SynthesisProblem::evaluate_cost(const DesignPoint& x, double alpha) const {
  return evaluate_impl(x, alpha, 1.0);
}

double SynthesisProblem::evaluate_penalty(const DesignPoint& x) const {
  return evaluate_impl(x, 1.0, 0.0);
}

double SynthesisProblem::evaluate_impl(const DesignPoint& x, double alpha,
                                       double gain_weight) const {
  check_point(x);
  const auto element_gsms = assemble_element_gsms(assignment_, x.class_gsms);
  const CoupledSystem system(element_gsms, *coupling_);
  const Matrix f = system.solve_outgoing(x.excitation.port_waves());
  Matrix f_theta, f_phi;
  fields_->evaluate_cut(f, f_theta, f_phi);

  double cost = 0.0;
  for (std::size_t s = 0; s < beams_.size(); ++s) {
    const auto& beam = beams_[s];
    const auto& br = rows_[s];
    const int state = static_cast<int>(s);
    const double co_t =
        std::abs(co_project(f_theta, f_phi, beam.pol_desired, br.target, state));
    cost -= gain_weight * co_t * co_t;
    if (alpha == 0.0) continue;
    if (co_t < kMainBeamGuard) {
      cost += kDegenerateBeamCost;
      continue;
    }
    const double sll_lin = db_to_amplitude(beam.sll_target_db);
    const double xpr_lin = db_to_amplitude(beam.xpr_target_db);
    double penalty = 0.0;
    for (int r : br.sidelobe) {
      const double lvl = std::abs(co_project(f_theta, f_phi, beam.pol_desired, r, state));
      const double g = penalty_gamma(lvl / (co_t * sll_lin));
      penalty += g * g;
    }
    for (int r : br.crosspol) {
      const double lvl = std::abs(co_project(f_theta, f_phi, beam.pol_undesired, r, state));
      const double g = penalty_gamma(lvl / (co_t * xpr_lin));
      penalty += g * g;
    }
    cost += alpha * penalty;
  }
  return cost;
}

TangentVector SynthesisProblem::euclidean_gradient(const DesignPoint& x,
                                                   double alpha) const {
  return gradient_impl(x, alpha, 1.0);
}

TangentVector SynthesisProblem::penalty_gradient(const DesignPoint& x) const {
  return gradient_impl(x, 1.0, 0.0);
}

TangentVector SynthesisProblem::gradient_impl(const DesignPoint& x, double alpha,
                                              double gain_weight) const {
  check_point(x);
  const auto element_gsms = assemble_element_gsms(assignment_, x.class_gsms);
  const CoupledSystem system(element_gsms, *coupling_);
  const Matrix v = x.excitation.port_waves();
  const Matrix f = system.solve_outgoing(v);
  Matrix f_theta, f_phi;
  fields_->evaluate_cut(f, f_theta, f_phi);

  const int n_cut = fields_->cut_grid().size();
  const int states = n_states();
  // d cost / d conj(F), scaled by 2 (real-pair gradient convention).
  Matrix g_theta = Matrix::Zero(n_cut, states);
  Matrix g_phi = Matrix::Zero(n_cut, states);

  for (std::size_t s = 0; s < beams_.size(); ++s) {
    const auto& beam = beams_[s];
    const auto& br = rows_[s];
    const int state = static_cast<int>(s);
    const Complex co_t = co_project(f_theta, f_phi, beam.pol_desired, br.target, state);
    const double co_t_abs = std::abs(co_t);
    // -|co_t|^2 term.
    g_theta(br.target, state) += -2.0 * gain_weight * co_t * beam.pol_desired(0);
    g_phi(br.target, state) += -2.0 * gain_weight * co_t * beam.pol_desired(1);
    if (alpha == 0.0) continue;
    if (co_t_abs < kMainBeamGuard) {
      throw gradient_undefined_error(
          "euclidean_gradient: degenerate main beam, cost at sentinel");
    }
    const double sll_lin = db_to_amplitude(beam.sll_target_db);
    const double xpr_lin = db_to_amplitude(beam.xpr_target_db);
    auto accumulate = [&](const std::vector<int>& rows, const Eigen::Vector2cd& u,
                          double lin) {
      for (int r : rows) {
        const Complex co_r = co_project(f_theta, f_phi, u, r, state);
        const double co_r_abs = std::abs(co_r);
        const double ratio = co_r_abs / (co_t_abs * lin);
        if (ratio <= 1.0) continue;
        const double excess = ratio - 1.0;
        const Complex wr = 2.0 * alpha * excess * co_r / (lin * co_t_abs * co_r_abs);
        g_theta(r, state) += wr * u(0);
        g_phi(r, state) += wr * u(1);
        const Complex wt =
            -2.0 * alpha * excess * ratio * co_t / (co_t_abs * co_t_abs);
        g_theta(br.target, state) += wt * beam.pol_desired(0);
        g_phi(br.target, state) += wt * beam.pol_desired(1);
      }
    };
    accumulate(br.sidelobe, beam.pol_desired, sll_lin);
    accumulate(br.crosspol, beam.pol_undesired, xpr_lin);
  }

  // Chain through the far-field map and the coupled solve.
  Matrix g_f = fields_->cut_theta().adjoint() * g_theta +
               fields_->cut_phi().adjoint() * g_phi;
  const Matrix y = system.solve_adjoint(g_f);
  const Matrix m = coupling_->full() * f;

  const int n = coupling_->n_modes();
  TangentVector grad = TangentVector::zeros_like(x);
  for (int k = 0; k < coupling_->n_elements(); ++k) {
    const int d = assignment_.class_of[static_cast<std::size_t>(k)] - 1;
    const auto yk = y.block(k * n, 0, n, states);
    grad.gsm_parts[static_cast<std::size_t>(d)].block(0, 0, n, n) +=
        yk * m.block(k * n, 0, n, states).adjoint();
    grad.gsm_parts[static_cast<std::size_t>(d)].block(0, n, n, 1) +=
        yk * v.row(k).adjoint();
  }

  const Matrix g_v = system.transmit_blockdiag().adjoint() * y;  // K x S
  const int rows = assignment_.rows;
  const int cols = assignment_.cols;
  const auto& st = x.excitation.static_part();
  const auto& dy = x.excitation.dynamic_part();
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      grad.static_part(r, c) = (g_v.row(c * rows + r).array() * dy.row(c).array().conjugate()).sum();
    }
    for (int s = 0; s < states; ++s) {
      grad.dynamic_part(c, s) =
          (g_v.col(s).segment(c * rows, rows).array() * st.col(c).array().conjugate()).sum();
    }
  }
  return grad;
}

std::vector<BeamMetrics> SynthesisProblem::evaluate_metrics(const DesignPoint& x) const {
  const Matrix f = solve_modal(x);
  std::vector<BeamMetrics> out;
  out.reserve(beams_.size());
  for (std::size_t s = 0; s < beams_.size(); ++s) {
    const auto samples = far_field(f, *fields_, beams_[s].sample_angles());
    out.push_back(metrics(samples[s], beams_[s], *fields_, f, static_cast<int>(s)));
  }
  return out;
}

double SynthesisProblem::worst_penalty_ratio(const DesignPoint& x) const {
  const Matrix f = solve_modal(x);
  Matrix f_theta, f_phi;
  fields_->evaluate_cut(f, f_theta, f_phi);
  double worst = 0.0;
  for (std::size_t s = 0; s < beams_.size(); ++s) {
    const auto& beam = beams_[s];
    const auto& br = rows_[s];
    const int state = static_cast<int>(s);
    const double co_t =
        std::abs(co_project(f_theta, f_phi, beam.pol_desired, br.target, state));
    if (co_t < kMainBeamGuard) return std::numeric_limits<double>::infinity();
    const double sll_lin = db_to_amplitude(beam.sll_target_db);
    const double xpr_lin = db_to_amplitude(beam.xpr_target_db);
    for (int r : br.sidelobe) {
      const double lvl = std::abs(co_project(f_theta, f_phi, beam.pol_desired, r, state));
      worst = std::max(worst, lvl / (co_t * sll_lin));
    }
    for (int r : br.crosspol) {
      const double lvl = std::abs(co_project(f_theta, f_phi, beam.pol_undesired, r, state));
      worst = std::max(worst, lvl / (co_t * xpr_lin));
    }
  }
  return worst;
}

// -- descent ----------------------------------------------------------------

void StageSchedule::validate() const {
  if (alphas.empty()) throw config_error("StageSchedule: empty alpha list");
  for (double a : alphas) {
    if (a < 0.0) throw config_error("StageSchedule: alphas must be nonnegative");
  }
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (alphas[i] <= alphas[i - 1]) {
      throw config_error("StageSchedule: alphas must be strictly increasing");
    }
  }
  if (tolerance <= 0.0) throw config_error("StageSchedule: tolerance must be positive");
  if (max_iterations < 1) throw config_error("StageSchedule: need at least one iteration");
}

namespace {
constexpr double kArmijoSlope = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr double kStepMin = 1e-6;
constexpr double kStepMax = 1e2;

double clamp_step(double t) { return std::clamp(t, kStepMin, kStepMax); }
}  // namespace

DescentResult descend_stage(const SynthesisProblem& problem, const DesignPoint& x0,
                            double alpha, double tolerance, int max_iterations,
                            int stage_index, double elapsed_offset_s) {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return elapsed_offset_s +
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  DescentResult result{x0, {}, 0.0, false};
  double cost = problem.evaluate_cost(result.point, alpha);
  double previous_decrease = std::numeric_limits<double>::infinity();
  double step_prev = 0.0;
  bool have_history = false;
  TangentVector dir_prev;   // previous accepted search direction
  TangentVector grad_prev;  // previous Riemannian gradient

  for (int iter = 1; iter <= max_iterations; ++iter) {
    const TangentVector egrad = problem.euclidean_gradient(result.point, alpha);
    const TangentVector rgrad = riemannian_gradient(result.point, egrad);
    const double grad_norm = norm(rgrad);
    if (!(grad_norm > 0.0) || !std::isfinite(grad_norm)) {
      result.stalled = !std::isfinite(grad_norm);
      break;
    }
    const TangentVector direction = scaled(rgrad, -1.0);

    // Barzilai-Borwein style initial step from the previous accepted move.
    double t0;
    if (!have_history) {
      t0 = 1.0 / (1.0 + grad_norm);
    } else {
      const TangentVector s = scaled(dir_prev, step_prev);
      const TangentVector yd = add(rgrad, grad_prev, -1.0);
      const double sy = std::abs(inner(s, yd));
      t0 = (sy > 1e-300) ? inner(s, s) / sy : 2.0 * step_prev;
    }
    t0 = clamp_step(t0);

    double t = t0;
    double candidate_cost = 0.0;
    DesignPoint candidate = result.point;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      candidate = retract(result.point, direction, t);
      candidate_cost = problem.evaluate_cost(candidate, alpha);
      if (candidate_cost <= cost - kArmijoSlope * t * grad_norm * grad_norm) {
        accepted = true;
        break;
      }
      t *= kBacktrackFactor;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }

    const double decrease = cost - candidate_cost;
    result.point = std::move(candidate);
    cost = candidate_cost;
    grad_prev = rgrad;
    dir_prev = direction;
    step_prev = t;
    have_history = true;
    result.trace.push_back({stage_index, iter, cost, grad_norm, t, elapsed()});

    if (decrease < tolerance && previous_decrease < tolerance) break;
    previous_decrease = decrease;
  }
  result.final_cost = cost;
  return result;
}

OptimizationResult staged_optimize(const SynthesisProblem& problem, const DesignPoint& x0,
                                   const StageSchedule& schedule) {
  schedule.validate();
  OptimizationResult result{x0, {}, {}, {}, false};
  double elapsed_offset = 0.0;
  for (std::size_t l = 0; l < schedule.alphas.size(); ++l) {
    result.stage_offsets.push_back(result.trace.size());
    DescentResult stage{result.point, {}, 0.0, false};
    try {
      stage = descend_stage(problem, result.point, schedule.alphas[l],
                            schedule.tolerance, schedule.max_iterations,
                            static_cast<int>(l), elapsed_offset);
    } catch (const numeric_error& e) {
      throw numeric_error("stage " + std::to_string(l) + ": " + e.what());
    }
    result.point = std::move(stage.point);
    result.any_stalled = result.any_stalled || stage.stalled;
    result.stage_final_costs.push_back(stage.final_cost);
    if (!stage.trace.empty()) elapsed_offset = stage.trace.back().elapsed_s;
    result.trace.insert(result.trace.end(), stage.trace.begin(), stage.trace.end());
  }

  // A finite final alpha settles where the gain pull balances the penalty
  // push, leaving tiny target violations. Descend on the bare penalty until
  // it reaches its dead zone (exactly zero) or the iteration cap. A schedule
  // that never activates the penalty is left untouched.
  if (schedule.feasibility_polish && schedule.alphas.back() > 0.0) {
    double penalty = problem.evaluate_penalty(result.point);
    while (penalty > 0.0 && result.polish_iterations < schedule.max_polish_iterations) {
      const TangentVector rgrad =
          riemannian_gradient(result.point, problem.penalty_gradient(result.point));
      const double grad_norm = norm(rgrad);
      if (!(grad_norm > 0.0) || !std::isfinite(grad_norm)) break;
      const TangentVector direction = scaled(rgrad, -1.0);
      double t = clamp_step(2.0 * penalty / (grad_norm * grad_norm));
      bool accepted = false;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        const DesignPoint candidate = retract(result.point, direction, t);
        const double next = problem.evaluate_penalty(candidate);
        if (next <= penalty - kArmijoSlope * t * grad_norm * grad_norm) {
          result.point = candidate;
          penalty = next;
          accepted = true;
          break;
        }
        t *= kBacktrackFactor;
      }
      if (!accepted) break;
      ++result.polish_iterations;
    }
    result.final_penalty = penalty;
  } else {
    result.final_penalty = problem.evaluate_penalty(result.point);
  }
  return result;
}

}  // namespace arraysynth
