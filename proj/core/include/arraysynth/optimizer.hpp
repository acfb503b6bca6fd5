#ifndef ARRAYSYNTH_OPTIMIZER_HPP
#define ARRAYSYNTH_OPTIMIZER_HPP

#include <string>
#include <vector>

#include "arraysynth/beams.hpp"
#include "arraysynth/cost.hpp"
#include "arraysynth/coupling.hpp"
#include "arraysynth/farfield.hpp"
#include "arraysynth/manifold.hpp"

namespace arraysynth {

enum class DofStrategy { PointSymmetry, EqualElements, EdgeCornerInternal, Alternating };

DofStrategy dof_strategy_from_name(const std::string& name);
std::string to_string(DofStrategy strategy);

// Degree-of-freedom assignment on an R x C grid with column-major element
// ordering (k = c * rows + r).
DofAssignment dof_strategy(DofStrategy strategy, int rows, int cols);
DofAssignment dof_strategy(const std::string& name, int rows, int cols);

/// Frozen problem data for one synthesis run: coupling matrix, modal far
/// fields, degree-of-freedom assignment and the beam table. Evaluations are
/// pure; the referenced coupling and field data must outlive the problem.
class SynthesisProblem {
public:
  SynthesisProblem(const CouplingMatrix& coupling, DofAssignment assignment,
                   const ModalFarFieldSet& fields, std::vector<BeamSpec> beams);

  const CouplingMatrix& coupling() const { return *coupling_; }
  const ModalFarFieldSet& fields() const { return *fields_; }
  const DofAssignment& assignment() const { return assignment_; }
  const std::vector<BeamSpec>& beams() const { return beams_; }

  int n_states() const { return static_cast<int>(beams_.size()); }
  int n_modes() const { return coupling_->n_modes(); }
  int n_classes() const { return assignment_.n_classes; }

  // Complex design values of one instance: (N+P)^2 D + C R + C S.
  long complex_design_value_count(int n_ports = 1) const;

  void check_point(const DesignPoint& x) const;

  // Outgoing modal coefficients of all states for a design point.
  Matrix solve_modal(const DesignPoint& x) const;

  double evaluate_cost(const DesignPoint& x, double alpha) const;

  // Gradient with respect to all real parameters, represented as the complex
  // ambient matrices g with d cost = Re<g, dx>. Throws gradient_undefined_error
  // at the degenerate-beam sentinel.
  TangentVector euclidean_gradient(const DesignPoint& x, double alpha) const;

  // Bare penalty (unit weight, no gain term) and its ambient gradient; zero
  // exactly when every sidelobe and cross-polarization target is met.
  double evaluate_penalty(const DesignPoint& x) const;
  TangentVector penalty_gradient(const DesignPoint& x) const;

  // Per-beam metrics of a design point (for reporting).
  std::vector<BeamMetrics> evaluate_metrics(const DesignPoint& x) const;

  // Largest penalty argument gamma ratio over all beams and sample angles;
  // <= 1 means every sidelobe and cross-polarization target is met.
  double worst_penalty_ratio(const DesignPoint& x) const;

private:
  struct BeamRows {
    int target = 0;
    std::vector<int> sidelobe;
    std::vector<int> crosspol;
  };

  double evaluate_impl(const DesignPoint& x, double alpha, double gain_weight) const;
  TangentVector gradient_impl(const DesignPoint& x, double alpha,
                              double gain_weight) const;

  const CouplingMatrix* coupling_;
  const ModalFarFieldSet* fields_;
  DofAssignment assignment_;
  std::vector<BeamSpec> beams_;
  std::vector<BeamRows> rows_;
};

struct StageSchedule {
  std::vector<double> alphas = {0.0, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5};
  double tolerance = 1e-4;
  int max_iterations = 500;
  // A finite final alpha leaves the iterate a hair outside the feasible set
  // (violations of order sqrt(tolerance / alpha)); the polish descends on the
  // bare penalty until it is exactly zero.
  bool feasibility_polish = true;
  int max_polish_iterations = 200;

  void validate() const;
};

struct TraceRecord {
  int stage = 0;
  int iteration = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double elapsed_s = 0.0;
};

struct DescentResult {
  DesignPoint point;
  std::vector<TraceRecord> trace;
  double final_cost = 0.0;
  bool stalled = false;
};

struct OptimizationResult {
  DesignPoint point;
  std::vector<TraceRecord> trace;
  std::vector<std::size_t> stage_offsets;  // first trace index of each stage
  std::vector<double> stage_final_costs;
  bool any_stalled = false;
  int polish_iterations = 0;
  double final_penalty = 0.0;  // bare penalty after the polish
};

// Riemannian steepest descent with backtracking line search at fixed alpha.
// Accepted iterates never increase the cost; terminates when the decrease
// stays below the tolerance for two successive iterations.
DescentResult descend_stage(const SynthesisProblem& problem, const DesignPoint& x0,
                            double alpha, double tolerance, int max_iterations,
                            int stage_index = 0, double elapsed_offset_s = 0.0);

// Runs one descent per schedule entry, warm-starting each stage with the
// previous result.
OptimizationResult staged_optimize(const SynthesisProblem& problem, const DesignPoint& x0,
                                   const StageSchedule& schedule);

}  // namespace arraysynth

#endif
