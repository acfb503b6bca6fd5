// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arraysynth/chebyshev.hpp"
#include "arraysynth/cost.hpp"
#include "arraysynth/dataset.hpp"
#include "arraysynth/errors.hpp"
#include "arraysynth/manifold.hpp"
#include "arraysynth/optimizer.hpp"
#include "arraysynth/realization.hpp"
#include "arraysynth/run.hpp"
#include "arraysynth/toy_em.hpp"

using namespace arraysynth;
namespace fs = std::filesystem;

namespace {

struct Checker {
  bool ok = true;
  std::string reason;

  void expect(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      reason = message;
    }
  }
  void expect_le(double value, double bound, const std::string& what) {
    if (!(value <= bound) && ok) {
      ok = false;
      std::ostringstream ss;
      ss << what << " = " << value << " exceeds " << bound;
      reason = ss.str();
    }
  }
};

Matrix random_complex(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

std::vector<Gsm> random_gsms(int count, int n_modes, int n_ports, std::uint64_t seed) {
  std::vector<Gsm> out;
  for (int k = 0; k < count; ++k) {
    out.emplace_back(us_random(n_modes + n_ports, seed + std::uint64_t(k)), n_modes,
                     n_ports);
  }
  return out;
}

CouplingMatrix random_coupling(int n_elements, int n_modes, double scale,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int dim = n_elements * n_modes;
  Matrix g = Matrix::Zero(dim, dim);
  for (int k = 0; k < n_elements; ++k) {
    for (int l = k + 1; l < n_elements; ++l) {
      Matrix block(n_modes, n_modes);
      for (int i = 0; i < n_modes; ++i)
        for (int j = 0; j < n_modes; ++j)
          block(i, j) = scale * Complex(gauss(rng), gauss(rng));
      g.block(k * n_modes, l * n_modes, n_modes, n_modes) = block;
      g.block(l * n_modes, k * n_modes, n_modes, n_modes) = block.transpose();
    }
  }
  return CouplingMatrix(std::move(g), n_elements, n_modes);
}

// --- criterion 1: manifold invariants and retraction order -----------------

bool criterion_manifold(Checker& check) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> step_dist(0.0, 0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    const Matrix base = us_random(n, 10000 + std::uint64_t(trial));
    const Matrix dir =
        us_project_tangent(base, random_complex(n, n, 20000 + std::uint64_t(trial)));
    const Matrix r = us_retract(base, dir, step_dist(rng));
    check.expect_le(unitarity_defect(r), 1e-9, "unitarity defect");
    check.expect_le(symmetry_defect(r), 1e-9, "symmetry defect");
    if (!check.ok) return false;
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int n = 2 + int(seed) % 3;
    const Matrix base = us_random(n, 31000 + seed);
    Matrix dir = us_project_tangent(base, random_complex(n, n, 32000 + seed));
    dir /= dir.norm();
    double previous = 0.0;
    for (const double t : {1e-2, 1e-3, 1e-4}) {
      const double err = (us_retract(base, dir, t) - (base + t * dir)).norm();
      if (previous > 0.0) {
        const double ratio = previous / err;
        check.expect(ratio >= 50.0 && ratio <= 200.0,
                     "retraction order ratio " + std::to_string(ratio) +
                         " outside [50, 200]");
      }
      previous = err;
    }
  }
  return check.ok;
}

// --- criterion 2: gradient vs central finite differences -------------------

bool criterion_gradient(Checker& check) {
  ArrayModel model;
  model.rows = 2;
  model.cols = 2;
  const CouplingMatrix coupling = coupling_matrix(model);
  const ModalFarFieldSet fields = build_far_field_set(model);
  const DofAssignment assignment = dof_strategy(DofStrategy::PointSymmetry, 2, 2);
  const auto beams = make_beam_table({-20.0, 25.0}, -15.0, -30.0, 30.0);
  const SynthesisProblem problem(coupling, assignment, fields, beams);
  const DesignPoint x =
      random_design_point(assignment.n_classes, 2, 1, 2, 2, problem.n_states(), 23);

  const double alpha = 1.0;
  const double h = 1e-6;
  std::vector<double> analytic_flat, numeric_flat;
  const TangentVector analytic = problem.euclidean_gradient(x, alpha);

  auto record = [&](double a, double n) {
    analytic_flat.push_back(a);
    numeric_flat.push_back(n);
  };
  auto fd_pair = [&](const std::function<DesignPoint(double)>& rebuild) {
    return (problem.evaluate_cost(rebuild(h), alpha) -
            problem.evaluate_cost(rebuild(-h), alpha)) /
           (2.0 * h);
  };

  for (std::size_t d = 0; d < x.class_gsms.size(); ++d) {
    const Matrix base = x.class_gsms[d].entries();
    for (Eigen::Index i = 0; i < base.rows(); ++i) {
      for (Eigen::Index j = 0; j < base.cols(); ++j) {
        for (int part = 0; part < 2; ++part) {
          const double fd = fd_pair([&](double delta) {
            DesignPoint y = x;
            Matrix m = base;
            m(i, j) += (part == 0) ? Complex(delta, 0.0) : Complex(0.0, delta);
            y.class_gsms[d] = Gsm(m, 2, 1);
            return y;
          });
          const Complex g = analytic.gsm_parts[d](i, j);
          record(part == 0 ? g.real() : g.imag(), fd);
        }
      }
    }
  }
  auto fd_excitation = [&](bool is_static) {
    const Matrix base =
        is_static ? x.excitation.static_part() : x.excitation.dynamic_part();
    for (Eigen::Index i = 0; i < base.rows(); ++i) {
      for (Eigen::Index j = 0; j < base.cols(); ++j) {
        for (int part = 0; part < 2; ++part) {
          const double fd = fd_pair([&](double delta) {
            Matrix st = x.excitation.static_part();
            Matrix dy = x.excitation.dynamic_part();
            Matrix& m = is_static ? st : dy;
            m(i, j) += (part == 0) ? Complex(delta, 0.0) : Complex(0.0, delta);
            return DesignPoint{
                x.class_gsms,
                ExcitationSet(st, dy, ExcitationSet::ColumnNorms::ambient)};
          });
          const Complex g =
              is_static ? analytic.static_part(i, j) : analytic.dynamic_part(i, j);
          record(part == 0 ? g.real() : g.imag(), fd);
        }
      }
    }
  };
  fd_excitation(true);
  fd_excitation(false);

  double scale = 0.0, worst = 0.0;
  for (double v : numeric_flat) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < numeric_flat.size(); ++i) {
    worst = std::max(worst, std::abs(analytic_flat[i] - numeric_flat[i]));
  }
  check.expect_le(worst / scale, 1e-5, "max relative gradient error");
  return check.ok;
}

// --- criterion 3: coupled-solver oracle -------------------------------------

bool criterion_solver(Checker& check) {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto gsms = random_gsms(3, 2, 1, 100 + trial);
    const CouplingMatrix g = random_coupling(3, 2, 0.05, 200 + trial);
    const int dim = 6;
    Matrix sbar = Matrix::Zero(dim, dim);
    Matrix tbar = Matrix::Zero(dim, 3);
    for (int e = 0; e < 3; ++e) {
      sbar.block(e * 2, e * 2, 2, 2) = gsms[std::size_t(e)].scattering();
      tbar.block(e * 2, e, 2, 1) = gsms[std::size_t(e)].transmission();
    }
    const Matrix op = (sbar - Matrix::Identity(dim, dim)) * g.full();
    check.expect(op.eigenvalues().cwiseAbs().maxCoeff() < 0.9,
                 "random instance outside the contraction regime");

    const Matrix v = random_complex(3, 2, 300 + trial);
    const Matrix f = solve_coupled(gsms, g, v).outgoing_modal;
    Matrix term = tbar * v;
    Matrix series = term;
    for (int m = 1; m < 200; ++m) {
      term = op * term;
      series += term;
    }
    check.expect_le((f - series).norm() / series.norm(), 1e-8, "Neumann residual");
  }

  const auto gsms = random_gsms(4, 2, 1, 900);
  const CouplingMatrix zero = CouplingMatrix::zero(4, 2);
  const Matrix v = random_complex(4, 3, 901);
  const CoupledSolution sol = solve_coupled(gsms, zero, v);
  const double in = v.squaredNorm();
  const double out = sol.outgoing_modal.squaredNorm() + sol.outgoing_port.squaredNorm();
  check.expect_le(std::abs(out - in) / in, 1e-12, "uncoupled power balance");
  return check.ok;
}

// --- criterion 4: phase-shift invariance ------------------------------------

bool criterion_phase_shift(Checker& check) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> chi(0.0, 2.0 * std::numbers::pi);
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    auto gsms = random_gsms(4, 2, 1, 400 + trial);
    const CouplingMatrix g = random_coupling(4, 2, 0.1, 500 + trial);
    Matrix v = random_complex(4, 2, 600 + trial);
    const Matrix f_ref = solve_coupled(gsms, g, v).outgoing_modal;
    for (int e = 0; e < 4; ++e) {
      const auto [shifted, vrow] =
          apply_phase_shift(gsms[std::size_t(e)], v.row(e), chi(rng));
      gsms[std::size_t(e)] = shifted;
      v.row(e) = vrow;
    }
    const Matrix f = solve_coupled(gsms, g, v).outgoing_modal;
    check.expect_le((f - f_ref).norm() / f_ref.norm(), 1e-12, "phase-shift residual");
  }
  return check.ok;
}

// --- criterion 5: DOF accounting ---------------------------------------------

bool criterion_dof_accounting(Checker& check) {
  const RunConfig preset = preset_config("paper-8x8");
  ArrayModel model = preset.grid;
  const CouplingMatrix coupling = coupling_matrix(model);
  const ModalFarFieldSet fields = build_far_field_set(model);
  const DofAssignment assignment =
      dof_strategy(preset.strategy, model.rows, model.cols);
  const SynthesisProblem problem(coupling, assignment, fields, preset.beams);
  check.expect(problem.complex_design_value_count(1) == 456,
               "preset reports " +
                   std::to_string(problem.complex_design_value_count(1)) +
                   " complex values instead of 456");
  return check.ok;
}

// --- criterion 6: staged-penalty behavior -----------------------------------

bool criterion_staged(Checker& check) {
  // Five beams scanning to +-30 degrees; the 35-degree main-lobe windows keep
  // the sidelobe sets feasible for a four-column aperture.
  ArrayModel model;
  model.rows = 4;
  model.cols = 4;
  const CouplingMatrix coupling = coupling_matrix(model);
  const ModalFarFieldSet fields = build_far_field_set(model);
  const DofAssignment assignment = dof_strategy(DofStrategy::PointSymmetry, 4, 4);
  const auto beams = make_beam_table({-30.0, -15.0, 0.0, 15.0, 30.0}, -15.0, -30.0, 35.0);
  const SynthesisProblem problem(coupling, assignment, fields, beams);
  const DesignPoint x0 = random_design_point(assignment.n_classes, 2, 1, 4, 4,
                                             problem.n_states(), 1);
  StageSchedule schedule;  // default: alphas 0 .. 1e5, tol 1e-4
  const OptimizationResult result = staged_optimize(problem, x0, schedule);

  check.expect(result.stage_offsets.size() == 8, "expected eight stages");
  for (std::size_t l = 0; l < result.stage_offsets.size(); ++l) {
    const std::size_t begin = result.stage_offsets[l];
    const std::size_t end = (l + 1 < result.stage_offsets.size())
                                ? result.stage_offsets[l + 1]
                                : result.trace.size();
    for (std::size_t i = begin + 1; i < end; ++i) {
      check.expect(result.trace[i].cost <= result.trace[i - 1].cost + 1e-15,
                   "cost increased inside stage " + std::to_string(l));
    }
  }
  check.expect(result.final_penalty == 0.0, "final bare penalty is not zero");
  const double worst = problem.worst_penalty_ratio(result.point);
  check.expect(worst <= 1.0,
               "final design violates a target: worst penalty ratio " +
                   std::to_string(worst));
  return check.ok;
}

// --- criterion 7: chebyshev baseline ----------------------------------------

bool criterion_chebyshev(Checker& check) {
  const ArrayFactor af = chebyshev_baseline(8, -15.0, 0.5, 0.0);
  const double sll = max_sidelobe_db(af);
  check.expect(std::abs(sll - (-15.0)) <= 0.1,
               "baseline sidelobe " + std::to_string(sll) + " not within 0.1 of -15");
  return check.ok;
}

// --- criterion 8: realization round trip ------------------------------------

bool criterion_realization(Checker& check) {
  const Matrix open = Matrix::Identity(1, 1);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Gsm gsm(us_random(3, 4000 + seed), 2, 1);
    const Matrix s0 = terminate(gsm, open);
    check.expect_le(unitarity_defect(s0), 1e-10, "terminated unitarity defect");
    check.expect_le(symmetry_defect(s0), 1e-10, "terminated symmetry defect");
    const TerminatedEig eig = eig_terminated(s0);
    check.expect_le(eig.lambdas.imag().cwiseAbs().maxCoeff(), 1e-8,
                    "eigenvalue imaginary part");
    const Matrix t_eig = eig.modal_transform.transpose() * gsm.transmission();
    const Gsm rebuilt =
        backtransform_gsm(eig.lambdas.real(), eig.modal_transform, t_eig,
                          t_eig.transpose(), Matrix(gsm.port_scattering()), open);
    check.expect_le((terminate(rebuilt, open) - s0).norm(), 1e-10,
                    "round-trip residual");
    if (!check.ok) return false;
  }
  return check.ok;
}

// --- criterion 9: chi-sweep selection rule ----------------------------------

bool criterion_chi_sweep(Checker& check) {
  const Matrix open = Matrix::Identity(1, 1);
  const auto grid = default_chi_grid();

  // The 90-degree offset is exact on the grid for every random draw.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Gsm gsm(us_random(3, 5000 + seed), 2, 1);
    const ChiSweepResult sweep = chi_sweep(gsm, open, grid);
    const double diff =
        std::fmod(sweep.chi_star_deg - sweep.chi_max_deg + 360.0, 180.0);
    check.expect(std::abs(diff - 90.0) <= 1e-12,
                 "chi* offset " + std::to_string(diff) + " is not 90 deg");
  }

  // Constructed near-pole case. A single-port element has exactly one pole
  // per sweep (the port term is a rank-one update, so the determinant
  // condition crosses zero once), which lands ninety degrees from chi* by
  // construction of the rule. A two-port element has a rank-two port term
  // with up to two pole crossings; this seeded instance places the second
  // pole on top of chi*.
  const Gsm two_port(us_random(4, 8001), 2, 2);
  const ChiSweepResult near_pole =
      chi_sweep(two_port, Matrix::Identity(2, 2), grid);
  check.expect(near_pole.pole_chis_deg.size() >= 2,
               "constructed case lost its second pole");
  check.expect(near_pole.pole_proximity,
               "pole flag did not fire on the constructed near-pole case");

  // Flat sweep (T = 0): well-defined chi*, degenerate flag, no pole flag.
  Matrix psi = Matrix::Zero(3, 3);
  psi.block(0, 0, 2, 2) = us_random(2, 61);
  psi(2, 2) = std::polar(1.0, 0.4);
  const ChiSweepResult flat = chi_sweep(Gsm(psi, 2, 1), open, grid);
  check.expect(flat.flat_sweep, "flat sweep not flagged");
  check.expect(!flat.pole_proximity, "pole flag fired on the flat sweep");
  return check.ok;
}

// --- criterion 10: toy-EM consistency ----------------------------------------

bool criterion_toy_em(Checker& check) {
  ArrayModel model;
  model.rows = 3;
  model.cols = 3;
  const CouplingMatrix direct = coupling_matrix(model, CouplingAssembly::direct);
  const CouplingMatrix fast = coupling_matrix(model, CouplingAssembly::toeplitz);
  check.expect_le((direct.full() - fast.full()).cwiseAbs().maxCoeff(), 1e-15,
                  "toeplitz vs direct");

  const ModalFarFieldSet fields = build_far_field_set(model);
  const auto& grid = fields.sphere_grid();
  for (const auto& [k, l] : {std::pair{1, 0}, std::pair{4, 1}, std::pair{8, 0}}) {
    for (int n = 0; n < 2; ++n) {
      for (int m = 0; m < 2; ++m) {
        Complex overlap = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
          const AngleDeg ang = grid.angle(i);
          const Complex pa = fields.position_phase(k, ang);
          const Complex pb = fields.position_phase(l, ang);
          overlap += (fields.sphere_theta_base()(i, n) * pa *
                          std::conj(fields.sphere_theta_base()(i, m) * pb) +
                      fields.sphere_phi_base()(i, n) * pa *
                          std::conj(fields.sphere_phi_base()(i, m) * pb)) *
                     quadrature_weight(grid, i);
        }
        check.expect(std::abs(2.0 * direct.block(k, l)(n, m).real() - overlap.real()) <=
                         1e-3,
                     "coupling/overlap identity");
      }
    }
  }

  // Dipole directivity from the quadrature.
  ArrayModel single;
  const ModalFarFieldSet dipole_fields = build_far_field_set(single);
  Matrix f = Matrix::Zero(2, 1);
  f(0, 0) = 1.0;
  const double p_rad = dipole_fields.radiated_power(f)(0);
  const double peak = 3.0 / (8.0 * std::numbers::pi);
  const double directivity =
      10.0 * std::log10(4.0 * std::numbers::pi * peak / p_rad);
  check.expect(std::abs(directivity - 1.76) <= 0.05,
               "dipole directivity " + std::to_string(directivity));
  return check.ok;
}

// --- criterion 11: dataset round trip -----------------------------------------

bool criterion_dataset(Checker& check) {
  const fs::path base = fs::temp_directory_path() / "arraysynth_acceptance_ds";
  fs::remove_all(base);
  fs::create_directories(base);
  ArrayModel model;
  model.rows = 2;
  model.cols = 2;
  const CouplingMatrix coupling = coupling_matrix(model);
  const ModalFarFieldSet fields = build_far_field_set(model);
  const fs::path target = base / "dataset";
  export_dataset(model, coupling, fields, target);
  const Dataset back = import_dataset(target);
  check.expect((back.coupling.full() - coupling.full()).cwiseAbs().maxCoeff() == 0.0,
               "coupling not bit-identical");
  check.expect(
      (back.fields.sphere_theta_base() - fields.sphere_theta_base()).cwiseAbs().maxCoeff() ==
          0.0,
      "far fields not bit-identical");

  bool caught_shape = false;
  fs::resize_file(target / "coupling.bin", 8 * 7 * 16);
  try {
    import_dataset(target);
  } catch (const io_error&) {
    caught_shape = true;
  }
  check.expect(caught_shape, "shape mismatch not detected");

  export_dataset(model, coupling, fields, target);
  Matrix g = coupling.full();
  g(0, 2) += Complex(1e-3, 0.0);
  export_dataset(model, CouplingMatrix(g, 4, 2, false), fields, target);
  bool caught_recip = false;
  try {
    import_dataset(target);
  } catch (const validation_error&) {
    caught_recip = true;
  }
  check.expect(caught_recip, "reciprocity violation not detected");
  ImportReport report;
  import_dataset(target, true, &report);
  check.expect(!report.warnings.empty(), "override import lost the warning");
  fs::remove_all(base);
  return check.ok;
}

// --- criterion 12: determinism ------------------------------------------------

bool criterion_determinism(Checker& check) {
  ArrayModel model;
  model.rows = 2;
  model.cols = 2;
  const CouplingMatrix coupling = coupling_matrix(model);
  const ModalFarFieldSet fields = build_far_field_set(model);
  const DofAssignment assignment = dof_strategy(DofStrategy::Alternating, 2, 2);
  const auto beams = make_beam_table({0.0, 20.0}, -15.0, -30.0, 35.0);
  const SynthesisProblem problem(coupling, assignment, fields, beams);
  StageSchedule schedule;
  schedule.alphas = {0.0, 0.1, 1.0};
  schedule.max_iterations = 60;

  auto run = [&] {
    const DesignPoint x0 = random_design_point(assignment.n_classes, 2, 1, 2, 2,
                                               problem.n_states(), 77);
    return staged_optimize(problem, x0, schedule);
  };
  const OptimizationResult a = run();
  const OptimizationResult b = run();
  check.expect(a.trace.size() == b.trace.size(), "trace lengths differ");
  if (a.trace.size() == b.trace.size()) {
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      if (a.trace[i].cost != b.trace[i].cost ||
          a.trace[i].grad_norm != b.trace[i].grad_norm ||
          a.trace[i].step != b.trace[i].step) {
        check.expect(false, "trace differs at iteration " + std::to_string(i));
        break;
      }
    }
  }
  return check.ok;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(Checker&)> run;
  double time_limit_s;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "manifold invariants and retraction order", criterion_manifold, 10.0},
      {2, "euclidean gradient vs finite differences", criterion_gradient, 30.0},
      {3, "coupled solve vs Neumann series and power balance", criterion_solver, 0.0},
      {4, "reference-plane phase-shift invariance", criterion_phase_shift, 0.0},
      {5, "flagship preset DOF accounting (456)", criterion_dof_accounting, 0.0},
      {6, "staged penalty reaches zero penalties", criterion_staged, 120.0},
      {7, "chebyshev baseline sidelobe level", criterion_chebyshev, 0.0},
      {8, "realization round trip", criterion_realization, 0.0},
      {9, "chi-sweep selection and pole flagging", criterion_chi_sweep, 0.0},
      {10, "toy-EM structural consistency", criterion_toy_em, 0.0},
      {11, "dataset export/import and validation", criterion_dataset, 0.0},
      {12, "seeded optimization determinism", criterion_determinism, 0.0},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Checker check;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string reason;
    try {
      ok = criterion.run(check);
      reason = check.reason;
    } catch (const std::exception& e) {
      ok = false;
      reason = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && criterion.time_limit_s > 0.0 && seconds > criterion.time_limit_s) {
      ok = false;
      reason = "runtime " + std::to_string(seconds) + " s exceeds " +
               std::to_string(criterion.time_limit_s) + " s";
    }
    std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.name.c_str(), seconds,
                ok ? "" : " -- ", ok ? "" : reason.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
