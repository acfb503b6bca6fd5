#include "arraysynth/realization.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "arraysynth/coupling.hpp"
#include "arraysynth/errors.hpp"

namespace arraysynth {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
const Complex kJ(0.0, 1.0);

// Condition-checked inverse of the small port-termination matrix.
Matrix termination_inverse(const Matrix& gamma_load, const Matrix& gamma,
                           const char* where) {
  const Matrix diff = gamma_load - gamma;
  Eigen::JacobiSVD<Matrix> svd(diff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0 ||
      sv(0) / sv(sv.size() - 1) >= 1e12) {
    throw resonant_termination_error(std::string(where) +
                                     ": load minus port reflection is singular");
  }
  return svd.solve(Matrix::Identity(diff.rows(), diff.cols()));
}

double circular_distance_deg(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace

Complex scattering_from_lambda(Complex lambda) {
  return -(1.0 - kJ * lambda) / (1.0 + kJ * lambda);
}

Complex lambda_from_scattering(Complex s) { return -kJ * (1.0 + s) / (1.0 - s); }

Matrix terminate(const Gsm& gsm, const Matrix& gamma_load) {
  const int p = gsm.n_ports();
  if (gamma_load.rows() != p || gamma_load.cols() != p) {
    throw dimension_error("terminate: load reflection must be P x P");
  }
  const Matrix inv = termination_inverse(gamma_load, gsm.port_scattering(), "terminate");
  return gsm.scattering() + gsm.transmission() * inv * gsm.receive();
}

TerminatedEig eig_terminated(const Matrix& s0) {
  if (s0.rows() != s0.cols() || s0.rows() < 1) {
    throw dimension_error("eig_terminated: square matrix required");
  }
  const Eigen::Index n = s0.rows();
  Eigen::VectorXcd values(n);
  Matrix vectors(n, n);
  const bool diagonal =
      (s0 - Matrix(s0.diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-15;
  if (diagonal) {
    values = s0.diagonal();
    vectors = Matrix::Identity(n, n);
  } else {
    Eigen::ComplexEigenSolver<Matrix> solver(s0, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
      throw nondiagonalizable_error("eig_terminated: eigensolver failed");
    }
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
    Eigen::JacobiSVD<Matrix> svd(vectors);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e8) {
      throw nondiagonalizable_error("eig_terminated: defective within tolerance");
    }
  }

  // Phase-fix columns: largest-magnitude component becomes real positive.
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = vectors(imax, c);
    if (std::abs(pivot) > 0.0) vectors.col(c) *= std::conj(pivot) / std::abs(pivot);
    vectors.col(c).normalize();
  }

  Eigen::VectorXcd lambdas(n);
  for (Eigen::Index i = 0; i < n; ++i) lambdas(i) = lambda_from_scattering(values(i));
  if (!lambdas.allFinite()) {
    throw numeric_error("eig_terminated: eigenvalue at the pole of the lambda map");
  }

  // Order by descending |lambda|, ties by ascending first-component phase.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(lambdas(a)), mb = std::abs(lambdas(b));
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb))) return ma > mb;
    return std::arg(vectors(0, a)) < std::arg(vectors(0, b));
  });

  TerminatedEig out;
  out.scattering_eigenvalues.resize(n);
  out.lambdas.resize(n);
  out.modal_transform.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.scattering_eigenvalues(i) = values(order[static_cast<std::size_t>(i)]);
    out.lambdas(i) = lambdas(order[static_cast<std::size_t>(i)]);
    out.modal_transform.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<double> default_chi_grid(double step_deg) {
  if (step_deg <= 0.0) throw domain_error("default_chi_grid: step must be positive");
  std::vector<double> grid;
  for (double chi = 0.0; chi < 180.0 - 1e-9; chi += step_deg) grid.push_back(chi);
  return grid;
}

ChiSweepResult chi_sweep(const Gsm& gsm, const Matrix& gamma_load,
                         const std::vector<double>& grid_deg) {
  if (grid_deg.empty()) throw validation_error("chi_sweep: empty grid");
  const int p = gsm.n_ports();
  if (gamma_load.rows() != p || gamma_load.cols() != p) {
    throw dimension_error("chi_sweep: load reflection must be P x P");
  }

  ChiSweepResult result;
  result.records.reserve(grid_deg.size());
  std::vector<double> pole_metric(grid_deg.size(),
                                  std::numeric_limits<double>::infinity());
  int n_valid = 0;
  for (std::size_t i = 0; i < grid_deg.size(); ++i) {
    const double chi = grid_deg[i];
    ChiSweepRecord rec;
    rec.chi_deg = chi;
    const Complex rot = std::polar(1.0, -2.0 * chi * kDegToRad);
    try {
      const Matrix inv =
          termination_inverse(gamma_load * rot, gsm.port_scattering(), "chi_sweep");
      const Matrix s0 = gsm.scattering() + gsm.transmission() * inv * gsm.receive();
      const TerminatedEig eig = eig_terminated(s0);
      const Complex shift = std::polar(1.0, chi * kDegToRad);
      const Matrix t_eig =
          eig.modal_transform.transpose() * gsm.transmission() * shift;
      rec.valid = true;
      rec.lambdas.resize(static_cast<std::size_t>(eig.lambdas.size()));
      rec.transmit_abs.resize(static_cast<std::size_t>(eig.lambdas.size()));
      double lambda_bar = 0.0;
      double pole = std::numeric_limits<double>::infinity();
      for (Eigen::Index m = 0; m < eig.lambdas.size(); ++m) {
        rec.lambdas[static_cast<std::size_t>(m)] = eig.lambdas(m).real();
        rec.transmit_abs[static_cast<std::size_t>(m)] = t_eig.row(m).norm();
        lambda_bar = std::max(lambda_bar, std::abs(eig.lambdas(m).real()));
        pole = std::min(pole, std::abs(1.0 - eig.scattering_eigenvalues(m)));
      }
      rec.lambda_bar = lambda_bar;
      pole_metric[i] = pole;
      ++n_valid;
    } catch (const numeric_error&) {
      rec.valid = false;
      pole_metric[i] = 0.0;  // unsolvable termination marks a pole
    }
    result.records.push_back(std::move(rec));
  }
  if (n_valid == 0) throw sweep_failed_error("chi_sweep: all grid points singular");

  double best = -1.0, worst_min = std::numeric_limits<double>::infinity();
  for (const auto& rec : result.records) {
    if (!rec.valid) continue;
    if (rec.lambda_bar > best) {
      best = rec.lambda_bar;
      result.chi_max_deg = rec.chi_deg;
    }
    if (rec.lambda_bar < worst_min) {
      worst_min = rec.lambda_bar;
      result.chi_min_deg = rec.chi_deg;
    }
  }
  result.flat_sweep = (best - worst_min) <= 1e-9 * std::max(1.0, best);

  // chi* = chi_max + 90 (mod 180), snapped to the sweep grid.
  const double target = std::fmod(result.chi_max_deg + 90.0, 180.0);
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& rec : result.records) {
    const double d = circular_distance_deg(rec.chi_deg, target, 180.0);
    if (d < best_dist) {
      best_dist = d;
      result.chi_star_deg = rec.chi_deg;
    }
  }

  // Poles of the lambda map: local minima of min_n |1 - s_n| below threshold.
  const std::size_t m = grid_deg.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = pole_metric[(i + m - 1) % m];
    const double next = pole_metric[(i + 1) % m];
    if (pole_metric[i] < 0.1 && pole_metric[i] <= prev && pole_metric[i] <= next) {
      result.pole_chis_deg.push_back(grid_deg[i]);
    }
  }
  for (double pole : result.pole_chis_deg) {
    if (circular_distance_deg(result.chi_star_deg, pole, 180.0) <= 5.0) {
      result.pole_proximity = true;
      break;
    }
  }
  return result;
}

RealizationTarget make_realization_target(const Gsm& gsm, const Matrix& gamma_load,
                                          const ChiSweepResult& sweep) {
  RealizationTarget target;
  target.chi_star_deg = sweep.chi_star_deg;
  target.pole_proximity = sweep.pole_proximity;
  target.flat_sweep = sweep.flat_sweep;
  target.gamma_load = gamma_load;
  target.n_modes = gsm.n_modes();
  target.n_ports = gsm.n_ports();

  const Gsm shifted =
      apply_phase_shift(gsm, Matrix::Zero(gsm.n_ports(), 0), sweep.chi_star_deg * kDegToRad)
          .first;
  target.target_entries = shifted.entries();
  const Matrix s0 = terminate(shifted, gamma_load);
  const TerminatedEig eig = eig_terminated(s0);
  target.eigenvalues = eig.lambdas.real();
  target.modal_transform = eig.modal_transform;
  target.transmit_eig = eig.modal_transform.transpose() * shifted.transmission();
  target.port_reflection = shifted.port_scattering();
  return target;
}

Gsm backtransform_gsm(const Eigen::VectorXd& lambdas, const Matrix& modal_transform,
                      const Matrix& transmit_eig, const Matrix& receive_eig,
                      const Matrix& port_reflection, const Matrix& gamma_load) {
  const int n = static_cast<int>(lambdas.size());
  const int p = static_cast<int>(port_reflection.rows());
  if (modal_transform.rows() != n || modal_transform.cols() != n ||
      transmit_eig.rows() != n || transmit_eig.cols() != p || receive_eig.rows() != p ||
      receive_eig.cols() != n || port_reflection.cols() != p ||
      gamma_load.rows() != p || gamma_load.cols() != p) {
    throw dimension_error("backtransform_gsm: inconsistent shapes");
  }
  Matrix s0_eig = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) s0_eig(i, i) = scattering_from_lambda(lambdas(i));
  const Matrix inv = termination_inverse(gamma_load, port_reflection, "backtransform_gsm");
  const Matrix s_eig = s0_eig - transmit_eig * inv * receive_eig;

  Matrix psi(n + p, n + p);
  psi.block(0, 0, n, n) =
      Matrix::Identity(n, n) +
      modal_transform * (s_eig - Matrix::Identity(n, n)) * modal_transform.transpose();
  psi.block(0, n, n, p) = modal_transform * transmit_eig;
  psi.block(n, 0, p, n) = receive_eig * modal_transform.transpose();
  psi.block(n, n, p, p) = port_reflection;
  return Gsm(std::move(psi), n, p);
}

ToyElementFit fit_toy_element(const RealizationTarget& target, const SnapGrid& snap) {
  if (target.n_modes != 2) {
    throw dimension_error("fit_toy_element: two-mode targets only");
  }
  const Matrix& q = target.modal_transform;
  const Eigen::Matrix2d qr = q.real();
  const double deviation =
      (q - qr.cast<Complex>()).norm() +
      (qr.transpose() * qr - Eigen::Matrix2d::Identity()).norm();
  if (deviation > 1e-3) {
    throw fit_infeasible_error(
        "fit_toy_element: modal transform is not a real rotation (deviation " +
        std::to_string(deviation) + ")");
  }

  // Eigenvector sign freedom: make the transform a proper rotation and keep
  // the transmit vector consistent.
  Eigen::Matrix2d rot = qr;
  Matrix t_eig = target.transmit_eig;
  if (rot.determinant() < 0.0) {
    rot.col(1) *= -1.0;
    t_eig.row(1) *= -1.0;
  }

  ToyElementFit fit;
  fit.rotation_raw_deg = -std::atan(rot(0, 1) / rot(0, 0)) / kDegToRad;
  fit.rotation_deg =
      std::round(fit.rotation_raw_deg / snap.angle_step_deg) * snap.angle_step_deg;
  fit.lambdas_raw = target.eigenvalues;
  fit.lambdas = target.eigenvalues;
  for (Eigen::Index i = 0; i < fit.lambdas.size(); ++i) {
    fit.lambdas(i) = std::round(fit.lambdas(i) / snap.lambda_step) * snap.lambda_step;
  }

  const double phi = fit.rotation_deg * kDegToRad;
  Eigen::Matrix2d rebuilt;
  rebuilt << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  // The snapped rotation may come back with a global sign flip; the transmit
  // rows absorb it so the reconstruction is unchanged.
  if ((rebuilt + rot).norm() < (rebuilt - rot).norm()) t_eig *= -1.0;

  fit.port_coupling = t_eig;
  const Gsm achieved =
      backtransform_gsm(fit.lambdas, rebuilt.cast<Complex>(), t_eig,
                        t_eig.transpose(), target.port_reflection, target.gamma_load);
  fit.achieved_entries = achieved.entries();
  fit.gsm_residual = (fit.achieved_entries - target.target_entries).norm();
  return fit;
}

}  // namespace arraysynth
