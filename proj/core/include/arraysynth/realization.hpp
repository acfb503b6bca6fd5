#ifndef ARRAYSYNTH_REALIZATION_HPP
#define ARRAYSYNTH_REALIZATION_HPP

#include <Eigen/Dense>
#include <vector>

#include "arraysynth/gsm.hpp"

namespace arraysynth {

// Fixed sign convention of the eigenvalue map: s = -(1 - j lambda)/(1 + j lambda).
Complex scattering_from_lambda(Complex lambda);
Complex lambda_from_scattering(Complex s);

// Modal scattering matrix of the element terminated with the load reflection:
// S0 = S + T (Gamma_L - Gamma)^-1 R.
Matrix terminate(const Gsm& gsm, const Matrix& gamma_load);

struct TerminatedEig {
  Eigen::VectorXcd scattering_eigenvalues;  // s_n, unimodular for lossless inputs
  Eigen::VectorXcd lambdas;                 // lambda_n, real for lossless inputs
  Matrix modal_transform;                   // Q, unit columns, phase fixed
};

// Eigen-decomposition of a terminated scattering matrix with deterministic
// ordering (descending |lambda|, ties by the phase of the first eigenvector
// component) and eigenvector columns scaled so the largest-magnitude
// component is real positive.
TerminatedEig eig_terminated(const Matrix& s0);

struct ChiSweepRecord {
  double chi_deg = 0.0;
  bool valid = false;                 // termination solvable at this point
  std::vector<double> lambdas;        // real parts, ordered as in eig_terminated
  std::vector<double> transmit_abs;   // |t_n| of the eigenbasis transmit vector
  double lambda_bar = 0.0;            // max_n |lambda_n|
};

struct ChiSweepResult {
  std::vector<ChiSweepRecord> records;
  double chi_max_deg = 0.0;   // grid argmax of lambda_bar
  double chi_star_deg = 0.0;  // chi_max + 90 deg (mod 180), snapped to the grid
  double chi_min_deg = 0.0;   // true grid argmin of lambda_bar, for comparison
  bool pole_proximity = false;
  bool flat_sweep = false;
  std::vector<double> pole_chis_deg;
};

std::vector<double> default_chi_grid(double step_deg = 1.0);  // [0, 180)

// Sweeps the reference-plane shift over the grid, evaluating the terminated
// eigenvalues and eigenbasis transmit vector at every point, and selects
// chi* = chi_max + 90 deg (mod 180). Throws sweep_failed_error when no grid
// point is solvable.
ChiSweepResult chi_sweep(const Gsm& gsm, const Matrix& gamma_load,
                         const std::vector<double>& grid_deg);

/// Realization targets of one element class: terminated eigenvalues, modal
/// transformation, eigenbasis transmit vector and port reflection at the
/// selected reference-plane shift.
struct RealizationTarget {
  Eigen::VectorXd eigenvalues;  // lambda, real
  Matrix modal_transform;       // Q
  Matrix transmit_eig;          // N x P
  Matrix port_reflection;       // P x P, after the chi shift
  double chi_star_deg = 0.0;
  Matrix gamma_load;            // P x P
  Matrix target_entries;        // chi-shifted GSM the realization should match
  int n_modes = 0;
  int n_ports = 0;
  bool pole_proximity = false;
  bool flat_sweep = false;
};

RealizationTarget make_realization_target(const Gsm& gsm, const Matrix& gamma_load,
                                          const ChiSweepResult& sweep);

// GSM of a realized element in the common basis, assembled from the
// eigenbasis description.
Gsm backtransform_gsm(const Eigen::VectorXd& lambdas, const Matrix& modal_transform,
                      const Matrix& transmit_eig, const Matrix& receive_eig,
                      const Matrix& port_reflection, const Matrix& gamma_load);

struct SnapGrid {
  double lambda_step = 0.1;
  double angle_step_deg = 1.0;
};

struct ToyElementFit {
  double rotation_deg = 0.0;      // snapped
  double rotation_raw_deg = 0.0;
  Eigen::VectorXd lambdas;        // snapped
  Eigen::VectorXd lambdas_raw;
  Matrix port_coupling;           // eigenbasis transmit vector used
  Matrix achieved_entries;        // back-transformed GSM at the snapped values
  double gsm_residual = 0.0;      // ||achieved - target||_F
};

// Maps a realization target onto the toy element parameters (patch rotation
// plus per-mode detuning); requires a two-mode target whose modal transform
// is a real rotation up to column phases.
ToyElementFit fit_toy_element(const RealizationTarget& target, const SnapGrid& snap = {});

}  // namespace arraysynth

#endif
