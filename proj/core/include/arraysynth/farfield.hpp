#ifndef ARRAYSYNTH_FARFIELD_HPP
#define ARRAYSYNTH_FARFIELD_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "arraysynth/gsm.hpp"

namespace arraysynth {

struct AngleDeg {
  double theta = 0.0;
  double phi = 0.0;
};

/// Regular product grid of angles in degrees; samples are enumerated with
/// theta varying fastest: index = i_phi * n_theta + i_theta.
struct RegularAngleGrid {
  double theta0 = 0.0;
  double dtheta = 1.0;
  int n_theta = 0;
  double phi0 = 0.0;
  double dphi = 0.0;
  int n_phi = 1;

  int size() const { return n_theta * n_phi; }
  AngleDeg angle(int index) const;
  std::optional<int> find(const AngleDeg& a) const;

  // The scan cut used by the cost sample sets: phi = 0, theta -90..90 deg.
  static RegularAngleGrid scan_cut(double step_deg = 1.0);
  // Midpoint full-sphere grid used for radiated-power quadrature.
  static RegularAngleGrid full_sphere(double step_deg = 1.0);

  bool operator==(const RegularAngleGrid&) const = default;
};

// Solid-angle quadrature weight sin(theta) * dtheta * dphi of one sample.
double quadrature_weight(const RegularAngleGrid& grid, int index);

/// Far fields of all retained modes of all elements, sampled on a scan-cut
/// grid and a full-sphere grid. Elements share the base patterns of the
/// reference element at the origin; per-element samples differ by the
/// position phase factor exp(+j k0 (x_k u + y_k v)).
class ModalFarFieldSet {
public:
  ModalFarFieldSet(RegularAngleGrid cut_grid, Matrix cut_theta, Matrix cut_phi,
                   RegularAngleGrid sphere_grid, Matrix sphere_theta, Matrix sphere_phi,
                   Eigen::MatrixX2d positions_wavelengths);

  int n_elements() const { return static_cast<int>(positions_.rows()); }
  int n_modes() const { return static_cast<int>(cut_theta_base_.cols()); }

  const RegularAngleGrid& cut_grid() const { return cut_grid_; }
  const RegularAngleGrid& sphere_grid() const { return sphere_grid_; }
  const Eigen::MatrixX2d& positions() const { return positions_; }

  // Base (reference-element) patterns, n_angles x N per component.
  const Matrix& cut_theta_base() const { return cut_theta_base_; }
  const Matrix& cut_phi_base() const { return cut_phi_base_; }
  const Matrix& sphere_theta_base() const { return sphere_theta_base_; }
  const Matrix& sphere_phi_base() const { return sphere_phi_base_; }

  // Expanded per-(element, mode) cut-grid samples, n_angles x (K*N) with
  // column index k*N + n matching the stacking of the modal coefficients.
  const Matrix& cut_theta() const { return cut_theta_kn_; }
  const Matrix& cut_phi() const { return cut_phi_kn_; }

  Complex position_phase(int element, const AngleDeg& a) const;

  // Single stored sample (theta-hat, phi-hat components) on the cut grid.
  Eigen::Vector2cd cut_sample(int element, int mode, int angle_index) const;

  // Total far field on the whole cut grid, one column pair per state.
  void evaluate_cut(const Matrix& modal_coefficients, Matrix& f_theta,
                    Matrix& f_phi) const;

  // Radiated power per state from the full-sphere quadrature.
  Eigen::VectorXd radiated_power(const Matrix& modal_coefficients) const;

  // Total far field at one sphere-grid sample for one state.
  Eigen::Vector2cd sphere_field(const Matrix& modal_coefficients, int state,
                                int angle_index) const;

  // Quadrature of |F_n|^2 over the sphere for each base mode.
  Eigen::VectorXd mode_power() const;

private:
  RegularAngleGrid cut_grid_;
  RegularAngleGrid sphere_grid_;
  Matrix cut_theta_base_, cut_phi_base_;        // n_cut x N
  Matrix sphere_theta_base_, sphere_phi_base_;  // n_sph x N
  Eigen::MatrixX2d positions_;                  // K x 2, wavelengths
  Matrix cut_theta_kn_, cut_phi_kn_;            // n_cut x K*N
  Eigen::VectorXd sphere_u_, sphere_v_;         // sin(t)cos(p), sin(t)sin(p)
  Eigen::VectorXd sphere_w_;                    // quadrature weights
};

/// Far field of one excitation state sampled on an explicit angle list.
struct FarFieldSamples {
  std::vector<AngleDeg> angles;
  Matrix values;  // 2 x n_angles; row 0 theta-hat, row 1 phi-hat

  Eigen::Vector2cd at(const AngleDeg& a) const;  // missing_sample_error if absent
};

// Samples the total far fields of all states on the requested angles, which
// must lie on the stored cut grid.
std::vector<FarFieldSamples> far_field(const Matrix& modal_coefficients,
                                       const ModalFarFieldSet& fields,
                                       const std::vector<AngleDeg>& angles);

}  // namespace arraysynth

#endif
