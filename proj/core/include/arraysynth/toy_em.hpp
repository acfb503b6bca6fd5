#ifndef ARRAYSYNTH_TOY_EM_HPP
#define ARRAYSYNTH_TOY_EM_HPP

#include <Eigen/Dense>

#include "arraysynth/coupling.hpp"
#include "arraysynth/farfield.hpp"
#include "arraysynth/gsm.hpp"

namespace arraysynth {

/// Desk-scale analytic array model: a regular grid of elements carrying two
/// crossed infinitesimal dipole modes (x and y oriented) in free space.
/// Element k = c * rows + r sits at (c * dx, r * dy, 0) in wavelengths.
struct ArrayModel {
  int rows = 1;
  int cols = 1;
  double dx_wavelengths = 0.5;
  double dy_wavelengths = 0.5;
  int n_ports = 1;

  static constexpr int kModesPerElement = 2;

  int n_elements() const { return rows * cols; }
  int n_modes() const { return kModesPerElement; }

  Eigen::Vector3d position(int element) const;
  Eigen::Vector3d mode_polarization(int mode) const;  // x-hat or y-hat
  Eigen::MatrixX2d positions() const;

  void validate() const;
};

enum class CouplingAssembly { direct, toeplitz };

// Mutual impedance of two infinitesimal dipoles, normalized so the self
// radiation resistance of either dipole is one. Separation in wavelengths.
Complex hertzian_mutual_impedance(const Eigen::Vector3d& polarization_1,
                                  const Eigen::Vector3d& polarization_2,
                                  const Eigen::Vector3d& separation_wavelengths);

// Global modal coupling matrix of the model; entries are half the normalized
// mutual impedances, with exactly zero diagonal blocks. The toeplitz path
// computes only the distinct relative-offset blocks and replicates them.
CouplingMatrix coupling_matrix(const ArrayModel& model,
                               CouplingAssembly mode = CouplingAssembly::toeplitz);

// Unit-radiated-power far field of one element mode, including the element
// position phase factor exp(+j k0 (x_k u + y_k v)).
Eigen::Vector2cd modal_far_field(const ArrayModel& model, int element, int mode,
                                 const AngleDeg& angle);

// Base dipole patterns (reference element at the origin) on a grid.
void dipole_base_patterns(const RegularAngleGrid& grid, Matrix& f_theta, Matrix& f_phi);

// Full far-field set of the model on the default cut and sphere grids.
ModalFarFieldSet build_far_field_set(const ArrayModel& model,
                                     double cut_step_deg = 1.0,
                                     double sphere_step_deg = 1.0);

}  // namespace arraysynth

#endif
