#ifndef ARRAYSYNTH_CHEBYSHEV_HPP
#define ARRAYSYNTH_CHEBYSHEV_HPP

#include <Eigen/Dense>
#include <vector>

#include "arraysynth/gsm.hpp"

namespace arraysynth {

/// Uniformly spaced linear array factor AF(theta) = sum_m w_m e^{j 2 pi d m sin theta}
/// with d in wavelengths.
struct ArrayFactor {
  Vector weights;
  double spacing_wavelengths = 0.5;

  Complex evaluate(double theta_deg) const;
  Eigen::VectorXd magnitude_db(const Eigen::VectorXd& theta_deg) const;  // peak-normalized
};

// Dolph-Chebyshev taper with the prescribed sidelobe level (negative dB) and
// a linear phase progression steering the beam to steer_deg.
ArrayFactor chebyshev_baseline(int n_elements, double sll_db, double spacing_wavelengths,
                               double steer_deg);

// Uniform-amplitude taper with the same steering convention.
ArrayFactor uniform_baseline(int n_elements, double spacing_wavelengths, double steer_deg);

// Peak sidelobe of |AF| in dB relative to the main lobe, from a dense grid
// scan that excludes the main lobe out to its first nulls.
double max_sidelobe_db(const ArrayFactor& af, double grid_step_deg = 0.1);

}  // namespace arraysynth

#endif
