#ifndef ARRAYSYNTH_BEAMS_HPP
#define ARRAYSYNTH_BEAMS_HPP

#include <Eigen/Dense>
#include <vector>

#include "arraysynth/farfield.hpp"
#include "arraysynth/gsm.hpp"

namespace arraysynth {

// Circular polarization basis in (theta-hat, phi-hat) components under the
// e^{+j omega t} phasor convention. Centralized so the handedness convention
// can be flipped in one place.
inline Eigen::Vector2cd lhcp_unit() {
  return Eigen::Vector2cd(Complex(1.0, 0.0), Complex(0.0, -1.0)) / std::sqrt(2.0);
}
inline Eigen::Vector2cd rhcp_unit() {
  return Eigen::Vector2cd(Complex(1.0, 0.0), Complex(0.0, 1.0)) / std::sqrt(2.0);
}

/// One beam requirement: target direction, polarization pair, sidelobe and
/// cross-polarization targets, and the angular sets they are enforced on.
struct BeamSpec {
  AngleDeg target;
  Eigen::Vector2cd pol_desired = lhcp_unit();
  Eigen::Vector2cd pol_undesired = rhcp_unit();
  double sll_target_db = -15.0;  // negative
  double xpr_target_db = -30.0;  // negative
  std::vector<AngleDeg> sidelobe_angles;   // M_S
  std::vector<AngleDeg> crosspol_angles;   // M_X

  void validate() const;

  // All angles the cost needs: target + M_S + M_X (deduplicated, target first).
  std::vector<AngleDeg> sample_angles() const;
};

// Integer-degree angles (theta, 0) with theta in [-90, lo] or [hi, 90].
std::vector<AngleDeg> sidelobe_band(double lo_deg, double hi_deg);

// All integer-degree angles (theta, 0) with theta in [-90, 90].
std::vector<AngleDeg> full_cut_angles();

// Beam table of the flagship 8x8 example: 13 beams steered from -60 to +60
// degrees in 10-degree steps with per-beam sidelobe bands.
std::vector<BeamSpec> paper_beam_table();

// Generic generator: one beam per scan angle with a symmetric main-lobe
// window of the given half width; M_X covers the whole cut.
std::vector<BeamSpec> make_beam_table(const std::vector<double>& scan_thetas_deg,
                                      double sll_db, double xpr_db,
                                      double window_halfwidth_deg);

}  // namespace arraysynth

#endif
