#ifndef ARRAYSYNTH_COST_HPP
#define ARRAYSYNTH_COST_HPP

#include <vector>

#include "arraysynth/beams.hpp"
#include "arraysynth/farfield.hpp"

namespace arraysynth {

// Sentinel returned by beam_cost when the main-beam projection vanishes and
// the penalty terms would divide by zero.
inline constexpr double kDegenerateBeamCost = 1e30;
inline constexpr double kMainBeamGuard = 1e-30;

// Linear penalty above one, zero otherwise.
double penalty_gamma(double x);

// Amplitude ratio of a dB value (10^(db/20)).
double db_to_amplitude(double db);

// Single-beam cost: negative co-polar gain at the target plus the weighted
// penalties on the sidelobe and cross-polarization sample sets.
double beam_cost(const FarFieldSamples& field, const BeamSpec& beam, double alpha);

// Sum of beam costs over all excitation states, one beam per state.
double total_cost(const std::vector<FarFieldSamples>& fields,
                  const std::vector<BeamSpec>& beams, double alpha);

struct BeamMetrics {
  double directivity_dbi = 0.0;  // co-polar partial directivity at the target
  double sll_db = 0.0;           // worst sidelobe over M_S, relative to target
  double xpr_db = 0.0;           // worst cross-polarization over M_X
};

// Reporting metrics for one state; the radiated-power quadrature uses the
// full-sphere grid of `fields` on the supplied modal coefficients.
BeamMetrics metrics(const FarFieldSamples& field, const BeamSpec& beam,
                    const ModalFarFieldSet& fields, const Matrix& modal_coefficients,
                    int state);

}  // namespace arraysynth

#endif
