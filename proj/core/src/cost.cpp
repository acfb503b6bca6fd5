#include "arraysynth/cost.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "arraysynth/errors.hpp"

namespace arraysynth {

double penalty_gamma(double x) {
  if (x < 0.0) throw domain_error("penalty_gamma: argument must be nonnegative");
  return x <= 1.0 ? 0.0 : x - 1.0;
}

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

double beam_cost(const FarFieldSamples& field, const BeamSpec& beam, double alpha) {
  if (alpha < 0.0) throw domain_error("beam_cost: alpha must be nonnegative");
  const Complex co_t = beam.pol_desired.dot(field.at(beam.target));
  const double co_t_abs = std::abs(co_t);
  const double gain_term = -co_t_abs * co_t_abs;
  if (alpha == 0.0) return gain_term;
  if (co_t_abs < kMainBeamGuard) return kDegenerateBeamCost;

  const double sll_lin = db_to_amplitude(beam.sll_target_db);
  const double xpr_lin = db_to_amplitude(beam.xpr_target_db);
  double penalty = 0.0;
  for (const auto& a : beam.sidelobe_angles) {
    const double lvl = std::abs(beam.pol_desired.dot(field.at(a)));
    const double g = penalty_gamma(lvl / (co_t_abs * sll_lin));
    penalty += g * g;
  }
  for (const auto& a : beam.crosspol_angles) {
    const double lvl = std::abs(beam.pol_undesired.dot(field.at(a)));
    const double g = penalty_gamma(lvl / (co_t_abs * xpr_lin));
    penalty += g * g;
  }
  return gain_term + alpha * penalty;
}

double total_cost(const std::vector<FarFieldSamples>& fields,
                  const std::vector<BeamSpec>& beams, double alpha) {
  if (fields.size() != beams.size()) {
    throw dimension_error("total_cost: one far field per beam required");
  }
  double cost = 0.0;
  for (std::size_t s = 0; s < beams.size(); ++s) {
    cost += beam_cost(fields[s], beams[s], alpha);
  }
  return cost;
}

BeamMetrics metrics(const FarFieldSamples& field, const BeamSpec& beam,
                    const ModalFarFieldSet& fields, const Matrix& modal_coefficients,
                    int state) {
  const Complex co_t = beam.pol_desired.dot(field.at(beam.target));
  const double co_t_abs = std::abs(co_t);
  if (co_t_abs < kMainBeamGuard) {
    throw numeric_error("metrics: main-beam field vanishes, metrics undefined");
  }

  BeamMetrics out;
  const Eigen::VectorXd p_rad = fields.radiated_power(modal_coefficients.col(state));
  out.directivity_dbi =
      10.0 * std::log10(4.0 * std::numbers::pi * co_t_abs * co_t_abs / p_rad(0));

  double worst_sll = -std::numeric_limits<double>::infinity();
  for (const auto& a : beam.sidelobe_angles) {
    const double lvl = std::abs(beam.pol_desired.dot(field.at(a)));
    worst_sll = std::max(worst_sll, 20.0 * std::log10(lvl / co_t_abs));
  }
  double worst_xpr = -std::numeric_limits<double>::infinity();
  for (const auto& a : beam.crosspol_angles) {
    const double lvl = std::abs(beam.pol_undesired.dot(field.at(a)));
    worst_xpr = std::max(worst_xpr, 20.0 * std::log10(lvl / co_t_abs));
  }
  out.sll_db = worst_sll;
  out.xpr_db = worst_xpr;
  return out;
}

}  // namespace arraysynth
