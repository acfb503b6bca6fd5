#include "arraysynth/beams.hpp"

#include <cmath>

#include "arraysynth/errors.hpp"

namespace arraysynth {

void BeamSpec::validate() const {
  if (std::abs(pol_desired.norm() - 1.0) > 1e-12 ||
      std::abs(pol_undesired.norm() - 1.0) > 1e-12 ||
      std::abs(pol_desired.dot(pol_undesired)) > 1e-12) {
    throw validation_error("BeamSpec: polarization vectors must be orthonormal");
  }
  if (sll_target_db >= 0.0 || xpr_target_db >= 0.0) {
    throw domain_error("BeamSpec: SLL and XPR targets must be negative dB");
  }
  for (const auto& a : sidelobe_angles) {
    if (std::abs(a.theta - target.theta) <= 1e-9 && std::abs(a.phi - target.phi) <= 1e-9) {
      throw validation_error("BeamSpec: target angle must not lie in the sidelobe set");
    }
  }
}

std::vector<AngleDeg> BeamSpec::sample_angles() const {
  std::vector<AngleDeg> out;
  out.reserve(1 + sidelobe_angles.size() + crosspol_angles.size());
  out.push_back(target);
  auto push_unique = [&out](const AngleDeg& a) {
    for (const auto& b : out) {
      if (std::abs(b.theta - a.theta) <= 1e-9 && std::abs(b.phi - a.phi) <= 1e-9) return;
    }
    out.push_back(a);
  };
  for (const auto& a : sidelobe_angles) push_unique(a);
  for (const auto& a : crosspol_angles) push_unique(a);
  return out;
}

std::vector<AngleDeg> sidelobe_band(double lo_deg, double hi_deg) {
  std::vector<AngleDeg> out;
  for (int t = -90; t <= 90; ++t) {
    if (t <= lo_deg || t >= hi_deg) out.push_back({double(t), 0.0});
  }
  return out;
}

std::vector<AngleDeg> full_cut_angles() {
  std::vector<AngleDeg> out;
  out.reserve(181);
  for (int t = -90; t <= 90; ++t) out.push_back({double(t), 0.0});
  return out;
}

std::vector<BeamSpec> paper_beam_table() {
  // Main-lobe windows per scan angle; the sidelobe set contains all integer
  // degrees outside the window.
  struct Row {
    double theta_t, lo, hi;
  };
  static const Row rows[] = {
      {-60.0, -90.0, -25.0}, {-50.0, -75.0, -30.0}, {-40.0, -60.0, -25.0},
      {-30.0, -50.0, -15.0}, {-20.0, -35.0, -5.0},  {-10.0, -25.0, 5.0},
      {0.0, -15.0, 15.0},    {10.0, -5.0, 25.0},    {20.0, 5.0, 35.0},
      {30.0, 15.0, 50.0},    {40.0, 25.0, 60.0},    {50.0, 30.0, 75.0},
      {60.0, 25.0, 90.0},
  };
  std::vector<BeamSpec> beams;
  beams.reserve(std::size(rows));
  for (const Row& r : rows) {
    BeamSpec b;
    b.target = {r.theta_t, 0.0};
    b.sll_target_db = -15.0;
    b.xpr_target_db = -30.0;
    b.sidelobe_angles = sidelobe_band(r.lo, r.hi);
    b.crosspol_angles = full_cut_angles();
    b.validate();
    beams.push_back(std::move(b));
  }
  return beams;
}

std::vector<BeamSpec> make_beam_table(const std::vector<double>& scan_thetas_deg,
                                      double sll_db, double xpr_db,
                                      double window_halfwidth_deg) {
  if (scan_thetas_deg.empty()) throw config_error("make_beam_table: no scan angles");
  if (window_halfwidth_deg <= 0.0) {
    throw config_error("make_beam_table: window half width must be positive");
  }
  std::vector<BeamSpec> beams;
  beams.reserve(scan_thetas_deg.size());
  for (double t : scan_thetas_deg) {
    if (t < -90.0 || t > 90.0) {
      throw config_error("make_beam_table: scan angle outside [-90, 90]");
    }
    BeamSpec b;
    b.target = {t, 0.0};
    b.sll_target_db = sll_db;
    b.xpr_target_db = xpr_db;
    b.sidelobe_angles = sidelobe_band(t - window_halfwidth_deg, t + window_halfwidth_deg);
    b.crosspol_angles = full_cut_angles();
    b.validate();
    beams.push_back(std::move(b));
  }
  return beams;
}

}  // namespace arraysynth
