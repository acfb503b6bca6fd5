#include "arraysynth/farfield.hpp"

#include <cmath>
#include <numbers>

#include "arraysynth/errors.hpp"

namespace arraysynth {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kAngleTol = 1e-9;

std::optional<int> grid_index_1d(double x0, double dx, int n, double x) {
  if (n == 1) {
    return (std::abs(x - x0) <= kAngleTol) ? std::optional<int>(0) : std::nullopt;
  }
  const double t = (x - x0) / dx;
  const int i = static_cast<int>(std::lround(t));
  if (i < 0 || i >= n || std::abs(t - double(i)) * std::abs(dx) > kAngleTol) {
    return std::nullopt;
  }
  return i;
}
}  // namespace

AngleDeg RegularAngleGrid::angle(int index) const {
  const int it = index % n_theta;
  const int ip = index / n_theta;
  return {theta0 + it * dtheta, phi0 + ip * dphi};
}

std::optional<int> RegularAngleGrid::find(const AngleDeg& a) const {
  const auto it = grid_index_1d(theta0, dtheta, n_theta, a.theta);
  const auto ip = grid_index_1d(phi0, dphi, n_phi, a.phi);
  if (!it || !ip) return std::nullopt;
  return *ip * n_theta + *it;
}

RegularAngleGrid RegularAngleGrid::scan_cut(double step_deg) {
  RegularAngleGrid g;
  g.theta0 = -90.0;
  g.dtheta = step_deg;
  g.n_theta = static_cast<int>(std::lround(180.0 / step_deg)) + 1;
  g.phi0 = 0.0;
  g.dphi = 0.0;
  g.n_phi = 1;
  return g;
}

RegularAngleGrid RegularAngleGrid::full_sphere(double step_deg) {
  RegularAngleGrid g;
  g.theta0 = 0.5 * step_deg;
  g.dtheta = step_deg;
  g.n_theta = static_cast<int>(std::lround(180.0 / step_deg));
  g.phi0 = 0.5 * step_deg;
  g.dphi = step_deg;
  g.n_phi = static_cast<int>(std::lround(360.0 / step_deg));
  return g;
}

double quadrature_weight(const RegularAngleGrid& grid, int index) {
  const AngleDeg a = grid.angle(index);
  return std::sin(a.theta * kDegToRad) * (grid.dtheta * kDegToRad) *
         (grid.dphi * kDegToRad);
}

ModalFarFieldSet::ModalFarFieldSet(RegularAngleGrid cut_grid, Matrix cut_theta,
                                   Matrix cut_phi, RegularAngleGrid sphere_grid,
                                   Matrix sphere_theta, Matrix sphere_phi,
                                   Eigen::MatrixX2d positions_wavelengths)
    : cut_grid_(cut_grid),
      sphere_grid_(sphere_grid),
      cut_theta_base_(std::move(cut_theta)),
      cut_phi_base_(std::move(cut_phi)),
      sphere_theta_base_(std::move(sphere_theta)),
      sphere_phi_base_(std::move(sphere_phi)),
      positions_(std::move(positions_wavelengths)) {
  const int n_modes = static_cast<int>(cut_theta_base_.cols());
  if (cut_theta_base_.rows() != cut_grid_.size() ||
      cut_phi_base_.rows() != cut_grid_.size() || cut_phi_base_.cols() != n_modes ||
      sphere_theta_base_.rows() != sphere_grid_.size() ||
      sphere_phi_base_.rows() != sphere_grid_.size() ||
      sphere_theta_base_.cols() != n_modes || sphere_phi_base_.cols() != n_modes) {
    throw dimension_error("ModalFarFieldSet: pattern shapes do not match the grids");
  }
  if (!cut_theta_base_.allFinite() || !cut_phi_base_.allFinite() ||
      !sphere_theta_base_.allFinite() || !sphere_phi_base_.allFinite()) {
    throw invalid_input_error("ModalFarFieldSet: non-finite samples");
  }
  const int k = n_elements();
  const int n_cut = cut_grid_.size();
  cut_theta_kn_.resize(n_cut, k * n_modes);
  cut_phi_kn_.resize(n_cut, k * n_modes);
  for (int e = 0; e < k; ++e) {
    Vector phase(n_cut);
    for (int a = 0; a < n_cut; ++a) phase(a) = position_phase(e, cut_grid_.angle(a));
    for (int n = 0; n < n_modes; ++n) {
      cut_theta_kn_.col(e * n_modes + n) = cut_theta_base_.col(n).cwiseProduct(phase);
      cut_phi_kn_.col(e * n_modes + n) = cut_phi_base_.col(n).cwiseProduct(phase);
    }
  }
  const int n_sph = sphere_grid_.size();
  sphere_u_.resize(n_sph);
  sphere_v_.resize(n_sph);
  sphere_w_.resize(n_sph);
  for (int a = 0; a < n_sph; ++a) {
    const AngleDeg ang = sphere_grid_.angle(a);
    const double st = std::sin(ang.theta * kDegToRad);
    sphere_u_(a) = st * std::cos(ang.phi * kDegToRad);
    sphere_v_(a) = st * std::sin(ang.phi * kDegToRad);
    sphere_w_(a) = quadrature_weight(sphere_grid_, a);
  }
}

Complex ModalFarFieldSet::position_phase(int element, const AngleDeg& a) const {
  const double st = std::sin(a.theta * kDegToRad);
  const double arg = 2.0 * std::numbers::pi *
                     (positions_(element, 0) * st * std::cos(a.phi * kDegToRad) +
                      positions_(element, 1) * st * std::sin(a.phi * kDegToRad));
  return std::polar(1.0, arg);
}

Eigen::Vector2cd ModalFarFieldSet::cut_sample(int element, int mode,
                                              int angle_index) const {
  const int col = element * n_modes() + mode;
  return {cut_theta_kn_(angle_index, col), cut_phi_kn_(angle_index, col)};
}

void ModalFarFieldSet::evaluate_cut(const Matrix& modal_coefficients, Matrix& f_theta,
                                    Matrix& f_phi) const {
  if (modal_coefficients.rows() != cut_theta_kn_.cols()) {
    throw dimension_error("evaluate_cut: coefficient rows must equal K*N");
  }
  f_theta.noalias() = cut_theta_kn_ * modal_coefficients;
  f_phi.noalias() = cut_phi_kn_ * modal_coefficients;
}

Eigen::VectorXd ModalFarFieldSet::radiated_power(const Matrix& modal_coefficients) const {
  const int n = n_modes();
  const int k = n_elements();
  const int states = static_cast<int>(modal_coefficients.cols());
  if (modal_coefficients.rows() != Eigen::Index(k) * n) {
    throw dimension_error("radiated_power: coefficient rows must equal K*N");
  }
  const int n_sph = sphere_grid_.size();
  Eigen::VectorXd power = Eigen::VectorXd::Zero(states);
  Matrix f_theta = Matrix::Zero(n_sph, states);
  Matrix f_phi = Matrix::Zero(n_sph, states);
  Vector phase(n_sph);
  for (int e = 0; e < k; ++e) {
    const double x = positions_(e, 0), y = positions_(e, 1);
    for (int a = 0; a < n_sph; ++a) {
      phase(a) = std::polar(1.0, 2.0 * std::numbers::pi * (x * sphere_u_(a) + y * sphere_v_(a)));
    }
    const auto coeff = modal_coefficients.block(e * n, 0, n, states);
    f_theta.noalias() += phase.asDiagonal() * (sphere_theta_base_ * coeff);
    f_phi.noalias() += phase.asDiagonal() * (sphere_phi_base_ * coeff);
  }
  for (int s = 0; s < states; ++s) {
    power(s) = (f_theta.col(s).cwiseAbs2() + f_phi.col(s).cwiseAbs2()).dot(sphere_w_);
  }
  return power;
}

Eigen::Vector2cd ModalFarFieldSet::sphere_field(const Matrix& modal_coefficients,
                                                int state, int angle_index) const {
  const int n = n_modes();
  Eigen::Vector2cd f = Eigen::Vector2cd::Zero();
  for (int e = 0; e < n_elements(); ++e) {
    const Complex phase = position_phase(e, sphere_grid_.angle(angle_index));
    for (int m = 0; m < n; ++m) {
      const Complex c = modal_coefficients(e * n + m, state) * phase;
      f(0) += sphere_theta_base_(angle_index, m) * c;
      f(1) += sphere_phi_base_(angle_index, m) * c;
    }
  }
  return f;
}

Eigen::VectorXd ModalFarFieldSet::mode_power() const {
  const int n = n_modes();
  Eigen::VectorXd p(n);
  for (int m = 0; m < n; ++m) {
    p(m) = (sphere_theta_base_.col(m).cwiseAbs2() + sphere_phi_base_.col(m).cwiseAbs2())
               .dot(sphere_w_);
  }
  return p;
}

Eigen::Vector2cd FarFieldSamples::at(const AngleDeg& a) const {
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (std::abs(angles[i].theta - a.theta) <= kAngleTol &&
        std::abs(angles[i].phi - a.phi) <= kAngleTol) {
      return values.col(static_cast<Eigen::Index>(i));
    }
  }
  throw missing_sample_error("FarFieldSamples: angle not sampled");
}

std::vector<FarFieldSamples> far_field(const Matrix& modal_coefficients,
                                       const ModalFarFieldSet& fields,
                                       const std::vector<AngleDeg>& angles) {
  if (modal_coefficients.rows() != Eigen::Index(fields.n_elements()) * fields.n_modes()) {
    throw dimension_error("far_field: coefficient rows must equal K*N");
  }
  std::vector<int> rows;
  rows.reserve(angles.size());
  for (const auto& a : angles) {
    const auto idx = fields.cut_grid().find(a);
    if (!idx) throw missing_sample_error("far_field: angle not on the stored grid");
    rows.push_back(*idx);
  }
  const int states = static_cast<int>(modal_coefficients.cols());
  std::vector<FarFieldSamples> out(static_cast<std::size_t>(states));
  for (int s = 0; s < states; ++s) {
    auto& ff = out[static_cast<std::size_t>(s)];
    ff.angles = angles;
    ff.values.resize(2, static_cast<Eigen::Index>(angles.size()));
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const int r = rows[i];
      ff.values(0, static_cast<Eigen::Index>(i)) =
          fields.cut_theta().row(r) * modal_coefficients.col(s);
      ff.values(1, static_cast<Eigen::Index>(i)) =
          fields.cut_phi().row(r) * modal_coefficients.col(s);
    }
  }
  return out;
}

}  // namespace arraysynth
