#include "arraysynth/toy_em.hpp"

#include <cmath>
#include <numbers>

#include "arraysynth/errors.hpp"

namespace arraysynth {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
// sqrt(3 / 8pi): unit radiated power for the sin-pattern of a short dipole.
const double kDipoleScale = std::sqrt(3.0 / (8.0 * std::numbers::pi));
}  // namespace

void ArrayModel::validate() const {
  if (rows < 1 || cols < 1) throw validation_error("ArrayModel: grid must be >= 1x1");
  if (dx_wavelengths <= 0.0 || dy_wavelengths <= 0.0) {
    throw validation_error("ArrayModel: spacings must be positive");
  }
  if (n_ports < 1) throw validation_error("ArrayModel: need at least one port");
}

Eigen::Vector3d ArrayModel::position(int element) const {
  const int c = element / rows;
  const int r = element % rows;
  return {c * dx_wavelengths, r * dy_wavelengths, 0.0};
}

Eigen::Vector3d ArrayModel::mode_polarization(int mode) const {
  if (mode == 0) return Eigen::Vector3d::UnitX();
  if (mode == 1) return Eigen::Vector3d::UnitY();
  throw dimension_error("ArrayModel: mode index out of range");
}

Eigen::MatrixX2d ArrayModel::positions() const {
  Eigen::MatrixX2d p(n_elements(), 2);
  for (int k = 0; k < n_elements(); ++k) {
    const auto r = position(k);
    p(k, 0) = r.x();
    p(k, 1) = r.y();
  }
  return p;
}

Complex hertzian_mutual_impedance(const Eigen::Vector3d& polarization_1,
                                  const Eigen::Vector3d& polarization_2,
                                  const Eigen::Vector3d& separation_wavelengths) {
  const double r = separation_wavelengths.norm();
  if (r == 0.0) {
    throw singularity_error("hertzian_mutual_impedance: zero separation");
  }
  const Eigen::Vector3d rhat = separation_wavelengths / r;
  const double u = 2.0 * std::numbers::pi * r;  // k0 * r
  const Complex j(0.0, 1.0);
  // Field of a point dipole: transverse term A and radial term B of
  // (I + grad grad / k^2) G, normalized so Re(z_self) -> 1 as r -> 0.
  const Complex a = 1.0 - j / u - 1.0 / (u * u);
  const Complex b = -1.0 + 3.0 * j / u + 3.0 / (u * u);
  const double p12 = polarization_1.dot(polarization_2);
  const double r1 = rhat.dot(polarization_1);
  const double r2 = rhat.dot(polarization_2);
  return 1.5 * j * std::exp(-j * u) / u * (a * p12 + b * r1 * r2);
}

namespace {

// Coupling block between two elements separated by an integer grid offset.
Matrix offset_block(const ArrayModel& model, int dc, int dr) {
  const Eigen::Vector3d sep(dc * model.dx_wavelengths, dr * model.dy_wavelengths, 0.0);
  const int n = model.n_modes();
  Matrix block(n, n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      block(i, m) = 0.5 * hertzian_mutual_impedance(model.mode_polarization(i),
                                                    model.mode_polarization(m), sep);
    }
  }
  return block;
}

}  // namespace

CouplingMatrix coupling_matrix(const ArrayModel& model, CouplingAssembly mode) {
  model.validate();
  const int k = model.n_elements();
  const int n = model.n_modes();
  Matrix g = Matrix::Zero(k * n, k * n);
  if (mode == CouplingAssembly::toeplitz) {
    // One block per distinct relative offset, (2R-1)(2C-1) evaluations.
    const int rows = model.rows, cols = model.cols;
    auto slot = [rows, cols](int dc, int dr) {
      return std::size_t((dc + cols - 1) * (2 * rows - 1) + (dr + rows - 1));
    };
    std::vector<Matrix> blocks(std::size_t((2 * rows - 1) * (2 * cols - 1)));
    for (int dc = -(cols - 1); dc <= cols - 1; ++dc) {
      for (int dr = -(rows - 1); dr <= rows - 1; ++dr) {
        if (dc == 0 && dr == 0) {
          blocks[slot(dc, dr)] = Matrix::Zero(n, n);
        } else {
          blocks[slot(dc, dr)] = offset_block(model, dc, dr);
        }
      }
    }
    for (int kk = 0; kk < k; ++kk) {
      const int ck = kk / rows, rk = kk % rows;
      for (int ll = 0; ll < k; ++ll) {
        if (kk == ll) continue;
        const int cl = ll / rows, rl = ll % rows;
        g.block(kk * n, ll * n, n, n) = blocks[slot(ck - cl, rk - rl)];
      }
    }
  } else {
    for (int kk = 0; kk < k; ++kk) {
      const int ck = kk / model.rows, rk = kk % model.rows;
      for (int ll = 0; ll < k; ++ll) {
        if (kk == ll) continue;
        const int cl = ll / model.rows, rl = ll % model.rows;
        g.block(kk * n, ll * n, n, n) = offset_block(model, ck - cl, rk - rl);
      }
    }
  }
  return CouplingMatrix(std::move(g), k, n);
}

Eigen::Vector2cd modal_far_field(const ArrayModel& model, int element, int mode,
                                 const AngleDeg& angle) {
  if (element < 0 || element >= model.n_elements()) {
    throw dimension_error("modal_far_field: element index out of range");
  }
  const Eigen::Vector3d p = model.mode_polarization(mode);
  const double t = angle.theta * kDegToRad;
  const double f = angle.phi * kDegToRad;
  const Eigen::Vector3d theta_hat(std::cos(t) * std::cos(f), std::cos(t) * std::sin(f),
                                  -std::sin(t));
  const Eigen::Vector3d phi_hat(-std::sin(f), std::cos(f), 0.0);
  const Eigen::Vector3d pos = model.position(element);
  const double st = std::sin(t);
  const Complex phase = std::polar(
      1.0, 2.0 * std::numbers::pi * (pos.x() * st * std::cos(f) + pos.y() * st * std::sin(f)));
  return {kDipoleScale * theta_hat.dot(p) * phase, kDipoleScale * phi_hat.dot(p) * phase};
}

void dipole_base_patterns(const RegularAngleGrid& grid, Matrix& f_theta, Matrix& f_phi) {
  const int n = grid.size();
  f_theta.resize(n, ArrayModel::kModesPerElement);
  f_phi.resize(n, ArrayModel::kModesPerElement);
  for (int a = 0; a < n; ++a) {
    const AngleDeg ang = grid.angle(a);
    const double t = ang.theta * kDegToRad;
    const double f = ang.phi * kDegToRad;
    // x-dipole
    f_theta(a, 0) = kDipoleScale * std::cos(t) * std::cos(f);
    f_phi(a, 0) = -kDipoleScale * std::sin(f);
    // y-dipole
    f_theta(a, 1) = kDipoleScale * std::cos(t) * std::sin(f);
    f_phi(a, 1) = kDipoleScale * std::cos(f);
  }
}

ModalFarFieldSet build_far_field_set(const ArrayModel& model, double cut_step_deg,
                                     double sphere_step_deg) {
  model.validate();
  const RegularAngleGrid cut = RegularAngleGrid::scan_cut(cut_step_deg);
  const RegularAngleGrid sphere = RegularAngleGrid::full_sphere(sphere_step_deg);
  Matrix cut_theta, cut_phi, sph_theta, sph_phi;
  dipole_base_patterns(cut, cut_theta, cut_phi);
  dipole_base_patterns(sphere, sph_theta, sph_phi);
  return ModalFarFieldSet(cut, std::move(cut_theta), std::move(cut_phi), sphere,
                          std::move(sph_theta), std::move(sph_phi), model.positions());
}

}  // namespace arraysynth
