#include "arraysynth/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "arraysynth/errors.hpp"

namespace arraysynth {

namespace {

double chebyshev_poly(int order, double x) {
  if (x > 1.0) return std::cosh(order * std::acosh(x));
  if (x < -1.0) {
    const double v = std::cosh(order * std::acosh(-x));
    return (order % 2 == 0) ? v : -v;
  }
  return std::cos(order * std::acos(x));
}

Vector steering_phases(int n, double spacing, double steer_deg) {
  const double st = std::sin(steer_deg * std::numbers::pi / 180.0);
  Vector p(n);
  for (int m = 0; m < n; ++m) {
    p(m) = std::polar(1.0, -2.0 * std::numbers::pi * spacing * m * st);
  }
  return p;
}

}  // namespace

Complex ArrayFactor::evaluate(double theta_deg) const {
  const double st = std::sin(theta_deg * std::numbers::pi / 180.0);
  Complex af = 0.0;
  for (Eigen::Index m = 0; m < weights.size(); ++m) {
    af += weights(m) *
          std::polar(1.0, 2.0 * std::numbers::pi * spacing_wavelengths * double(m) * st);
  }
  return af;
}

Eigen::VectorXd ArrayFactor::magnitude_db(const Eigen::VectorXd& theta_deg) const {
  Eigen::VectorXd mag(theta_deg.size());
  for (Eigen::Index i = 0; i < theta_deg.size(); ++i) {
    mag(i) = std::abs(evaluate(theta_deg(i)));
  }
  const double peak = mag.maxCoeff();
  return (mag / peak).unaryExpr([](double v) {
    return 20.0 * std::log10(std::max(v, 1e-300));
  });
}

ArrayFactor chebyshev_baseline(int n_elements, double sll_db, double spacing_wavelengths,
                               double steer_deg) {
  if (n_elements < 2) throw domain_error("chebyshev_baseline: need at least 2 elements");
  if (sll_db >= 0.0) throw domain_error("chebyshev_baseline: SLL must be negative dB");
  const int order = n_elements - 1;
  const double ratio = std::pow(10.0, -sll_db / 20.0);
  const double x0 = std::cosh(std::acosh(ratio) / order);

  // Sample the Chebyshev pattern at n points of the visible-space variable
  // and invert the DFT to recover the taper.
  const int n = n_elements;
  Vector samples(n);
  for (int p = 0; p < n; ++p) {
    const double psi = 2.0 * std::numbers::pi * p / n;
    const double t = chebyshev_poly(order, x0 * std::cos(0.5 * psi));
    samples(p) = t * std::polar(1.0, 0.5 * order * psi);
  }
  Vector w = Vector::Zero(n);
  for (int m = 0; m < n; ++m) {
    Complex acc = 0.0;
    for (int p = 0; p < n; ++p) {
      acc += samples(p) * std::polar(1.0, -2.0 * std::numbers::pi * p * m / double(n));
    }
    w(m) = acc / double(n);
  }
  // The taper is real and symmetric up to roundoff; normalize its peak.
  Eigen::VectorXd amp = w.real();
  amp /= amp.maxCoeff();
  ArrayFactor af;
  af.spacing_wavelengths = spacing_wavelengths;
  af.weights = amp.cast<Complex>().cwiseProduct(
      steering_phases(n, spacing_wavelengths, steer_deg));
  return af;
}

ArrayFactor uniform_baseline(int n_elements, double spacing_wavelengths,
                             double steer_deg) {
  if (n_elements < 1) throw domain_error("uniform_baseline: need at least 1 element");
  ArrayFactor af;
  af.spacing_wavelengths = spacing_wavelengths;
  af.weights = steering_phases(n_elements, spacing_wavelengths, steer_deg);
  return af;
}

double max_sidelobe_db(const ArrayFactor& af, double grid_step_deg) {
  const int n = static_cast<int>(std::lround(180.0 / grid_step_deg)) + 1;
  Eigen::VectorXd theta(n), mag(n);
  for (int i = 0; i < n; ++i) {
    theta(i) = -90.0 + i * grid_step_deg;
    mag(i) = std::abs(af.evaluate(theta(i)));
  }
  int peak = 0;
  mag.maxCoeff(&peak);
  // Walk to the first local minima on both sides of the main lobe.
  int lo = peak;
  while (lo > 0 && mag(lo - 1) < mag(lo)) --lo;
  int hi = peak;
  while (hi < n - 1 && mag(hi + 1) < mag(hi)) ++hi;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i >= lo && i <= hi) continue;
    worst = std::max(worst, mag(i));
  }
  if (worst == 0.0) throw numeric_error("max_sidelobe_db: no sidelobe region found");
  return 20.0 * std::log10(worst / mag(peak));
}

}  // namespace arraysynth
