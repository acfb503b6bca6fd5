#include "arraysynth/manifold.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "arraysynth/errors.hpp"

namespace arraysynth {

double real_inner(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

Matrix us_random(int n, std::uint64_t seed) {
  if (n < 1) throw dimension_error("us_random: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  return us_project_manifold(a);
}

Matrix us_project_manifold(const Matrix& m) {
  if (!m.allFinite()) throw numeric_error("us_project_manifold: non-finite input");
  const Matrix sym = 0.5 * (m + m.transpose());
  // Unitary polar factor of a complex symmetric matrix is itself symmetric;
  // the explicit symmetrization only removes roundoff.
  Eigen::JacobiSVD<Matrix> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() <= 0.0) {
    throw numeric_error("us_project_manifold: singular input, projection undefined");
  }
  const Matrix polar = svd.matrixU() * svd.matrixV().adjoint();
  return 0.5 * (polar + polar.transpose());
}

Matrix us_project_tangent(const Matrix& base, const Matrix& ambient) {
  if (base.rows() != ambient.rows() || base.cols() != ambient.cols()) {
    throw dimension_error("us_project_tangent: shape mismatch");
  }
  // Commuting composition of the symmetrizer with the unitary-group tangent
  // projector V -> (V - Psi V^H Psi)/2.
  return 0.25 * (ambient + ambient.transpose() - base * ambient.adjoint() * base -
                 base * ambient.conjugate() * base);
}

Matrix us_retract(const Matrix& base, const Matrix& direction, double step) {
  if (base.rows() != direction.rows() || base.cols() != direction.cols()) {
    throw dimension_error("us_retract: shape mismatch");
  }
  if (step == 0.0) return base;
  return us_project_manifold(base + step * direction);
}

// -- excitations -----------------------------------------------------------

namespace {

void check_unit_columns(const Matrix& m, const char* what) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (std::abs(m.col(c).norm() - 1.0) > 1e-12) {
      throw validation_error(std::string(what) + ": column norm must be 1");
    }
  }
}

Matrix renormalize_columns(const Matrix& m, const char* what) {
  Matrix out = m;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double n = out.col(c).norm();
    if (n < 1e-12) {
      throw degenerate_column_error(std::string(what) + ": vanishing column");
    }
    out.col(c) /= n;
  }
  return out;
}

}  // namespace

ExcitationSet::ExcitationSet(Matrix static_part, Matrix dynamic_part, ColumnNorms norms)
    : static_part_(std::move(static_part)), dynamic_part_(std::move(dynamic_part)) {
  if (static_part_.cols() != dynamic_part_.rows()) {
    throw dimension_error("ExcitationSet: static columns must match dynamic rows");
  }
  if (!static_part_.allFinite() || !dynamic_part_.allFinite()) {
    throw invalid_input_error("ExcitationSet: non-finite entries");
  }
  switch (norms) {
    case ColumnNorms::checked:
      check_unit_columns(static_part_, "ExcitationSet static part");
      check_unit_columns(dynamic_part_, "ExcitationSet dynamic part");
      break;
    case ColumnNorms::renormalized:
      static_part_ = renormalize_columns(static_part_, "ExcitationSet static part");
      dynamic_part_ = renormalize_columns(dynamic_part_, "ExcitationSet dynamic part");
      break;
    case ColumnNorms::ambient:
      break;
  }
}

Matrix ExcitationSet::port_waves() const {
  const int rows = n_rows();
  const int cols = n_cols();
  const int states = n_states();
  Matrix v(rows * cols, states);
  for (int c = 0; c < cols; ++c) {
    v.block(c * rows, 0, rows, states) = static_part_.col(c) * dynamic_part_.row(c);
  }
  return v;
}

ExcitationSet ExcitationSet::uniform(int rows, int cols, int states) {
  if (rows < 1 || cols < 1 || states < 1) {
    throw dimension_error("ExcitationSet::uniform: all dimensions must be >= 1");
  }
  Matrix st = Matrix::Constant(rows, cols, Complex(1.0 / std::sqrt(double(rows)), 0.0));
  Matrix dy = Matrix::Constant(cols, states, Complex(1.0 / std::sqrt(double(cols)), 0.0));
  return ExcitationSet(std::move(st), std::move(dy));
}

void excitation_project_tangent(const ExcitationSet& base, Matrix& static_ambient,
                                Matrix& dynamic_ambient) {
  if (static_ambient.rows() != base.static_part().rows() ||
      static_ambient.cols() != base.static_part().cols() ||
      dynamic_ambient.rows() != base.dynamic_part().rows() ||
      dynamic_ambient.cols() != base.dynamic_part().cols()) {
    throw dimension_error("excitation_project_tangent: shape mismatch");
  }
  // Sphere tangent projection per column: v -> v - Re<x, v> x.
  for (Eigen::Index c = 0; c < static_ambient.cols(); ++c) {
    const auto x = base.static_part().col(c);
    static_ambient.col(c) -= x.dot(static_ambient.col(c)).real() * x;
  }
  for (Eigen::Index c = 0; c < dynamic_ambient.cols(); ++c) {
    const auto x = base.dynamic_part().col(c);
    dynamic_ambient.col(c) -= x.dot(dynamic_ambient.col(c)).real() * x;
  }
}

ExcitationSet excitation_retract(const ExcitationSet& base, const Matrix& static_dir,
                                 const Matrix& dynamic_dir, double step) {
  if (step == 0.0) return base;
  Matrix st = base.static_part() + step * static_dir;
  Matrix dy = base.dynamic_part() + step * dynamic_dir;
  return ExcitationSet(std::move(st), std::move(dy),
                       ExcitationSet::ColumnNorms::renormalized);
}

// -- product manifold -------------------------------------------------------

TangentVector TangentVector::zeros_like(const DesignPoint& x) {
  TangentVector t;
  t.gsm_parts.reserve(x.class_gsms.size());
  for (const auto& g : x.class_gsms) {
    t.gsm_parts.push_back(Matrix::Zero(g.dim(), g.dim()));
  }
  t.static_part = Matrix::Zero(x.excitation.static_part().rows(),
                               x.excitation.static_part().cols());
  t.dynamic_part = Matrix::Zero(x.excitation.dynamic_part().rows(),
                                x.excitation.dynamic_part().cols());
  return t;
}

double inner(const TangentVector& a, const TangentVector& b) {
  if (a.gsm_parts.size() != b.gsm_parts.size()) {
    throw dimension_error("inner: mismatched class counts");
  }
  double s = 0.0;
  for (std::size_t d = 0; d < a.gsm_parts.size(); ++d) {
    s += real_inner(a.gsm_parts[d], b.gsm_parts[d]);
  }
  s += real_inner(a.static_part, b.static_part);
  s += real_inner(a.dynamic_part, b.dynamic_part);
  return s;
}

double norm(const TangentVector& a) { return std::sqrt(inner(a, a)); }

TangentVector scaled(const TangentVector& a, double factor) {
  TangentVector out = a;
  for (auto& g : out.gsm_parts) g *= factor;
  out.static_part *= factor;
  out.dynamic_part *= factor;
  return out;
}

TangentVector add(const TangentVector& a, const TangentVector& b, double factor_b) {
  if (a.gsm_parts.size() != b.gsm_parts.size()) {
    throw dimension_error("add: mismatched class counts");
  }
  TangentVector out = a;
  for (std::size_t d = 0; d < out.gsm_parts.size(); ++d) {
    out.gsm_parts[d] += factor_b * b.gsm_parts[d];
  }
  out.static_part += factor_b * b.static_part;
  out.dynamic_part += factor_b * b.dynamic_part;
  return out;
}

TangentVector project_tangent(const DesignPoint& x, const TangentVector& ambient) {
  if (ambient.gsm_parts.size() != x.class_gsms.size()) {
    throw dimension_error("project_tangent: mismatched class counts");
  }
  TangentVector out = ambient;
  for (std::size_t d = 0; d < out.gsm_parts.size(); ++d) {
    out.gsm_parts[d] = us_project_tangent(x.class_gsms[d].entries(), ambient.gsm_parts[d]);
  }
  excitation_project_tangent(x.excitation, out.static_part, out.dynamic_part);
  return out;
}

TangentVector riemannian_gradient(const DesignPoint& x, const TangentVector& egrad) {
  return project_tangent(x, egrad);
}

DesignPoint retract(const DesignPoint& x, const TangentVector& direction, double step) {
  if (direction.gsm_parts.size() != x.class_gsms.size()) {
    throw dimension_error("retract: mismatched class counts");
  }
  DesignPoint out{{}, excitation_retract(x.excitation, direction.static_part,
                                         direction.dynamic_part, step)};
  out.class_gsms.reserve(x.class_gsms.size());
  for (std::size_t d = 0; d < x.class_gsms.size(); ++d) {
    const Gsm& g = x.class_gsms[d];
    out.class_gsms.emplace_back(us_retract(g.entries(), direction.gsm_parts[d], step),
                                g.n_modes(), g.n_ports());
  }
  return out;
}

double manifold_defect(const DesignPoint& x) {
  double defect = 0.0;
  for (const auto& g : x.class_gsms) {
    defect = std::max(defect, g.unitarity_defect());
    defect = std::max(defect, g.symmetry_defect());
  }
  for (Eigen::Index c = 0; c < x.excitation.static_part().cols(); ++c) {
    defect = std::max(defect, std::abs(x.excitation.static_part().col(c).norm() - 1.0));
  }
  for (Eigen::Index c = 0; c < x.excitation.dynamic_part().cols(); ++c) {
    defect = std::max(defect, std::abs(x.excitation.dynamic_part().col(c).norm() - 1.0));
  }
  return defect;
}

DesignPoint random_design_point(int n_classes, int n_modes, int n_ports, int rows,
                                int cols, int states, std::uint64_t seed) {
  if (n_classes < 1) throw dimension_error("random_design_point: need at least one class");
  DesignPoint x{{}, ExcitationSet::uniform(rows, cols, states)};
  x.class_gsms.reserve(n_classes);
  for (int d = 0; d < n_classes; ++d) {
    x.class_gsms.emplace_back(us_random(n_modes + n_ports, seed + std::uint64_t(d)),
                              n_modes, n_ports);
  }
  return x;
}

}  // namespace arraysynth
