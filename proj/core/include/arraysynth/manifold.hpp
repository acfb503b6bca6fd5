#ifndef ARRAYSYNTH_MANIFOLD_HPP
#define ARRAYSYNTH_MANIFOLD_HPP

#include <cstdint>
#include <vector>

#include "arraysynth/gsm.hpp"

namespace arraysynth {

// ---------------------------------------------------------------------------
// Manifold of unitary symmetric matrices.
//
// Points satisfy Psi^H Psi = I and Psi = Psi^T. Tangent vectors at Psi are
// the symmetric matrices V with Psi^H V skew-Hermitian. The metric is the
// real part of the Frobenius inner product, and the retraction maps
// Psi + t V to the nearest unitary symmetric matrix (unitary polar factor of
// the symmetrized step, equivalently the Takagi factors with all singular
// values snapped to one).
// ---------------------------------------------------------------------------

// Real-trace Frobenius inner product Re tr(A^H B).
double real_inner(const Matrix& a, const Matrix& b);

// Random point on the unitary symmetric manifold; deterministic per seed.
Matrix us_random(int n, std::uint64_t seed);

// Orthogonal projection of an ambient matrix onto the tangent space at base.
Matrix us_project_tangent(const Matrix& base, const Matrix& ambient);

// Projection onto the manifold itself (nearest unitary symmetric matrix).
Matrix us_project_manifold(const Matrix& m);

// Retraction; step = 0 returns base exactly.
Matrix us_retract(const Matrix& base, const Matrix& direction, double step);

// ---------------------------------------------------------------------------
// Excitations: one static column weight vector per array column (unit norm)
// and a dynamic per-beam combination matrix with unit-norm columns. Each
// factor lives on a product of complex unit spheres.
// ---------------------------------------------------------------------------

class ExcitationSet {
public:
  // `checked` enforces the unit-norm invariants, `renormalized` restores them,
  // `ambient` skips them (off-manifold values, as used by finite-difference
  // validation of the ambient cost).
  enum class ColumnNorms { checked, renormalized, ambient };

  // static_part is R x C (column c holds the static weights of array column
  // c), dynamic_part is C x S.
  ExcitationSet(Matrix static_part, Matrix dynamic_part,
                ColumnNorms norms = ColumnNorms::checked);

  int n_rows() const { return static_cast<int>(static_part_.rows()); }
  int n_cols() const { return static_cast<int>(static_part_.cols()); }
  int n_states() const { return static_cast<int>(dynamic_part_.cols()); }

  const Matrix& static_part() const { return static_part_; }
  const Matrix& dynamic_part() const { return dynamic_part_; }

  // Port-wave matrix v = v_static * v_dyn of shape K x S with K = R*C and
  // element index k = c*R + r (column-major over the grid).
  Matrix port_waves() const;

  // Uniform amplitude, zero phase start point.
  static ExcitationSet uniform(int rows, int cols, int states);

private:
  Matrix static_part_;   // R x C
  Matrix dynamic_part_;  // C x S
};

// Tangent projection for the excitation product-of-spheres manifold.
void excitation_project_tangent(const ExcitationSet& base, Matrix& static_ambient,
                                Matrix& dynamic_ambient);

// Retraction by renormalization; throws degenerate_column_error if a column
// vanishes after the step.
ExcitationSet excitation_retract(const ExcitationSet& base, const Matrix& static_dir,
                                 const Matrix& dynamic_dir, double step);

// ---------------------------------------------------------------------------
// Product manifold point: one GSM per degree-of-freedom class plus the
// excitation factors.
// ---------------------------------------------------------------------------

struct DesignPoint {
  std::vector<Gsm> class_gsms;
  ExcitationSet excitation;

  int n_classes() const { return static_cast<int>(class_gsms.size()); }
};

// Ambient-shaped mirror of a DesignPoint; used both for tangent vectors and
// for Euclidean gradients.
struct TangentVector {
  std::vector<Matrix> gsm_parts;
  Matrix static_part;
  Matrix dynamic_part;

  static TangentVector zeros_like(const DesignPoint& x);
};

double inner(const TangentVector& a, const TangentVector& b);
double norm(const TangentVector& a);
TangentVector scaled(const TangentVector& a, double factor);
TangentVector add(const TangentVector& a, const TangentVector& b, double factor_b = 1.0);

// Componentwise tangent projection at x.
TangentVector project_tangent(const DesignPoint& x, const TangentVector& ambient);

// Euclidean-to-Riemannian gradient conversion (projection under the
// real-trace metric).
TangentVector riemannian_gradient(const DesignPoint& x, const TangentVector& egrad);

// Componentwise retraction.
DesignPoint retract(const DesignPoint& x, const TangentVector& direction, double step);

// Largest constraint violation over all components of x.
double manifold_defect(const DesignPoint& x);

// Seed-controlled random design point (random class GSMs, uniform excitation).
DesignPoint random_design_point(int n_classes, int n_modes, int n_ports, int rows,
                                int cols, int states, std::uint64_t seed);

}  // namespace arraysynth

#endif
