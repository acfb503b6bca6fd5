#ifndef ARRAYSYNTH_COUPLING_HPP
#define ARRAYSYNTH_COUPLING_HPP

#include <Eigen/Dense>
#include <Eigen/LU>
#include <string>
#include <vector>

#include "arraysynth/gsm.hpp"

namespace arraysynth {

/// Global modal coupling matrix: a K x K grid of N x N blocks with zero
/// diagonal blocks. Block (k, l) maps outgoing modal coefficients of element
/// l to incident coefficients at element k.
class CouplingMatrix {
public:
  CouplingMatrix(Matrix blocks, int n_elements, int n_modes,
                 bool validate_reciprocity = true);

  int n_elements() const { return n_elements_; }
  int n_modes() const { return n_modes_; }
  int dim() const { return n_elements_ * n_modes_; }

  const Matrix& full() const { return blocks_; }

  Eigen::Block<const Matrix> block(int k, int l) const {
    return blocks_.block(k * n_modes_, l * n_modes_, n_modes_, n_modes_);
  }

  // Largest deviation from G^(l,k) = G^(k,l)^T over all block pairs.
  double reciprocity_defect() const;

  static CouplingMatrix zero(int n_elements, int n_modes);

private:
  Matrix blocks_;  // KN x KN
  int n_elements_;
  int n_modes_;
};

/// Maps each array element to a degree-of-freedom class (1-based class ids).
struct DofAssignment {
  std::vector<int> class_of;  // length K, values in 1..n_classes
  int rows = 0;
  int cols = 0;
  int n_classes = 0;
  std::string strategy;

  int n_elements() const { return static_cast<int>(class_of.size()); }
  void validate() const;
};

// Expands class GSMs to the per-element list through the assignment.
std::vector<Gsm> assemble_element_gsms(const DofAssignment& assignment,
                                       const std::vector<Gsm>& class_gsms);

struct CoupledSolution {
  Matrix outgoing_modal;  // f, KN x S
  Matrix incident_modal;  // a, KN x S
  Matrix outgoing_port;   // w, KP x S
};

/// Direct solver for the coupled GSM system
///   (I - (Sbar - I) G) f = Tbar v,   a = G f,   w = Rbar a + Gammabar v.
/// The factorization is computed once and may be reused for any number of
/// right-hand sides; instances are immutable after construction.
class CoupledSystem {
public:
  CoupledSystem(const std::vector<Gsm>& element_gsms, const CouplingMatrix& coupling);

  int n_elements() const { return n_elements_; }
  int n_modes() const { return n_modes_; }
  int n_ports() const { return n_ports_; }

  CoupledSolution solve(const Matrix& port_waves) const;

  // f only (skips a and w).
  Matrix solve_outgoing(const Matrix& port_waves) const;

  // Adjoint solve y = (I - (Sbar - I) G)^-H rhs; used for gradients.
  Matrix solve_adjoint(const Matrix& rhs) const;

  const Matrix& coupling_full() const { return *coupling_; }
  const Matrix& transmit_blockdiag() const { return tbar_; }

private:
  int n_elements_;
  int n_modes_;
  int n_ports_;
  const Matrix* coupling_;  // borrowed KN x KN view; owner must outlive this
  Matrix system_;           // I - (Sbar - I) G
  Matrix tbar_;             // KN x KP
  Matrix rbar_;             // KP x KN
  Matrix gammabar_;         // KP x KP
  Eigen::PartialPivLU<Matrix> lu_;
};

// One-shot convenience wrapper around CoupledSystem.
CoupledSolution solve_coupled(const std::vector<Gsm>& element_gsms,
                              const CouplingMatrix& coupling, const Matrix& port_waves);

// Shifts the port reference plane of one element by chi radians:
// T -> T e^{j chi}, R -> R e^{j chi}, Gamma -> Gamma e^{j 2 chi},
// v -> v e^{-j chi}. Leaves the coupled modal response unchanged.
std::pair<Gsm, Matrix> apply_phase_shift(const Gsm& gsm, const Matrix& port_waves,
                                         double chi);

}  // namespace arraysynth

#endif
