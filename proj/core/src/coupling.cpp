#include "arraysynth/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "arraysynth/errors.hpp"

namespace arraysynth {

CouplingMatrix::CouplingMatrix(Matrix blocks, int n_elements, int n_modes,
                               bool validate_reciprocity)
    : blocks_(std::move(blocks)), n_elements_(n_elements), n_modes_(n_modes) {
  if (n_elements_ < 1 || n_modes_ < 1) {
    throw dimension_error("CouplingMatrix: need K >= 1 and N >= 1");
  }
  const int dim = n_elements_ * n_modes_;
  if (blocks_.rows() != dim || blocks_.cols() != dim) {
    throw dimension_error("CouplingMatrix: blocks must be KN x KN");
  }
  if (!blocks_.allFinite()) {
    throw invalid_input_error("CouplingMatrix: non-finite entries");
  }
  for (int k = 0; k < n_elements_; ++k) {
    if (block(k, k).cwiseAbs().maxCoeff() != 0.0) {
      throw validation_error("CouplingMatrix: diagonal blocks must be exactly zero");
    }
  }
  if (validate_reciprocity && reciprocity_defect() > 1e-12) {
    throw validation_error("CouplingMatrix: reciprocity violated beyond 1e-12");
  }
}

double CouplingMatrix::reciprocity_defect() const {
  double worst = 0.0;
  for (int k = 0; k < n_elements_; ++k) {
    for (int l = k + 1; l < n_elements_; ++l) {
      const double d = (block(l, k) - block(k, l).transpose()).cwiseAbs().maxCoeff();
      worst = std::max(worst, d);
    }
  }
  return worst;
}

CouplingMatrix CouplingMatrix::zero(int n_elements, int n_modes) {
  return CouplingMatrix(Matrix::Zero(n_elements * n_modes, n_elements * n_modes),
                        n_elements, n_modes);
}

void DofAssignment::validate() const {
  if (rows < 1 || cols < 1 || n_elements() != rows * cols) {
    throw validation_error("DofAssignment: length must equal rows*cols");
  }
  if (n_classes < 1) throw validation_error("DofAssignment: need at least one class");
  std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
  for (int d : class_of) {
    if (d < 1 || d > n_classes) {
      throw assignment_error("DofAssignment: class index out of range");
    }
    seen[static_cast<std::size_t>(d - 1)] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw validation_error("DofAssignment: every class must be used at least once");
  }
}

std::vector<Gsm> assemble_element_gsms(const DofAssignment& assignment,
                                       const std::vector<Gsm>& class_gsms) {
  const int n_classes = static_cast<int>(class_gsms.size());
  std::vector<Gsm> out;
  out.reserve(assignment.class_of.size());
  for (int d : assignment.class_of) {
    if (d < 1 || d > n_classes) {
      throw assignment_error("assemble_element_gsms: class index " + std::to_string(d) +
                             " outside 1.." + std::to_string(n_classes));
    }
    out.push_back(class_gsms[static_cast<std::size_t>(d - 1)]);
  }
  return out;
}

CoupledSystem::CoupledSystem(const std::vector<Gsm>& element_gsms,
                             const CouplingMatrix& coupling)
    : n_elements_(coupling.n_elements()),
      n_modes_(coupling.n_modes()),
      coupling_(&coupling.full()) {
  if (static_cast<int>(element_gsms.size()) != n_elements_) {
    throw dimension_error("CoupledSystem: element count mismatch");
  }
  n_ports_ = element_gsms.front().n_ports();
  for (const auto& g : element_gsms) {
    if (g.n_modes() != n_modes_ || g.n_ports() != n_ports_) {
      throw dimension_error("CoupledSystem: inconsistent element dimensions");
    }
  }
  const int nm = n_elements_ * n_modes_;
  const int np = n_elements_ * n_ports_;
  tbar_ = Matrix::Zero(nm, np);
  rbar_ = Matrix::Zero(np, nm);
  gammabar_ = Matrix::Zero(np, np);
  // (Sbar - I) is block diagonal, so the system matrix assembles by scaling
  // block rows of G instead of a dense KN x KN product.
  system_.resize(nm, nm);
  for (int k = 0; k < n_elements_; ++k) {
    const auto& g = element_gsms[static_cast<std::size_t>(k)];
    tbar_.block(k * n_modes_, k * n_ports_, n_modes_, n_ports_) = g.transmission();
    rbar_.block(k * n_ports_, k * n_modes_, n_ports_, n_modes_) = g.receive();
    gammabar_.block(k * n_ports_, k * n_ports_, n_ports_, n_ports_) = g.port_scattering();
    system_.middleRows(k * n_modes_, n_modes_).noalias() =
        (Matrix::Identity(n_modes_, n_modes_) - g.scattering()) *
        coupling_->middleRows(k * n_modes_, n_modes_);
  }
  system_ += Matrix::Identity(nm, nm);
  lu_.compute(system_);
  const double rcond = lu_.rcond();
  if (!lu_.matrixLU().allFinite() || !std::isfinite(rcond) || rcond < 1e-12) {
    throw resonant_coupling_error("CoupledSystem: system matrix is singular");
  }
}

Matrix CoupledSystem::solve_outgoing(const Matrix& port_waves) const {
  if (port_waves.rows() != n_elements_ * n_ports_) {
    throw dimension_error("CoupledSystem: port wave rows must equal K*P");
  }
  if (!port_waves.allFinite()) {
    throw invalid_input_error("CoupledSystem: non-finite port waves");
  }
  return lu_.solve(tbar_ * port_waves);
}

Matrix CoupledSystem::solve_adjoint(const Matrix& rhs) const {
  return lu_.adjoint().solve(rhs);
}

CoupledSolution CoupledSystem::solve(const Matrix& port_waves) const {
  CoupledSolution sol;
  sol.outgoing_modal = solve_outgoing(port_waves);
  sol.incident_modal = (*coupling_) * sol.outgoing_modal;
  sol.outgoing_port = rbar_ * sol.incident_modal + gammabar_ * port_waves;
  return sol;
}

CoupledSolution solve_coupled(const std::vector<Gsm>& element_gsms,
                              const CouplingMatrix& coupling, const Matrix& port_waves) {
  return CoupledSystem(element_gsms, coupling).solve(port_waves);
}

std::pair<Gsm, Matrix> apply_phase_shift(const Gsm& gsm, const Matrix& port_waves,
                                         double chi) {
  const Complex shift = std::polar(1.0, chi);
  const int n = gsm.n_modes();
  const int p = gsm.n_ports();
  Matrix m = gsm.entries();
  m.block(0, n, n, p) *= shift;          // T
  m.block(n, 0, p, n) *= shift;          // R
  m.block(n, n, p, p) *= shift * shift;  // Gamma
  return {Gsm(std::move(m), n, p), port_waves * std::conj(shift)};
}

}  // namespace arraysynth
