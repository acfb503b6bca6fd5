#ifndef ARRAYSYNTH_GSM_HPP
#define ARRAYSYNTH_GSM_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace arraysynth {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Generalized scattering matrix of one element: an (N+P)x(N+P) unitary
/// symmetric matrix partitioned into a modal scattering block (NxN), a
/// transmission block (NxP), a receive block (PxN) and a port scattering
/// block (PxP).
class Gsm {
public:
  Gsm(Matrix entries, int n_modes, int n_ports);

  int n_modes() const { return n_modes_; }
  int n_ports() const { return n_ports_; }
  int dim() const { return n_modes_ + n_ports_; }

  const Matrix& entries() const { return entries_; }

  // Block views (S, T, R, Gamma).
  Eigen::Block<const Matrix> scattering() const {
    return entries_.block(0, 0, n_modes_, n_modes_);
  }
  Eigen::Block<const Matrix> transmission() const {
    return entries_.block(0, n_modes_, n_modes_, n_ports_);
  }
  Eigen::Block<const Matrix> receive() const {
    return entries_.block(n_modes_, 0, n_ports_, n_modes_);
  }
  Eigen::Block<const Matrix> port_scattering() const {
    return entries_.block(n_modes_, n_modes_, n_ports_, n_ports_);
  }

  double unitarity_defect() const;  // ||Psi^H Psi - I||_F
  double symmetry_defect() const;   // ||Psi - Psi^T||_F

private:
  Matrix entries_;
  int n_modes_;
  int n_ports_;
};

// Defects of a plain matrix against the unitary-symmetric constraints.
double unitarity_defect(const Matrix& m);
double symmetry_defect(const Matrix& m);

}  // namespace arraysynth

#endif
