#include "arraysynth/gsm.hpp"

#include "arraysynth/errors.hpp"

namespace arraysynth {

double unitarity_defect(const Matrix& m) {
  const auto n = m.rows();
  return (m.adjoint() * m - Matrix::Identity(n, n)).norm();
}

double symmetry_defect(const Matrix& m) {
  return (m - m.transpose()).norm();
}

Gsm::Gsm(Matrix entries, int n_modes, int n_ports)
    : entries_(std::move(entries)), n_modes_(n_modes), n_ports_(n_ports) {
  if (n_modes_ < 1 || n_ports_ < 0) {
    throw dimension_error("Gsm: need n_modes >= 1 and n_ports >= 0");
  }
  const int n = n_modes_ + n_ports_;
  if (entries_.rows() != n || entries_.cols() != n) {
    throw dimension_error("Gsm: entries must be (N+P)x(N+P)");
  }
  if (!entries_.allFinite()) {
    throw invalid_input_error("Gsm: non-finite entries");
  }
}

double Gsm::unitarity_defect() const { return arraysynth::unitarity_defect(entries_); }

double Gsm::symmetry_defect() const { return arraysynth::symmetry_defect(entries_); }

}  // namespace arraysynth
