#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arraysynth/coupling.hpp"
#include "arraysynth/errors.hpp"
#include "arraysynth/manifold.hpp"
#include "arraysynth/realization.hpp"

using namespace arraysynth;

namespace {

const Matrix kOpen = Matrix::Identity(1, 1);

Gsm random_element(std::uint64_t seed) { return Gsm(us_random(3, seed), 2, 1); }

RealizationTarget plain_target(const Gsm& gsm, const Matrix& gamma_load) {
  // Target without a reference-plane shift (chi* = 0).
  RealizationTarget t;
  const Matrix s0 = terminate(gsm, gamma_load);
  const TerminatedEig eig = eig_terminated(s0);
  t.eigenvalues = eig.lambdas.real();
  t.modal_transform = eig.modal_transform;
  t.transmit_eig = eig.modal_transform.transpose() * gsm.transmission();
  t.port_reflection = gsm.port_scattering();
  t.gamma_load = gamma_load;
  t.target_entries = gsm.entries();
  t.n_modes = gsm.n_modes();
  t.n_ports = gsm.n_ports();
  return t;
}

}  // namespace

TEST_SUITE("realization") {

TEST_CASE("lambda map convention") {
  CHECK(std::abs(scattering_from_lambda(Complex(0.0, 0.0)) - Complex(-1.0, 0.0)) <=
        1e-15);
  CHECK(std::abs(lambda_from_scattering(Complex(-1.0, 0.0))) <= 1e-15);
  // Round trip over a few values.
  for (double l : {-3.0, -1.0, 0.0, 0.4, 2.5}) {
    const Complex s = scattering_from_lambda(Complex(l, 0.0));
    CHECK(std::abs(s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lambda_from_scattering(s).real() == doctest::Approx(l).epsilon(1e-12));
  }
}

TEST_CASE("termination with decoupled ports returns the scattering block") {
  Matrix psi = Matrix::Zero(3, 3);
  psi.block(0, 0, 2, 2) = us_random(2, 5);
  psi(2, 2) = std::polar(1.0, 0.7);
  const Gsm gsm(psi, 2, 1);
  const Matrix s0 = terminate(gsm, kOpen);
  CHECK((s0 - gsm.scattering()).norm() <= 1e-15);
}

TEST_CASE("termination at the port resonance is rejected") {
  const Gsm gsm = random_element(9);
  CHECK_THROWS_AS(terminate(gsm, Matrix(gsm.port_scattering())),
                  resonant_termination_error);
}

TEST_CASE("open-circuit termination of lossless elements is unitary symmetric") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Gsm gsm = random_element(100 + seed);
    const Matrix s0 = terminate(gsm, kOpen);
    CHECK(unitarity_defect(s0) <= 1e-10);
    CHECK(symmetry_defect(s0) <= 1e-10);
    const TerminatedEig eig = eig_terminated(s0);
    CHECK(eig.lambdas.imag().cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("eigendecomposition of -I gives zero eigenvalues and identity transform") {
  const Matrix s0 = -Matrix::Identity(2, 2);
  const TerminatedEig eig = eig_terminated(s0);
  CHECK(eig.lambdas.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((eig.modal_transform - Matrix::Identity(2, 2)).norm() <= 1e-15);
}

TEST_CASE("eigendecomposition inverts the lambda map on a diagonal case") {
  Matrix s0 = Matrix::Zero(2, 2);
  s0(0, 0) = -(Complex(1.0, -1.0)) / Complex(1.0, 1.0);
  s0(1, 1) = -(Complex(1.0, 1.0)) / Complex(1.0, -1.0);
  const TerminatedEig eig = eig_terminated(s0);
  // ordering: descending |lambda| with |1| = |-1| resolved by first-component
  // phase; both vectors are standard basis vectors with zero phase, so the
  // stable order keeps lambda = (1, -1).
  CHECK(eig.lambdas(0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.lambdas(1).real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("eigendecomposition reconstructs random terminated matrices") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix s0 = terminate(random_element(200 + seed), kOpen);
    const TerminatedEig eig = eig_terminated(s0);
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = eig.scattering_eigenvalues(0);
    diag(1, 1) = eig.scattering_eigenvalues(1);
    const Matrix rebuilt = eig.modal_transform * diag *
                           eig.modal_transform.completeOrthogonalDecomposition()
                               .pseudoInverse();
    CHECK((rebuilt - s0).norm() <= 1e-10);
    CHECK(std::abs(std::abs(eig.modal_transform.determinant()) - 1.0) <= 1e-6);
  }
}

TEST_CASE("defective matrices are rejected") {
  Matrix jordan(2, 2);
  jordan << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(eig_terminated(jordan), nondiagonalizable_error);
}

TEST_CASE("chi sweep on a flat case flags the degeneracy") {
  Matrix psi = Matrix::Zero(3, 3);
  psi.block(0, 0, 2, 2) = us_random(2, 77);
  psi(2, 2) = std::polar(1.0, -1.1);
  const Gsm gsm(psi, 2, 1);  // T = 0: eigenvalues cannot depend on chi
  const ChiSweepResult sweep = chi_sweep(gsm, kOpen, default_chi_grid());
  CHECK(sweep.flat_sweep);
  CHECK(!sweep.pole_proximity);
  const auto& first = sweep.records.front();
  for (const auto& rec : sweep.records) {
    REQUIRE(rec.valid);
    CHECK(rec.lambdas[0] == doctest::Approx(first.lambdas[0]).epsilon(1e-9));
    CHECK(rec.lambdas[1] == doctest::Approx(first.lambdas[1]).epsilon(1e-9));
  }
}

TEST_CASE("chi star sits ninety degrees past the worst point on the grid") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Gsm gsm = random_element(300 + seed);
    const ChiSweepResult sweep = chi_sweep(gsm, kOpen, default_chi_grid());
    const double diff = std::fmod(sweep.chi_star_deg - sweep.chi_max_deg + 360.0, 180.0);
    CHECK(diff == doctest::Approx(90.0).epsilon(1e-12));
    // The selected point is never the worst one.
    double lambda_star = 0.0, lambda_max = 0.0;
    for (const auto& rec : sweep.records) {
      if (rec.chi_deg == sweep.chi_star_deg) lambda_star = rec.lambda_bar;
      if (rec.chi_deg == sweep.chi_max_deg) lambda_max = rec.lambda_bar;
    }
    CHECK(lambda_star <= lambda_max + 1e-12);
  }
}

TEST_CASE("chi sweep far-field invariance against the coupled solver") {
  // Shifting reference planes of every element leaves f unchanged for any chi
  // in the sweep grid (checked through the solver on a small coupled array).
  std::vector<Gsm> gsms;
  for (std::uint64_t k = 0; k < 2; ++k) gsms.push_back(random_element(400 + k));
  Matrix g = Matrix::Zero(4, 4);
  g.block(0, 2, 2, 2) << Complex(0.05, 0.02), Complex(0.01, -0.01),
      Complex(0.02, 0.0), Complex(0.04, 0.03);
  g.block(2, 0, 2, 2) = g.block(0, 2, 2, 2).transpose();
  const CouplingMatrix coupling(g, 2, 2);
  const Matrix v = Matrix::Random(2, 1);
  const Matrix f_ref = solve_coupled(gsms, coupling, v).outgoing_modal;

  for (double chi_deg : {0.0, 31.0, 90.0, 154.0}) {
    const double chi = chi_deg * std::numbers::pi / 180.0;
    std::vector<Gsm> shifted;
    Matrix v2 = v;
    for (std::size_t k = 0; k < gsms.size(); ++k) {
      auto [s, vrow] = apply_phase_shift(gsms[k], v.row(Eigen::Index(k)), chi);
      shifted.push_back(s);
      v2.row(Eigen::Index(k)) = vrow;
    }
    const Matrix f = solve_coupled(shifted, coupling, v2).outgoing_modal;
    CHECK((f - f_ref).norm() <= 1e-12 * (1.0 + f_ref.norm()));
  }
}

TEST_CASE("backtransform with identity transform and no port coupling") {
  Eigen::VectorXd lambdas(2);
  lambdas << 0.5, -0.25;
  const Matrix q = Matrix::Identity(2, 2);
  const Matrix t_eig = Matrix::Zero(2, 1);
  const Matrix r_eig = Matrix::Zero(1, 2);
  const Matrix gamma = 0.3 * Matrix::Identity(1, 1);
  const Gsm psi = backtransform_gsm(lambdas, q, t_eig, r_eig, gamma, kOpen);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(psi.scattering()(i, i) - scattering_from_lambda(lambdas(i))) <=
          1e-14);
  }
  CHECK(psi.scattering()(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("terminate, eigendecompose, backtransform round trip") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Gsm gsm = random_element(500 + seed);
    const RealizationTarget target = plain_target(gsm, kOpen);
    const Gsm rebuilt = backtransform_gsm(
        target.eigenvalues, target.modal_transform, target.transmit_eig,
        target.transmit_eig.transpose(), target.port_reflection, target.gamma_load);
    CHECK(rebuilt.unitarity_defect() <= 1e-9);
    CHECK(rebuilt.symmetry_defect() <= 1e-9);
    const Matrix s0_ref = terminate(gsm, kOpen);
    const Matrix s0_new = terminate(rebuilt, kOpen);
    CHECK((s0_new - s0_ref).norm() <= 1e-10);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("toy element fit recovers the rotation formula") {
  SUBCASE("identity transform gives zero rotation") {
    const Gsm gsm = random_element(31);
    RealizationTarget t = plain_target(gsm, kOpen);
    t.modal_transform = Matrix::Identity(2, 2);
    t.transmit_eig = gsm.transmission();
    const ToyElementFit fit = fit_toy_element(t);
    CHECK(fit.rotation_raw_deg == 0.0);
  }
  SUBCASE("a thirty-degree rotation matrix maps to minus thirty") {
    const Gsm gsm = random_element(32);
    RealizationTarget t = plain_target(gsm, kOpen);
    const double a = 30.0 * std::numbers::pi / 180.0;
    Matrix q(2, 2);
    q << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
    t.modal_transform = q;
    const ToyElementFit fit = fit_toy_element(t);
    CHECK(fit.rotation_raw_deg == doctest::Approx(-30.0).epsilon(1e-10));
    CHECK(fit.rotation_deg == doctest::Approx(-30.0).epsilon(1e-10));
  }
  SUBCASE("complex transform is rejected as infeasible") {
    const Gsm gsm = random_element(33);
    RealizationTarget t = plain_target(gsm, kOpen);
    t.modal_transform = Complex(0.0, 1.0) * Matrix::Identity(2, 2);
    t.modal_transform(0, 0) = Complex(0.6, 0.8);
    CHECK_THROWS_AS(fit_toy_element(t), fit_infeasible_error);
  }
}

TEST_CASE("forward-generated targets are fitted within the snap bound") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Gsm gsm = random_element(700 + seed);
    const RealizationTarget target = plain_target(gsm, kOpen);

    // With snapping effectively disabled the fit reproduces the generator.
    const SnapGrid fine{1e-9, 1e-9};
    const ToyElementFit exact_fit = fit_toy_element(target, fine);
    CHECK(exact_fit.gsm_residual <= 1e-6);

    // Default snapping moves the parameters by at most half a grid step, and
    // the reported residual obeys the triangle bound through the raw rebuild.
    const ToyElementFit fit = fit_toy_element(target);
    CHECK((fit.lambdas - fit.lambdas_raw).cwiseAbs().maxCoeff() <= 0.05 + 1e-12);
    CHECK(std::abs(fit.rotation_deg - fit.rotation_raw_deg) <= 0.5 + 1e-12);

    const Gsm raw_rebuild = backtransform_gsm(
        fit.lambdas_raw, target.modal_transform, target.transmit_eig,
        target.transmit_eig.transpose(), target.port_reflection, target.gamma_load);
    const double raw_residual = (raw_rebuild.entries() - target.target_entries).norm();
    CHECK(raw_residual <= 1e-8);
    const double snap_bound =
        raw_residual + (fit.achieved_entries - raw_rebuild.entries()).norm();
    CHECK(fit.gsm_residual <= snap_bound + 1e-12);
  }
}

TEST_CASE("realization target of a chi sweep reproduces the shifted element") {
  const Gsm gsm = random_element(900);
  const ChiSweepResult sweep = chi_sweep(gsm, kOpen, default_chi_grid());
  const RealizationTarget target = make_realization_target(gsm, kOpen, sweep);
  CHECK(target.chi_star_deg == sweep.chi_star_deg);
  // target entries really are the chi-shifted GSM
  const double chi = sweep.chi_star_deg * std::numbers::pi / 180.0;
  const auto [shifted, unused] =
      apply_phase_shift(gsm, Matrix::Zero(1, 0), chi);
  CHECK((target.target_entries - shifted.entries()).norm() <= 1e-14);
  // and the eigen data matches a direct termination of the shifted element
  const Matrix s0 = terminate(shifted, kOpen);
  const TerminatedEig eig = eig_terminated(s0);
  CHECK((target.eigenvalues - eig.lambdas.real()).cwiseAbs().maxCoeff() <= 1e-10);
}

}  // TEST_SUITE
