#include <benchmark/benchmark.h>

#include "arraysynth/manifold.hpp"
#include "arraysynth/optimizer.hpp"
#include "arraysynth/toy_em.hpp"

namespace {

using namespace arraysynth;

void BM_UsRetract(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix base = us_random(n, 7);
  const Matrix dir = us_project_tangent(base, us_random(n, 8));
  for (auto _ : state) {
    benchmark::DoNotOptimize(us_retract(base, dir, 0.1));
  }
}
BENCHMARK(BM_UsRetract)->Arg(3)->Arg(8);

void BM_CouplingAssembly(benchmark::State& state) {
  ArrayModel model;
  model.rows = static_cast<int>(state.range(0));
  model.cols = static_cast<int>(state.range(0));
  const auto mode = state.range(1) == 0 ? CouplingAssembly::direct
                                        : CouplingAssembly::toeplitz;
  for (auto _ : state) {
    benchmark::DoNotOptimize(coupling_matrix(model, mode));
  }
}
BENCHMARK(BM_CouplingAssembly)->Args({8, 0})->Args({8, 1});

void BM_CoupledSolve(benchmark::State& state) {
  ArrayModel model;
  model.rows = static_cast<int>(state.range(0));
  model.cols = static_cast<int>(state.range(0));
  const CouplingMatrix g = coupling_matrix(model);
  std::vector<Gsm> gsms;
  for (int k = 0; k < model.n_elements(); ++k) {
    gsms.emplace_back(us_random(3, 11), 2, 1);
  }
  const Matrix v = Matrix::Random(model.n_elements(), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_coupled(gsms, g, v));
  }
}
BENCHMARK(BM_CoupledSolve)->Arg(4)->Arg(8);

void BM_CostAndGradient(benchmark::State& state) {
  ArrayModel model;
  model.rows = 4;
  model.cols = 4;
  const CouplingMatrix g = coupling_matrix(model);
  const ModalFarFieldSet fields = build_far_field_set(model);
  const DofAssignment assignment = dof_strategy(DofStrategy::PointSymmetry, 4, 4);
  const auto beams = make_beam_table({-30.0, 0.0, 30.0}, -15.0, -30.0, 35.0);
  const SynthesisProblem problem(g, assignment, fields, beams);
  const DesignPoint x = random_design_point(assignment.n_classes, 2, 1, 4, 4,
                                            problem.n_states(), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(problem.evaluate_cost(x, 1.0));
    benchmark::DoNotOptimize(problem.euclidean_gradient(x, 1.0));
  }
}
BENCHMARK(BM_CostAndGradient);

}  // namespace

BENCHMARK_MAIN();
