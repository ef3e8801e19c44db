#include "curlcurl/cases.hpp"
#include "curlcurl/equilibration.hpp"
#include "curlcurl/global_solver.hpp"
#include "curlcurl/oracles.hpp"
#include "curlcurl/quadrature.hpp"
#include "curlcurl/runner.hpp"
#include "curlcurl/shape_functions.hpp"

#include <benchmark/benchmark.h>

using namespace curlcurl;

namespace
{

void basis_eval_nedelec(benchmark::State& state)
{
  const int p = static_cast<int>(state.range(0));
  const Mesh mesh = generate_cube(1, BoundaryTag::Neumann);
  const TetGeometry g = mesh.geometry(0);
  const auto& basis = ReferenceBasis::get(Family::Nedelec, p);
  const auto& rule = tet_quadrature(2 * p + 2);
  BasisValues values;
  for (auto _ : state)
  {
    basis_eval(basis, g, rule.points, values);
    benchmark::DoNotOptimize(values.values.data());
  }
  state.SetItemsProcessed(state.iterations() * rule.size());
}
BENCHMARK(basis_eval_nedelec)->DenseRange(0, 4);

void patch_equilibration(benchmark::State& state)
{
  const int p = static_cast<int>(state.range(0));
  const bool sweep = state.range(1) != 0;
  const Mesh mesh = generate_cube(2, BoundaryTag::Neumann);
  const EdgePatch patch = edge_patch(mesh, central_interior_edge(mesh));
  const PatchData data = random_patch_data(mesh, patch, p, TestFamily::RandomBroken, 0);
  for (auto _ : state)
  {
    const PatchFlux f = sweep ? sweep_equilibrate(mesh, patch, p, data.j_h, data.chi)
                              : patch_equilibrate(mesh, patch, p, data.j_h, data.chi);
    benchmark::DoNotOptimize(f.eta);
  }
}
BENCHMARK(patch_equilibration)->ArgsProduct({{0, 1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void global_solve(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const Mesh mesh = generate_cube(n, BoundaryTag::Neumann);
  const ManufacturedSolution sol = cube_smooth_solution();
  CurlCurlProblem prob;
  prob.mesh = &mesh;
  prob.degree = p;
  prob.source = sol.source;
  prob.threads = 1;
  for (auto _ : state)
  {
    const GlobalSolution s = solve(prob);
    benchmark::DoNotOptimize(s.galerkin_residual);
  }
}
BENCHMARK(global_solve)->Args({2, 1})->Args({4, 0})->Args({4, 1})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
