#pragma once

#include "curlcurl/dof_space.hpp"

#include <memory>
#include <vector>

namespace curlcurl
{

/// Curl-curl problem with gauge condition on a tagged mesh.
///
/// Dirichlet faces carry a zero tangential trace, Neumann faces a zero
/// tangential trace of the curl. The domain is assumed simply connected with
/// connected Dirichlet boundary.
struct CurlCurlProblem
{
  const Mesh* mesh = nullptr;
  int degree = 0;
  VectorFunction source;
  /// Optional; used only for error reporting.
  VectorFunction exact_solution;
  VectorFunction exact_curl;
  double c_l = 1.0;
  int threads = 1;
};

struct GlobalSolution
{
  /// Conforming N_p field with zero tangential trace on Dirichlet faces.
  DiscreteField a_h;
  /// Gauge multiplier in the conforming P_{p+1} space (zero on Dirichlet faces).
  DiscreteField multiplier;
  /// ||K a + B^T phi - f|| / ||f|| over the free rows.
  double galerkin_residual = 0.0;
  /// max_q |(A_h, grad s_q)| / (||A_h|| ||grad s_q||).
  double gauge_residual = 0.0;
  /// Number of Nedelec dofs including eliminated boundary dofs.
  int num_dofs = 0;
  int num_free_dofs = 0;
  int num_multipliers = 0;
};

/// Assembles and solves the saddle-point system with a sparse direct solver.
/// Throws SolverError if the factorization fails.
GlobalSolution solve(const CurlCurlProblem& problem);

struct EnergyError
{
  /// ||curl(A - A_h)||_Omega.
  double global = 0.0;
  std::vector<double> per_tet;
  /// ||curl(A - A_h)||_{omega_e}.
  std::vector<double> per_edge;
  /// ||curl A||_Omega.
  double exact_norm = 0.0;
};

/// Curl error against an exact curl, by quadrature of the given degree
/// (2p + 6 if negative).
EnergyError energy_error(const DiscreteField& a_h, const VectorFunction& exact_curl,
                         int quad_degree = -1, int threads = 1);

} // namespace curlcurl
