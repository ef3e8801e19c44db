#pragma once

#include "curlcurl/dof_space.hpp"

#include <cstdint>
#include <vector>

namespace curlcurl
{

/// min ||h - chi|| over a conforming Nedelec space subject to curl h = target
/// and prescribed values of some dofs.
///
/// The curl constraint is imposed with a Raviart-Thomas multiplier whose
/// normal trace vanishes on `normal_zero_faces`, and the divergence of that
/// multiplier with a broken P_p multiplier. Fixed dofs keep the values found
/// in the coefficient vector.
struct CurlConstrainedProblem
{
  std::shared_ptr<const DofSpace> nedelec;
  /// Support positions of `nedelec` taking part; all cells if empty.
  std::vector<int> cells;
  /// Per dof of `nedelec`: nonzero if the value is prescribed. Empty means none.
  std::vector<std::uint8_t> fixed;
  /// Faces (mesh ids) where the multiplier space has zero normal trace.
  std::vector<int> normal_zero_faces;
  CellVectorFn target;
  CellVectorFn chi;
  /// Quadrature degree; 2p + 2 if negative.
  int quad_degree = -1;
};

struct CurlConstrainedResult
{
  /// ||h - chi|| over the participating cells.
  double objective = 0.0;
  /// ||curl h - target|| over the participating cells.
  double curl_residual = 0.0;
  /// ||target|| over the participating cells.
  double target_norm = 0.0;
  /// Relative residual of the linear system.
  double kkt_residual = 0.0;
  int free_dofs = 0;
  /// Raviart-Thomas multiplier dofs (curl constraints before the divergence constraint).
  int curl_multipliers = 0;
  /// Broken P_p multiplier dofs.
  int div_multipliers = 0;
};

/// Solves the problem, writing the free dofs of the participating cells into
/// `coeffs` (length nedelec->size()). Throws SolverError on factorization
/// failure.
CurlConstrainedResult minimize_curl_constrained(const CurlConstrainedProblem& problem,
                                                Eigen::VectorXd& coeffs);

/// L2 norm of (f - g) over the given cells of a space's support.
double cell_distance(const Mesh& mesh, const std::vector<int>& tets, const CellVectorFn& f,
                     const CellVectorFn& g, int quad_degree);
/// L2 norm of f over the given cells.
double cell_norm(const Mesh& mesh, const std::vector<int>& tets, const CellVectorFn& f,
                 int quad_degree);

} // namespace curlcurl
