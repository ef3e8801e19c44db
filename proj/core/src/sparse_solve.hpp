#pragma once

#include <Eigen/Sparse>

namespace curlcurl::detail
{

struct SparseSolveResult
{
  Eigen::VectorXd x;
  /// ||A x - b|| / ||b|| (absolute if b = 0).
  double residual = 0.0;
};

/// Solves A x = b for a structurally symmetric A with UMFPACK. If the result misses a relative residual of
/// 1e-8 the system is refactored with Eigen's SparseLU and the better solution
/// is kept; some BLAS kernels return wrong results on CPUs they misdetect.
/// Throws SolverError if both factorizations fail.
SparseSolveResult sparse_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                               const char* what);

} // namespace curlcurl::detail
