#include "sparse_solve.hpp"

#include "curlcurl/types.hpp"

#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>

#include <string>

namespace curlcurl::detail
{

namespace
{

constexpr double kAcceptResidual = 1e-8;
/// Systems at least this large try several fill-reducing orderings.
constexpr Eigen::Index kBestOrderingSize = 10000;

double relative_residual(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b)
{
  const double bn = b.norm();
  return (a * x - b).norm() / (bn > 0.0 ? bn : 1.0);
}

} // namespace

SparseSolveResult sparse_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                               const char* what)
{
  SparseSolveResult best;
  if (a.rows() == 0)
  {
    best.x = Eigen::VectorXd(0);
    best.residual = 0.0;
    return best;
  }
  best.residual = -1.0;
  {
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
    // All systems here are symmetric saddle-point matrices.
    lu.umfpackControl()[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    if (a.rows() >= kBestOrderingSize)
      lu.umfpackControl()[UMFPACK_ORDERING] = UMFPACK_ORDERING_BEST;
    lu.compute(a);
    if (lu.info() == Eigen::Success)
    {
      Eigen::VectorXd x = lu.solve(b);
      if (lu.info() == Eigen::Success && x.allFinite())
      {
        best.residual = relative_residual(a, x, b);
        best.x = std::move(x);
        if (best.residual <= kAcceptResidual)
          return best;
      }
    }
  }
  Eigen::SparseMatrix<double> colmajor = a;
  colmajor.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(colmajor);
  if (lu.info() == Eigen::Success)
  {
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() == Eigen::Success && x.allFinite())
    {
      const double r = relative_residual(a, x, b);
      if (best.residual < 0.0 || r < best.residual)
      {
        best.residual = r;
        best.x = std::move(x);
      }
    }
  }
  if (best.residual < 0.0)
    throw SolverError(std::string(what) + ": singular system");
  return best;
}

} // namespace curlcurl::detail
