#pragma once

#include <Eigen/Dense>

namespace curlcurl
{

/// Quadrature on a reference simplex in barycentric coordinates.
///
/// `points` has one column per point and dim+1 rows. Weights are scaled to the
/// reference simplex measure (1/6 for the tetrahedron, 1/2 for the triangle,
/// 1 for the segment), so physical integrals multiply by measure / reference
/// measure.
struct QuadratureRule
{
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  int degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Largest supported exactness degree.
inline constexpr int kMaxQuadratureDegree = 48;

/// Collapsed Gauss-Jacobi rules, exact for polynomials of total degree <= d.
/// Results are cached; the returned references stay valid for the program
/// lifetime. Throws ConfigError for d < 0 or d > kMaxQuadratureDegree.
const QuadratureRule& tet_quadrature(int degree);
const QuadratureRule& triangle_quadrature(int degree);
const QuadratureRule& line_quadrature(int degree);

/// Gauss-Jacobi nodes and weights for the weight (1 - x)^a on [0, 1].
void gauss_jacobi01(int n, int a, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

} // namespace curlcurl
