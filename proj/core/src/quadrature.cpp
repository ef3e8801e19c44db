#include "curlcurl/quadrature.hpp"

#include "curlcurl/types.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace curlcurl
{

void gauss_jacobi01(int n, int a, Eigen::VectorXd& nodes, Eigen::VectorXd& weights)
{
  // Golub-Welsch on [-1, 1] for (1 - x)^a (1 + x)^b with b = 0.
  const double alpha = a;
  const double beta = 0.0;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k)
  {
    const double s = 2.0 * k + alpha + beta;
    jacobi(k, k) = k == 0 ? (beta - alpha) / (alpha + beta + 2.0)
                          : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k + 1 < n)
    {
      const double m = k + 1;
      const double t = 2.0 * m + alpha + beta;
      const double b = 4.0 * m * (m + alpha) * (m + beta) * (m + alpha + beta) /
                       (t * t * (t + 1.0) * (t - 1.0));
      jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  // mu_0 = int_{-1}^{1} (1 - x)^a dx = 2^{a+1} / (a + 1); mapping to [0, 1]
  // divides by 2^{a+1}.
  const double mu0 = 1.0 / (alpha + 1.0);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k)
  {
    nodes[k] = 0.5 * (1.0 + eig.eigenvalues()[k]);
    const double v0 = eig.eigenvectors()(0, k);
    weights[k] = mu0 * v0 * v0;
  }
}

namespace
{

void check_degree(int degree)
{
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw ConfigError("quadrature degree " + std::to_string(degree) + " not supported (max " +
                      std::to_string(kMaxQuadratureDegree) + ")");
}

QuadratureRule make_tet(int degree)
{
  const int n = degree / 2 + 1;
  Eigen::VectorXd xu, wu, xv, wv, xw, ww;
  gauss_jacobi01(n, 2, xu, wu);
  gauss_jacobi01(n, 1, xv, wv);
  gauss_jacobi01(n, 0, xw, ww);
  QuadratureRule q;
  q.degree = degree;
  q.points.resize(4, n * n * n);
  q.weights.resize(n * n * n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++k)
      {
        const double x1 = xu[i];
        const double x2 = xv[j] * (1.0 - xu[i]);
        const double x3 = xw[l] * (1.0 - xu[i]) * (1.0 - xv[j]);
        q.points.col(k) << 1.0 - x1 - x2 - x3, x1, x2, x3;
        q.weights[k] = wu[i] * wv[j] * ww[l];
      }
  return q;
}

QuadratureRule make_triangle(int degree)
{
  const int n = degree / 2 + 1;
  Eigen::VectorXd xu, wu, xv, wv;
  gauss_jacobi01(n, 1, xu, wu);
  gauss_jacobi01(n, 0, xv, wv);
  QuadratureRule q;
  q.degree = degree;
  q.points.resize(3, n * n);
  q.weights.resize(n * n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j, ++k)
    {
      const double x1 = xu[i];
      const double x2 = xv[j] * (1.0 - xu[i]);
      q.points.col(k) << 1.0 - x1 - x2, x1, x2;
      q.weights[k] = wu[i] * wv[j];
    }
  return q;
}

QuadratureRule make_line(int degree)
{
  const int n = degree / 2 + 1;
  Eigen::VectorXd x, w;
  gauss_jacobi01(n, 0, x, w);
  QuadratureRule q;
  q.degree = degree;
  q.points.resize(2, n);
  q.weights = w;
  for (int k = 0; k < n; ++k)
    q.points.col(k) << 1.0 - x[k], x[k];
  return q;
}

using Factory = QuadratureRule (*)(int);

const QuadratureRule& cached(int dim, int degree, Factory make)
{
  check_degree(degree);
  static std::mutex mutex;
  static std::array<std::array<std::unique_ptr<QuadratureRule>, kMaxQuadratureDegree + 1>, 3> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[dim - 1][degree];
  if (!slot)
    slot = std::make_unique<QuadratureRule>(make(degree));
  return *slot;
}

} // namespace

const QuadratureRule& tet_quadrature(int degree) { return cached(3, degree, make_tet); }
const QuadratureRule& triangle_quadrature(int degree) { return cached(2, degree, make_triangle); }
const QuadratureRule& line_quadrature(int degree) { return cached(1, degree, make_line); }

} // namespace curlcurl
