#include "curlcurl/piola.hpp"

#include "curlcurl/quadrature.hpp"
#include "curlcurl/shape_functions.hpp"

#include <algorithm>

namespace curlcurl
{

AffineMap AffineMap::inverse() const
{
  AffineMap m;
  m.J = J.inverse();
  m.b = -m.J * b;
  m.det = 1.0 / det;
  m.sign = sign;
  return m;
}

AffineMap AffineMap::compose(const AffineMap& inner) const
{
  AffineMap m;
  m.J = J * inner.J;
  m.b = J * inner.b + b;
  m.det = det * inner.det;
  m.sign = sign * inner.sign;
  return m;
}

AffineMap affine_map(const std::array<Vec3, 4>& from, const std::array<Vec3, 4>& to)
{
  Mat3 a, c;
  for (int i = 0; i < 3; ++i)
  {
    a.col(i) = from[i + 1] - from[0];
    c.col(i) = to[i + 1] - to[0];
  }
  const double da = a.determinant();
  const double scale = std::max(a.norm(), c.norm());
  if (std::abs(da) < 1e-14 * scale * scale * scale)
    throw MeshError("affine map from a degenerate cell");
  AffineMap m;
  m.J = c * a.inverse();
  m.det = m.J.determinant();
  if (std::abs(m.det) < 1e-14)
    throw MeshError("affine map to a degenerate cell");
  m.sign = m.det > 0 ? 1 : -1;
  m.b = to[0] - m.J * from[0];
  return m;
}

AffineMap reflection_map(const Mesh& mesh, int from_tet, int to_tet)
{
  const auto& a = mesh.sorted_tet(from_tet);
  const auto& b = mesh.sorted_tet(to_tet);
  std::array<int, 3> shared{};
  int ns = 0;
  int opp_a = -1;
  for (int v : a)
  {
    if (std::find(b.begin(), b.end(), v) != b.end())
    {
      if (ns < 3)
        shared[ns] = v;
      ++ns;
    }
    else
      opp_a = v;
  }
  if (ns != 3 || from_tet == to_tet)
    throw MeshError("cells " + std::to_string(from_tet) + " and " + std::to_string(to_tet) +
                    " do not share a face");
  int opp_b = -1;
  for (int v : b)
    if (std::find(a.begin(), a.end(), v) == a.end())
      opp_b = v;
  std::array<Vec3, 4> from{mesh.vertex(shared[0]), mesh.vertex(shared[1]), mesh.vertex(shared[2]),
                           mesh.vertex(opp_a)};
  std::array<Vec3, 4> to{mesh.vertex(shared[0]), mesh.vertex(shared[1]), mesh.vertex(shared[2]),
                         mesh.vertex(opp_b)};
  return affine_map(from, to);
}

Vec3 covariant_value(const AffineMap& map, const Vec3& v) { return map.J.transpose().lu().solve(v); }

Vec3 contravariant_value(const AffineMap& map, const Vec3& v) { return map.J * v / map.det; }

VectorFunction covariant_piola(const AffineMap& map, VectorFunction v)
{
  return [map, v = std::move(v)](const Vec3& x) {
    return covariant_value(map, v(map.inverse_apply(x)));
  };
}

VectorFunction contravariant_piola(const AffineMap& map, VectorFunction v)
{
  return [map, v = std::move(v)](const Vec3& x) {
    return contravariant_value(map, v(map.inverse_apply(x)));
  };
}

VectorFunction inverse_contravariant_piola(const AffineMap& map, VectorFunction v)
{
  return [map, v = std::move(v)](const Vec3& x) { return Vec3(map.det * map.J.lu().solve(v(map(x)))); };
}

Eigen::VectorXd transport_nedelec(const AffineMap& map, int degree, const TetGeometry& from,
                                  const Eigen::VectorXd& coeffs, const TetGeometry& to)
{
  const auto& basis = ReferenceBasis::get(Family::Nedelec, degree);
  const auto& rule = tet_quadrature(2 * degree + 2);
  const int nq = rule.size();
  BasisValues bt;
  basis_eval(basis, to, rule.points, bt, false);

  // Source values at the pre-images of the target quadrature points.
  const Eigen::Matrix3Xd x = to.to_physical(Eigen::Matrix4Xd(rule.points));
  Eigen::Matrix4Xd pre(4, nq);
  for (int q = 0; q < nq; ++q)
    pre.col(q) = from.to_barycentric(map.inverse_apply(x.col(q)));
  BasisValues bf;
  basis_eval(basis, from, pre, bf, false);
  const Eigen::RowVectorXd src = coeffs.transpose() * bf.values;

  const int n = basis.size();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const Mat3 jinv_t = map.J.inverse().transpose();
  for (int q = 0; q < nq; ++q)
  {
    const double w = rule.weights[q] * 6.0 * to.volume;
    const Vec3 value = jinv_t * src.segment<3>(3 * q).transpose();
    const Eigen::MatrixXd phi = bt.values.middleCols(3 * q, 3);
    mass.noalias() += w * phi * phi.transpose();
    rhs.noalias() += w * phi * value;
  }
  return mass.ldlt().solve(rhs);
}

} // namespace curlcurl
