#pragma once

#include "curlcurl/mesh.hpp"

#include <array>

namespace curlcurl
{

/// Affine map x -> J x + b between two tetrahedra.
struct AffineMap
{
  Mat3 J = Mat3::Identity();
  Vec3 b = Vec3::Zero();
  double det = 1.0;
  /// sign(det J).
  int sign = 1;

  Vec3 operator()(const Vec3& x) const { return J * x + b; }
  Vec3 inverse_apply(const Vec3& y) const { return J.lu().solve(y - b); }
  AffineMap inverse() const;
  /// (*this) o inner.
  AffineMap compose(const AffineMap& inner) const;
};

/// The affine map sending from[i] to to[i]. Throws MeshError if singular.
AffineMap affine_map(const std::array<Vec3, 4>& from, const std::array<Vec3, 4>& to);

/// The map from cell `from_tet` to the face-neighbor `to_tet` that fixes the
/// shared face pointwise and sends the opposite vertex to the opposite vertex.
/// Throws MeshError if the cells do not share a face.
AffineMap reflection_map(const Mesh& mesh, int from_tet, int to_tet);

/// Covariant transform of a value: J^{-T} v.
Vec3 covariant_value(const AffineMap& map, const Vec3& v);
/// Contravariant transform of a value: J v / det J.
Vec3 contravariant_value(const AffineMap& map, const Vec3& v);

/// Pushes a field on the source cell forward: x -> J^{-T} v(T^{-1} x).
VectorFunction covariant_piola(const AffineMap& map, VectorFunction v);
/// x -> J v(T^{-1} x) / det J.
VectorFunction contravariant_piola(const AffineMap& map, VectorFunction v);
/// Inverse contravariant transform (pull-back of a field on the target cell).
VectorFunction inverse_contravariant_piola(const AffineMap& map, VectorFunction v);

/// Coefficients on cell `to` of the covariant transport of a Nedelec field
/// given by local coefficients on cell `from` (both in sorted local order),
/// computed by L2 projection onto N_p(to). Exact for N_p fields.
Eigen::VectorXd transport_nedelec(const AffineMap& map, int degree, const TetGeometry& from,
                                  const Eigen::VectorXd& coeffs, const TetGeometry& to);

} // namespace curlcurl
