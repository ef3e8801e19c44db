#pragma once

#include "curlcurl/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace curlcurl
{

enum class Family : std::uint8_t
{
  Lagrange,
  Nedelec,
  RaviartThomas
};

const char* to_string(Family family);

/// Dimension of the full space on one tetrahedron.
int local_dimension(Family family, int degree);

/// One shape function lambda^alpha * phi_sigma on the reference cell.
///
/// phi_sigma is 1 for Lagrange, the Whitney edge form
/// lambda_i grad lambda_j - lambda_j grad lambda_i for Nedelec and the Whitney
/// face form for Raviart-Thomas. The shape belongs to the sub-simplex
/// supp(alpha) + sigma; its trace vanishes on every face not containing it.
struct LocalShape
{
  std::array<int, 4> alpha{};
  std::array<int, 3> sigma{};
  int sigma_size = 0;
  /// 0 vertex, 1 edge, 2 face, 3 cell.
  int entity_dim = 0;
  /// Index into the vertex list, Mesh::kLocalEdges or Mesh::kLocalFaces.
  int entity_local = 0;
  /// Position in the list of shapes attached to the same entity.
  int entity_offset = 0;
};

/// Geometric-decomposition basis of P_r, N_p or RT_p on a tetrahedron.
///
/// Vertices of a cell are taken in ascending global order, so shapes attached
/// to a shared sub-simplex coincide on both sides and conformity reduces to
/// sharing coefficients; there are no orientation signs.
class ReferenceBasis
{
public:
  /// Cached instance; thread-safe.
  static const ReferenceBasis& get(Family family, int degree);

  Family family() const { return family_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(shapes_.size()); }
  /// 1 for Lagrange, 3 otherwise.
  int value_dim() const { return family_ == Family::Lagrange ? 1 : 3; }
  const LocalShape& shape(int i) const { return shapes_[i]; }
  const std::vector<LocalShape>& shapes() const { return shapes_; }

  /// Number of shapes attached to one entity of dimension `dim`.
  int entity_size(int dim) const { return entity_size_[dim]; }
  /// Shape indices attached to a local entity.
  std::span<const int> entity_shapes(int dim, int local) const;
  /// Shapes whose entity lies in the closure of local face f (opposite vertex f).
  const std::vector<int>& face_closure(int f) const { return face_closure_[f]; }
  /// Shapes whose entity lies in the closure of a local edge.
  const std::vector<int>& edge_closure(int e) const { return edge_closure_[e]; }

private:
  ReferenceBasis(Family family, int degree);

  Family family_;
  int degree_;
  std::vector<LocalShape> shapes_;
  std::array<int, 4> entity_size_{};
  std::array<std::vector<std::vector<int>>, 4> entity_shapes_;
  std::array<std::vector<int>, 4> face_closure_;
  std::array<std::vector<int>, 6> edge_closure_;
};

/// Shape function values and derivatives at a set of points of one cell.
///
/// Row i belongs to shape i. For vector families column 3q+d holds component d
/// at point q; for Lagrange column q holds the value.
/// `derivs` holds curls (Nedelec, 3 per point), divergences (Raviart-Thomas,
/// 1 per point) or gradients (Lagrange, 3 per point).
struct BasisValues
{
  Eigen::MatrixXd values;
  Eigen::MatrixXd derivs;
};

/// Evaluates a basis on a physical cell at barycentric points (4 x nq).
void basis_eval(const ReferenceBasis& basis, const TetGeometry& geometry,
                const Eigen::Ref<const Eigen::MatrixXd>& bary, BasisValues& out,
                bool with_derivs = true);

/// Number of derivative components per point (3 or 1).
int deriv_dim(Family family);

/// Projection onto the plane of a face with unit normal n.
inline Vec3 tangential_component(const Vec3& w, const Vec3& n) { return w - w.dot(n) * n; }

/// Surface curl on a face: the normal component of the volume curl.
inline double surface_curl(const Vec3& curl, const Vec3& n) { return curl.dot(n); }

} // namespace curlcurl
