#pragma once

#include "curlcurl/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace curlcurl
{

enum class BoundaryTag : std::uint8_t
{
  None,
  Dirichlet,
  Neumann
};

/// A tagged boundary face given by its three vertex indices (any order).
struct BoundaryFace
{
  std::array<int, 3> vertices;
  BoundaryTag tag;
};

/// Affine geometry of one tetrahedron in sorted local vertex order.
///
/// Local vertex i is the i-th smallest global vertex index of the cell, so that
/// every sub-entity shared by two cells is seen with the same vertex order from
/// both sides.
struct TetGeometry
{
  std::array<Vec3, 4> x;
  /// Column i holds the (constant) gradient of barycentric coordinate i.
  Eigen::Matrix<double, 3, 4> grad_lambda;
  /// det[x1 - x0, x2 - x0, x3 - x0]; may be negative.
  double det = 0.0;
  double volume = 0.0;

  Vec3 to_physical(const Eigen::Vector4d& bary) const;
  Eigen::Vector4d to_barycentric(const Vec3& point) const;
  /// Maps barycentric points (4 x n) to physical points (3 x n).
  Eigen::Matrix3Xd to_physical(const Eigen::Matrix4Xd& bary) const;
};

/// Oriented, matching tetrahedral mesh with edge/face incidence and boundary tags.
///
/// Immutable after construction by build_mesh(). Edges are oriented from the
/// lower to the higher vertex index; face normals follow the right-hand rule on
/// the ascending vertex indices.
class Mesh
{
public:
  /// Local edges of a cell, in sorted local vertex numbering.
  static constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  /// Local face i is opposite local vertex i.
  static constexpr std::array<std::array<int, 3>, 4> kLocalFaces{
      {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_tets() const { return static_cast<int>(tets_.size()); }

  const Vec3& vertex(int v) const { return vertices_[v]; }
  std::span<const Vec3> vertices() const { return vertices_; }

  /// Cell vertices in the order they were supplied.
  const std::array<int, 4>& tet(int t) const { return tets_[t]; }
  /// Cell vertices sorted ascending (the local numbering used by all bases).
  const std::array<int, 4>& sorted_tet(int t) const { return sorted_tets_[t]; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }

  /// Global edge ids in Mesh::kLocalEdges order.
  const std::array<int, 6>& tet_edges(int t) const { return tet_edges_[t]; }
  /// Global face ids in Mesh::kLocalFaces order.
  const std::array<int, 4>& tet_faces(int t) const { return tet_faces_[t]; }
  /// +1 if the face normal points out of the cell, -1 otherwise.
  int tet_face_sign(int t, int local_face) const { return tet_face_signs_[t][local_face]; }

  std::span<const int> edge_tets(int e) const;
  std::span<const int> edge_faces(int e) const;
  /// Cells adjacent to a face; the second entry is -1 on the boundary.
  const std::array<int, 2>& face_tets(int f) const { return face_tets_[f]; }
  BoundaryTag face_tag(int f) const { return face_tags_[f]; }
  bool is_boundary_face(int f) const { return face_tets_[f][1] < 0; }

  /// True if the edge lies on a boundary face.
  bool is_boundary_edge(int e) const;
  /// True if the vertex/edge/face lies in the closure of the Dirichlet boundary.
  bool vertex_on_dirichlet(int v) const { return vertex_dirichlet_[v] != 0; }
  bool edge_on_dirichlet(int e) const { return edge_dirichlet_[e] != 0; }
  bool face_on_dirichlet(int f) const { return face_tags_[f] == BoundaryTag::Dirichlet; }
  bool has_dirichlet() const { return has_dirichlet_; }

  Vec3 tangent(int e) const;
  double edge_length(int e) const;
  Vec3 face_normal(int f) const;
  double face_area(int f) const;

  TetGeometry geometry(int t) const;
  double tet_volume(int t) const;
  /// Largest vertex distance of a cell.
  double tet_diameter(int t) const;
  /// Diameter of the inscribed ball of a cell.
  double tet_inball_diameter(int t) const;

  std::optional<int> find_edge(int a, int b) const;
  std::optional<int> find_face(int a, int b, int c) const;

  /// Largest cell diameter.
  double mesh_size() const;
  double total_volume() const;

private:
  friend Mesh build_mesh(std::vector<Vec3>, std::vector<std::array<int, 4>>,
                         std::span<const BoundaryFace>);

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<std::array<int, 4>> sorted_tets_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 6>> tet_edges_;
  std::vector<std::array<int, 4>> tet_faces_;
  std::vector<std::array<int, 4>> tet_face_signs_;
  std::vector<std::array<int, 2>> face_tets_;
  std::vector<BoundaryTag> face_tags_;
  std::vector<int> edge_tet_offsets_, edge_tet_list_;
  std::vector<int> edge_face_offsets_, edge_face_list_;
  std::vector<std::uint8_t> vertex_dirichlet_, edge_dirichlet_, edge_boundary_;
  bool has_dirichlet_ = false;
  std::unordered_map<std::uint64_t, int> edge_lookup_;
  std::unordered_map<std::uint64_t, int> face_lookup_;
};

/// Builds a mesh and validates it.
///
/// Throws MeshError for out-of-range indices, degenerate cells
/// (|det J| < 1e-12 h_K^3), faces shared by more than two cells, untagged
/// boundary faces, or tags attached to interior or nonexistent faces.
Mesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets,
                std::span<const BoundaryFace> boundary);

/// Red refinement: each cell is split into 8 children, boundary tags inherited.
///
/// Children follow the vertex order of the parent as supplied, which keeps Kuhn
/// (path-ordered) cells in the Kuhn family.
Mesh uniform_refine(const Mesh& mesh);

/// Boundary faces of a mesh with their tags (vertices in ascending order).
std::vector<BoundaryFace> boundary_faces(const Mesh& mesh);

/// Reads the line-oriented ASCII `tetmesh 1` format. Throws MeshFormatError.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);

} // namespace curlcurl
