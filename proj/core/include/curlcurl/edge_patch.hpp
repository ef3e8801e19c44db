#pragma once

#include "curlcurl/mesh.hpp"

#include <vector>

namespace curlcurl
{

enum class PatchType : std::uint8_t
{
  Interior,
  DirichletBoundary,
  MixedBoundary,
  NeumannBoundary
};

const char* to_string(PatchType type);

/// Shape-regularity data of an edge patch.
struct ShapeMetrics
{
  /// Largest distance between two points of the patch.
  double h_omega = 0.0;
  /// Smallest inscribed-ball diameter over the patch cells.
  double rho = 0.0;
  /// h_omega / rho.
  double kappa = 0.0;
};

/// Cells sharing one edge, enumerated around it.
///
/// With a_d < a_u the edge vertices and a_0..a_n the remaining vertices in
/// rotational order, cell j (1-based, stored at index j-1 of `tets`) is
/// conv(a_{j-1}, a_j, a_d, a_u) and face F_j = conv(a_j, a_d, a_u). For
/// interior patches a_n = a_0 and F_n = F_0.
struct EdgePatch
{
  int edge = -1;
  int vertex_d = -1;
  int vertex_u = -1;
  PatchType type = PatchType::Interior;
  /// K_1..K_n.
  std::vector<int> tets;
  /// a_0..a_n.
  std::vector<int> ring;
  /// F_0..F_n as mesh face ids.
  std::vector<int> faces;
  /// Faces shared by two patch cells.
  std::vector<int> internal_faces;
  /// Faces carrying a prescribed tangential trace in the patch minimization.
  std::vector<int> constrained_faces;
  /// Neumann faces containing the edge (zero tangential trace).
  std::vector<int> neumann_faces;
  ShapeMetrics metrics;

  int size() const { return static_cast<int>(tets.size()); }
  bool is_interior() const { return type == PatchType::Interior; }
  /// Position of a mesh cell in `tets`, or -1.
  int local_index(int tet) const;
};

/// Extracts and orders the patch of edge `e`.
///
/// Interior patches start at the cell with the smallest index and turn towards
/// the smaller-indexed neighbor. Boundary patches start at the Neumann face if
/// exactly one of the two boundary faces is Neumann, otherwise at the end whose
/// cell index is smaller. Throws MeshError if the cells around the edge do not
/// form a single fan.
EdgePatch edge_patch(const Mesh& mesh, int e);

ShapeMetrics shape_metrics(const Mesh& mesh, const EdgePatch& patch);

/// Greedy Dörfler marking: the fewest entries, taken in decreasing order, whose
/// squares reach the fraction theta of the total. Ties keep the lower index
/// first. Throws ConfigError if theta is outside (0, 1] or any value is negative.
std::vector<int> dorfler_mark(const std::vector<double>& indicators, double theta);

} // namespace curlcurl
