#include "curlcurl/edge_patch.hpp"

#include <algorithm>
#include <limits>

namespace curlcurl
{

const char* to_string(PatchType type)
{
  switch (type)
  {
  case PatchType::Interior:
    return "interior";
  case PatchType::DirichletBoundary:
    return "dirichlet";
  case PatchType::MixedBoundary:
    return "mixed";
  case PatchType::NeumannBoundary:
    return "neumann";
  }
  return "unknown";
}

int EdgePatch::local_index(int tet) const
{
  const auto it = std::find(tets.begin(), tets.end(), tet);
  return it == tets.end() ? -1 : static_cast<int>(it - tets.begin());
}

namespace
{

int third_vertex(const Mesh& mesh, int f, int a, int b)
{
  for (int v : mesh.face(f))
    if (v != a && v != b)
      return v;
  return -1;
}

/// The two faces of cell t containing vertices a and b.
std::array<int, 2> faces_through(const Mesh& mesh, int t, int a, int b)
{
  std::array<int, 2> out{-1, -1};
  int k = 0;
  const auto& s = mesh.sorted_tet(t);
  for (int i = 0; i < 4; ++i)
    if (s[i] != a && s[i] != b)
      out[k++] = mesh.tet_faces(t)[i];
  return out;
}

} // namespace

EdgePatch edge_patch(const Mesh& mesh, int e)
{
  if (e < 0 || e >= mesh.num_edges())
    throw MeshError("edge " + std::to_string(e) + " out of range");
  EdgePatch p;
  p.edge = e;
  p.vertex_d = mesh.edge(e)[0];
  p.vertex_u = mesh.edge(e)[1];
  const auto cells = mesh.edge_tets(e);
  const int n = static_cast<int>(cells.size());

  std::vector<int> boundary;
  for (int f : mesh.edge_faces(e))
    if (mesh.is_boundary_face(f))
      boundary.push_back(f);
  if (!boundary.empty() && boundary.size() != 2)
    throw MeshError("edge " + std::to_string(e) + " has " + std::to_string(boundary.size()) +
                    " boundary faces; the patch is not a fan");

  int start_tet = -1;
  int start_face = -1;
  if (boundary.empty())
  {
    start_tet = *std::min_element(cells.begin(), cells.end());
    const auto fs = faces_through(mesh, start_tet, p.vertex_d, p.vertex_u);
    auto other = [&](int f) {
      const auto& ft = mesh.face_tets(f);
      return ft[0] == start_tet ? ft[1] : ft[0];
    };
    // Face F_0 is the one shared with the larger neighbor, so that K_2 is the smaller.
    start_face = other(fs[0]) < other(fs[1]) ? fs[1] : fs[0];
  }
  else
  {
    const BoundaryTag t0 = mesh.face_tag(boundary[0]);
    const BoundaryTag t1 = mesh.face_tag(boundary[1]);
    if (t0 != t1)
      start_face = t0 == BoundaryTag::Neumann ? boundary[0] : boundary[1];
    else
    {
      const int c0 = mesh.face_tets(boundary[0])[0];
      const int c1 = mesh.face_tets(boundary[1])[0];
      start_face = (c0 < c1 || (c0 == c1 && boundary[0] < boundary[1])) ? boundary[0] : boundary[1];
    }
    start_tet = mesh.face_tets(start_face)[0];
  }

  p.faces.push_back(start_face);
  p.ring.push_back(third_vertex(mesh, start_face, p.vertex_d, p.vertex_u));
  int tet = start_tet;
  int face = start_face;
  for (int j = 0; j < n; ++j)
  {
    if (tet < 0 || std::find(p.tets.begin(), p.tets.end(), tet) != p.tets.end())
      throw MeshError("edge " + std::to_string(e) + ": cells around the edge do not form a fan");
    p.tets.push_back(tet);
    const auto fs = faces_through(mesh, tet, p.vertex_d, p.vertex_u);
    face = fs[0] == face ? fs[1] : fs[0];
    p.faces.push_back(face);
    p.ring.push_back(third_vertex(mesh, face, p.vertex_d, p.vertex_u));
    const auto& ft = mesh.face_tets(face);
    tet = ft[0] == tet ? ft[1] : ft[0];
  }
  const bool closed = boundary.empty();
  if ((closed && face != start_face) || (!closed && face == start_face) ||
      (!closed && !mesh.is_boundary_face(face)))
    throw MeshError("edge " + std::to_string(e) + ": cells around the edge do not form a fan");

  if (closed)
  {
    p.type = PatchType::Interior;
    p.internal_faces.assign(p.faces.begin() + 1, p.faces.end());
    p.constrained_faces = p.internal_faces;
  }
  else
  {
    const BoundaryTag first = mesh.face_tag(p.faces.front());
    const BoundaryTag last = mesh.face_tag(p.faces.back());
    p.internal_faces.assign(p.faces.begin() + 1, p.faces.end() - 1);
    if (first == BoundaryTag::Dirichlet && last == BoundaryTag::Dirichlet)
    {
      p.type = PatchType::DirichletBoundary;
      p.constrained_faces = p.internal_faces;
    }
    else if (first == BoundaryTag::Neumann && last == BoundaryTag::Neumann)
    {
      p.type = PatchType::NeumannBoundary;
      p.constrained_faces = p.faces;
      p.neumann_faces = {p.faces.front(), p.faces.back()};
    }
    else
    {
      p.type = PatchType::MixedBoundary;
      p.constrained_faces.assign(p.faces.begin(), p.faces.end() - 1);
      p.neumann_faces = {p.faces.front()};
    }
  }
  p.metrics = shape_metrics(mesh, p);
  return p;
}

ShapeMetrics shape_metrics(const Mesh& mesh, const EdgePatch& patch)
{
  std::vector<int> verts{patch.vertex_d, patch.vertex_u};
  verts.insert(verts.end(), patch.ring.begin(), patch.ring.end());
  ShapeMetrics m;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j)
      m.h_omega = std::max(m.h_omega, (mesh.vertex(verts[i]) - mesh.vertex(verts[j])).norm());
  m.rho = std::numeric_limits<double>::infinity();
  for (int t : patch.tets)
    m.rho = std::min(m.rho, mesh.tet_inball_diameter(t));
  m.kappa = m.h_omega / m.rho;
  return m;
}

} // namespace curlcurl
