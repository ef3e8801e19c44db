#include "curlcurl/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace curlcurl
{

namespace
{

std::uint64_t edge_key(int a, int b, std::uint64_t n)
{
  if (a > b)
    std::swap(a, b);
  return static_cast<std::uint64_t>(a) * n + static_cast<std::uint64_t>(b);
}

std::uint64_t face_key(std::array<int, 3> v, std::uint64_t n)
{
  std::sort(v.begin(), v.end());
  return (static_cast<std::uint64_t>(v[0]) * n + static_cast<std::uint64_t>(v[1])) * n +
         static_cast<std::uint64_t>(v[2]);
}

/// Builds CSR adjacency from (owner, item) pairs emitted in item order.
void build_csr(int num_owners, const std::vector<std::pair<int, int>>& pairs,
               std::vector<int>& offsets, std::vector<int>& list)
{
  offsets.assign(num_owners + 1, 0);
  for (const auto& [owner, item] : pairs)
    ++offsets[owner + 1];
  for (int i = 0; i < num_owners; ++i)
    offsets[i + 1] += offsets[i];
  list.resize(pairs.size());
  std::vector<int> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [owner, item] : pairs)
    list[fill[owner]++] = item;
}

/// A single-sided face whose outer neighborhood lies inside another cell
/// indicates a hanging vertex or face.
void check_matching(const Mesh& m)
{
  Vec3 lo = m.vertex(0), hi = m.vertex(0);
  for (const auto& x : m.vertices())
  {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const int cells = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(m.num_tets()))));
  const Vec3 ext = (hi - lo).cwiseMax(Vec3::Constant(1e-300));
  auto cell_of = [&](const Vec3& x, int d) {
    return std::clamp(static_cast<int>((x[d] - lo[d]) / ext[d] * cells), 0, cells - 1);
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(cells) * cells * cells);
  for (int t = 0; t < m.num_tets(); ++t)
  {
    Vec3 a = m.vertex(m.tet(t)[0]), b = a;
    for (int v : m.tet(t))
    {
      a = a.cwiseMin(m.vertex(v));
      b = b.cwiseMax(m.vertex(v));
    }
    for (int i = cell_of(a, 0); i <= cell_of(b, 0); ++i)
      for (int j = cell_of(a, 1); j <= cell_of(b, 1); ++j)
        for (int k = cell_of(a, 2); k <= cell_of(b, 2); ++k)
          buckets[(static_cast<std::size_t>(k) * cells + j) * cells + i].push_back(t);
  }
  for (int t = 0; t < m.num_tets(); ++t)
  {
    for (int i = 0; i < 4; ++i)
    {
      const int f = m.tet_faces(t)[i];
      if (!m.is_boundary_face(f))
        continue;
      const auto& v = m.face(f);
      const Vec3 centroid = (m.vertex(v[0]) + m.vertex(v[1]) + m.vertex(v[2])) / 3.0;
      const Vec3 probe =
          centroid + 1e-6 * m.tet_diameter(t) * m.tet_face_sign(t, i) * m.face_normal(f);
      const auto& bucket =
          buckets[(static_cast<std::size_t>(cell_of(probe, 2)) * cells + cell_of(probe, 1)) * cells +
                  cell_of(probe, 0)];
      for (int s : bucket)
      {
        if (s == t)
          continue;
        const auto lambda = m.geometry(s).to_barycentric(probe);
        if (lambda.minCoeff() > 1e-12)
          throw MeshError("mesh is not matching near face " + std::to_string(f));
      }
    }
  }
}

} // namespace

Vec3 TetGeometry::to_physical(const Eigen::Vector4d& bary) const
{
  return bary[0] * x[0] + bary[1] * x[1] + bary[2] * x[2] + bary[3] * x[3];
}

Eigen::Matrix3Xd TetGeometry::to_physical(const Eigen::Matrix4Xd& bary) const
{
  Eigen::Matrix<double, 3, 4> xs;
  for (int i = 0; i < 4; ++i)
    xs.col(i) = x[i];
  return xs * bary;
}

Eigen::Vector4d TetGeometry::to_barycentric(const Vec3& point) const
{
  Eigen::Vector4d lambda;
  const Vec3 d = point - x[0];
  for (int i = 1; i < 4; ++i)
    lambda[i] = grad_lambda.col(i).dot(d);
  lambda[0] = 1.0 - lambda[1] - lambda[2] - lambda[3];
  return lambda;
}

std::span<const int> Mesh::edge_tets(int e) const
{
  return {edge_tet_list_.data() + edge_tet_offsets_[e],
          static_cast<std::size_t>(edge_tet_offsets_[e + 1] - edge_tet_offsets_[e])};
}

std::span<const int> Mesh::edge_faces(int e) const
{
  return {edge_face_list_.data() + edge_face_offsets_[e],
          static_cast<std::size_t>(edge_face_offsets_[e + 1] - edge_face_offsets_[e])};
}

bool Mesh::is_boundary_edge(int e) const { return edge_boundary_[e] != 0; }

Vec3 Mesh::tangent(int e) const
{
  return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).normalized();
}

double Mesh::edge_length(int e) const
{
  return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).norm();
}

Vec3 Mesh::face_normal(int f) const
{
  const auto& v = faces_[f];
  return (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).normalized();
}

double Mesh::face_area(int f) const
{
  const auto& v = faces_[f];
  return 0.5 * (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).norm();
}

TetGeometry Mesh::geometry(int t) const
{
  TetGeometry g;
  const auto& v = sorted_tets_[t];
  for (int i = 0; i < 4; ++i)
    g.x[i] = vertices_[v[i]];
  Mat3 jac;
  for (int i = 0; i < 3; ++i)
    jac.col(i) = g.x[i + 1] - g.x[0];
  g.det = jac.determinant();
  g.volume = std::abs(g.det) / 6.0;
  const Mat3 inv = jac.inverse();
  for (int i = 0; i < 3; ++i)
    g.grad_lambda.col(i + 1) = inv.row(i).transpose();
  g.grad_lambda.col(0) = -(g.grad_lambda.col(1) + g.grad_lambda.col(2) + g.grad_lambda.col(3));
  return g;
}

double Mesh::tet_volume(int t) const
{
  const auto& v = tets_[t];
  Mat3 jac;
  for (int i = 0; i < 3; ++i)
    jac.col(i) = vertices_[v[i + 1]] - vertices_[v[0]];
  return std::abs(jac.determinant()) / 6.0;
}

double Mesh::tet_diameter(int t) const
{
  const auto& v = tets_[t];
  double h = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      h = std::max(h, (vertices_[v[i]] - vertices_[v[j]]).norm());
  return h;
}

double Mesh::tet_inball_diameter(int t) const
{
  double area = 0.0;
  for (int f : tet_faces_[t])
    area += face_area(f);
  return 6.0 * tet_volume(t) / area;
}

std::optional<int> Mesh::find_edge(int a, int b) const
{
  const auto it = edge_lookup_.find(edge_key(a, b, vertices_.size()));
  if (it == edge_lookup_.end())
    return std::nullopt;
  return it->second;
}

std::optional<int> Mesh::find_face(int a, int b, int c) const
{
  const auto it = face_lookup_.find(face_key({a, b, c}, vertices_.size()));
  if (it == face_lookup_.end())
    return std::nullopt;
  return it->second;
}

double Mesh::mesh_size() const
{
  double h = 0.0;
  for (int t = 0; t < num_tets(); ++t)
    h = std::max(h, tet_diameter(t));
  return h;
}

double Mesh::total_volume() const
{
  double vol = 0.0;
  for (int t = 0; t < num_tets(); ++t)
    vol += tet_volume(t);
  return vol;
}

Mesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets,
                std::span<const BoundaryFace> boundary)
{
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.tets_ = std::move(tets);
  const int nv = m.num_vertices();
  const int nt = m.num_tets();
  const auto n = static_cast<std::uint64_t>(nv);
  if (nt == 0)
    throw MeshError("mesh has no cells");

  m.sorted_tets_.resize(nt);
  for (int t = 0; t < nt; ++t)
  {
    auto s = m.tets_[t];
    for (int v : s)
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(t) + " references vertex " + std::to_string(v) +
                        " out of range");
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw MeshError("cell " + std::to_string(t) + " has repeated vertices");
    m.sorted_tets_[t] = s;
    const double h = m.tet_diameter(t);
    if (6.0 * m.tet_volume(t) < 1e-12 * h * h * h)
      throw MeshError("cell " + std::to_string(t) + " is degenerate");
  }

  m.tet_edges_.resize(nt);
  m.tet_faces_.resize(nt);
  m.tet_face_signs_.resize(nt);
  std::vector<std::pair<int, int>> edge_tet_pairs;
  edge_tet_pairs.reserve(6 * nt);
  std::vector<int> face_count;
  for (int t = 0; t < nt; ++t)
  {
    const auto& s = m.sorted_tets_[t];
    for (int i = 0; i < 6; ++i)
    {
      const int a = s[Mesh::kLocalEdges[i][0]];
      const int b = s[Mesh::kLocalEdges[i][1]];
      auto [it, inserted] = m.edge_lookup_.try_emplace(edge_key(a, b, n), m.num_edges());
      if (inserted)
        m.edges_.push_back({a, b});
      m.tet_edges_[t][i] = it->second;
      edge_tet_pairs.emplace_back(it->second, t);
    }
    for (int i = 0; i < 4; ++i)
    {
      const std::array<int, 3> fv{s[Mesh::kLocalFaces[i][0]], s[Mesh::kLocalFaces[i][1]],
                                  s[Mesh::kLocalFaces[i][2]]};
      auto [it, inserted] = m.face_lookup_.try_emplace(face_key(fv, n), m.num_faces());
      if (inserted)
      {
        m.faces_.push_back(fv);
        m.face_tets_.push_back({t, -1});
        face_count.push_back(1);
      }
      else
      {
        const int f = it->second;
        if (++face_count[f] > 2)
          throw MeshError("face (" + std::to_string(fv[0]) + "," + std::to_string(fv[1]) + "," +
                          std::to_string(fv[2]) + ") is shared by more than two cells");
        m.face_tets_[f][1] = t;
      }
      m.tet_faces_[t][i] = it->second;
      const Vec3 centroid =
          (m.vertices_[fv[0]] + m.vertices_[fv[1]] + m.vertices_[fv[2]]) / 3.0;
      const Vec3 nrm = m.face_normal(it->second);
      m.tet_face_signs_[t][i] = nrm.dot(centroid - m.vertices_[s[i]]) > 0.0 ? 1 : -1;
    }
  }
  build_csr(m.num_edges(), edge_tet_pairs, m.edge_tet_offsets_, m.edge_tet_list_);

  std::vector<std::pair<int, int>> edge_face_pairs;
  for (int f = 0; f < m.num_faces(); ++f)
  {
    const auto& v = m.faces_[f];
    for (const auto& [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
      edge_face_pairs.emplace_back(*m.find_edge(v[i], v[j]), f);
  }
  build_csr(m.num_edges(), edge_face_pairs, m.edge_face_offsets_, m.edge_face_list_);

  check_matching(m);

  m.face_tags_.assign(m.num_faces(), BoundaryTag::None);
  for (const auto& bf : boundary)
  {
    for (int v : bf.vertices)
      if (v < 0 || v >= nv)
        throw MeshError("boundary face references vertex " + std::to_string(v) + " out of range");
    const auto f = m.find_face(bf.vertices[0], bf.vertices[1], bf.vertices[2]);
    if (!f)
      throw MeshError("tagged face (" + std::to_string(bf.vertices[0]) + "," +
                      std::to_string(bf.vertices[1]) + "," + std::to_string(bf.vertices[2]) +
                      ") is not a mesh face");
    if (!m.is_boundary_face(*f))
      throw MeshError("tagged face " + std::to_string(*f) + " is an interior face");
    if (bf.tag == BoundaryTag::None)
      throw MeshError("boundary face " + std::to_string(*f) + " has no tag");
    if (m.face_tags_[*f] != BoundaryTag::None && m.face_tags_[*f] != bf.tag)
      throw MeshError("boundary face " + std::to_string(*f) + " tagged twice");
    m.face_tags_[*f] = bf.tag;
  }

  m.vertex_dirichlet_.assign(nv, 0);
  m.edge_dirichlet_.assign(m.num_edges(), 0);
  m.edge_boundary_.assign(m.num_edges(), 0);
  for (int f = 0; f < m.num_faces(); ++f)
  {
    if (!m.is_boundary_face(f))
      continue;
    if (m.face_tags_[f] == BoundaryTag::None)
      throw MeshError("boundary face " + std::to_string(f) + " is untagged");
    const auto& v = m.faces_[f];
    const bool dir = m.face_tags_[f] == BoundaryTag::Dirichlet;
    m.has_dirichlet_ = m.has_dirichlet_ || dir;
    for (const auto& [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
    {
      const int e = *m.find_edge(v[i], v[j]);
      m.edge_boundary_[e] = 1;
      if (dir)
        m.edge_dirichlet_[e] = 1;
    }
    if (dir)
      for (int x : v)
        m.vertex_dirichlet_[x] = 1;
  }

  return m;
}

std::vector<BoundaryFace> boundary_faces(const Mesh& mesh)
{
  std::vector<BoundaryFace> out;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.is_boundary_face(f))
      out.push_back({mesh.face(f), mesh.face_tag(f)});
  return out;
}

Mesh uniform_refine(const Mesh& mesh)
{
  const int nv = mesh.num_vertices();
  std::vector<Vec3> vertices(mesh.vertices().begin(), mesh.vertices().end());
  vertices.reserve(nv + mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e)
    vertices.push_back(0.5 * (mesh.vertex(mesh.edge(e)[0]) + mesh.vertex(mesh.edge(e)[1])));
  auto mid = [&](int a, int b) { return nv + *mesh.find_edge(a, b); };

  std::vector<std::array<int, 4>> tets;
  tets.reserve(8 * mesh.num_tets());
  for (int t = 0; t < mesh.num_tets(); ++t)
  {
    const auto& x = mesh.tet(t);
    const int x01 = mid(x[0], x[1]), x02 = mid(x[0], x[2]), x03 = mid(x[0], x[3]);
    const int x12 = mid(x[1], x[2]), x13 = mid(x[1], x[3]), x23 = mid(x[2], x[3]);
    tets.push_back({x[0], x01, x02, x03});
    tets.push_back({x01, x[1], x12, x13});
    tets.push_back({x02, x12, x[2], x23});
    tets.push_back({x03, x13, x23, x[3]});
    tets.push_back({x01, x02, x03, x13});
    tets.push_back({x01, x02, x12, x13});
    tets.push_back({x02, x03, x13, x23});
    tets.push_back({x02, x12, x13, x23});
  }

  std::vector<BoundaryFace> boundary;
  for (const auto& bf : boundary_faces(mesh))
  {
    const auto& [a, b, c] = bf.vertices;
    const int ab = mid(a, b), ac = mid(a, c), bc = mid(b, c);
    boundary.push_back({{a, ab, ac}, bf.tag});
    boundary.push_back({{ab, b, bc}, bf.tag});
    boundary.push_back({{ac, bc, c}, bf.tag});
    boundary.push_back({{ab, bc, ac}, bf.tag});
  }
  return build_mesh(std::move(vertices), std::move(tets), boundary);
}

} // namespace curlcurl
