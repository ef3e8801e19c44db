#include "curlcurl/cases.hpp"
#include "curlcurl/edge_patch.hpp"
#include "curlcurl/mesh.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace curlcurl;
using namespace curlcurl::testing;

namespace
{

/// Edges counted by brute force from the vertex pairs of every cell.
int count_edges(const Mesh& mesh)
{
  std::set<std::pair<int, int>> edges;
  for (int t = 0; t < mesh.num_tets(); ++t)
  {
    const auto& v = mesh.tet(t);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        edges.insert({std::min(v[i], v[j]), std::max(v[i], v[j])});
  }
  return static_cast<int>(edges.size());
}

/// Inscribed-ball radius from the active-set solution of
/// max r s.t. n_i . c + r <= d_i (all four face constraints active).
double inball_radius_lp(const std::array<Vec3, 4>& x)
{
  Eigen::Matrix4d a;
  Eigen::Vector4d d;
  for (int i = 0; i < 4; ++i)
  {
    const auto& f = Mesh::kLocalFaces[i];
    Vec3 n = (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).normalized();
    if (n.dot(x[i] - x[f[0]]) > 0.0)
      n = -n;
    a.row(i) << n.transpose(), 1.0;
    d[i] = n.dot(x[f[0]]);
  }
  return a.lu().solve(d)[3];
}

Mesh retag(const Mesh& mesh, const std::function<BoundaryTag(const Vec3&)>& tag_of_centroid)
{
  auto faces = boundary_faces(mesh);
  for (auto& bf : faces)
  {
    Vec3 c = Vec3::Zero();
    for (int v : bf.vertices)
      c += mesh.vertex(v) / 3.0;
    bf.tag = tag_of_centroid(c);
  }
  std::vector<std::array<int, 4>> tets;
  for (int t = 0; t < mesh.num_tets(); ++t)
    tets.push_back(mesh.tet(t));
  return build_mesh({mesh.vertices().begin(), mesh.vertices().end()}, tets, faces);
}

std::set<int> as_set(std::span<const int> v) { return {v.begin(), v.end()}; }

std::vector<Vec3> sorted_barycenters(const Mesh& mesh)
{
  std::vector<Vec3> out;
  for (int t = 0; t < mesh.num_tets(); ++t)
  {
    Vec3 c = Vec3::Zero();
    for (int v : mesh.tet(t))
      c += mesh.vertex(v) / 4.0;
    out.push_back((c * 1e9).array().round() / 1e9);
  }
  std::sort(out.begin(), out.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  return out;
}

} // namespace

TEST(Mesh, SingleTetCounts)
{
  const Mesh m = reference_tet();
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_edges(), 6);
  EXPECT_EQ(m.num_faces(), 4);
  EXPECT_EQ(m.num_tets(), 1);
  EXPECT_NEAR(m.total_volume(), 1.0 / 6.0, 1e-15);
  for (int e = 0; e < 6; ++e)
  {
    const EdgePatch p = edge_patch(m, e);
    EXPECT_EQ(p.size(), 1);
    EXPECT_EQ(p.type, PatchType::NeumannBoundary);
  }
}

TEST(Mesh, KuhnCubeCounts)
{
  for (int n : {1, 2, 3})
  {
    const Mesh m = generate_cube(n, BoundaryTag::Neumann);
    EXPECT_EQ(m.num_tets(), 6 * n * n * n);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1) * (n + 1));
    EXPECT_EQ(m.num_edges(), count_edges(m));
    EXPECT_NEAR(m.total_volume(), 1.0, 1e-13);
    EXPECT_NEAR(m.mesh_size(), std::sqrt(3.0) / n, 1e-14);
    // Euler characteristic of a ball.
    EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_faces() - m.num_tets(), 1);
  }
  EXPECT_EQ(generate_cube(1, BoundaryTag::Neumann).num_edges(), 19);
}

TEST(Mesh, LShapeVolume)
{
  const Mesh m = generate_lshape(2);
  EXPECT_NEAR(m.total_volume(), 3.0, 1e-12);
  for (int f = 0; f < m.num_faces(); ++f)
    if (m.is_boundary_face(f))
    {
      EXPECT_EQ(m.face_tag(f), BoundaryTag::Dirichlet);
    }
}

TEST(Mesh, FaceOrientationInvariants)
{
  const Mesh m = generate_cube(2, BoundaryTag::Neumann);
  for (int f = 0; f < m.num_faces(); ++f)
  {
    const auto& ts = m.face_tets(f);
    if (ts[1] < 0)
      continue;
    int outward = 0;
    for (int t : ts)
    {
      const auto& tf = m.tet_faces(t);
      const int lf = static_cast<int>(std::find(tf.begin(), tf.end(), f) - tf.begin());
      outward += m.tet_face_sign(t, lf) > 0;
    }
    EXPECT_EQ(outward, 1) << "face " << f;
  }
  for (int t = 0; t < m.num_tets(); ++t)
  {
    Vec3 s = Vec3::Zero();
    for (int i = 0; i < 4; ++i)
    {
      const int f = m.tet_faces(t)[i];
      s += m.tet_face_sign(t, i) * m.face_area(f) * m.face_normal(f);
      // The outward normal points away from the opposite vertex.
      const Vec3 away = m.vertex(m.face(f)[0]) - m.vertex(m.sorted_tet(t)[i]);
      EXPECT_GT(m.tet_face_sign(t, i) * m.face_normal(f).dot(away), 0.0);
    }
    EXPECT_LT(s.norm(), 1e-14);
  }
}

TEST(Mesh, EdgeOrientationAndLookup)
{
  const Mesh m = generate_cube(2, BoundaryTag::Neumann);
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const auto& v = m.edge(e);
    EXPECT_LT(v[0], v[1]);
    EXPECT_EQ(m.find_edge(v[1], v[0]).value(), e);
    EXPECT_NEAR(m.tangent(e).norm(), 1.0, 1e-15);
    EXPECT_GT(m.tangent(e).dot(m.vertex(v[1]) - m.vertex(v[0])), 0.0);
  }
  EXPECT_FALSE(m.find_edge(0, 26).has_value());
}

TEST(Mesh, InballMatchesLinearProgram)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial)
  {
    std::array<Vec3, 4> x;
    for (auto& p : x)
      p = Vec3(u(rng), u(rng), u(rng));
    const double det = (x[1] - x[0]).dot((x[2] - x[0]).cross(x[3] - x[0]));
    if (std::abs(det) < 0.05)
      continue;
    const Mesh m = single_tet(x);
    EXPECT_NEAR(m.tet_inball_diameter(0), 2.0 * inball_radius_lp(x), 1e-12);
  }
}

TEST(Mesh, RegularTetShapeConstant)
{
  const Mesh m = regular_tet();
  const EdgePatch p = edge_patch(m, 0);
  EXPECT_NEAR(p.metrics.h_omega, 1.0, 1e-14);
  EXPECT_NEAR(p.metrics.kappa, std::sqrt(6.0), 1e-12);
}

TEST(Mesh, ShapeConstantScaleAndRigidInvariance)
{
  const Mesh m = generate_cube(1, BoundaryTag::Neumann);
  const Mat3 q = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  std::vector<Vec3> moved;
  for (const Vec3& v : m.vertices())
    moved.push_back(3.5 * q * v + Vec3(1, -2, 0.5));
  std::vector<std::array<int, 4>> tets;
  for (int t = 0; t < m.num_tets(); ++t)
    tets.push_back(m.tet(t));
  const Mesh m2 = build_mesh(moved, tets, boundary_faces(m));
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const auto& v = m.edge(e);
    const int e2 = m2.find_edge(v[0], v[1]).value();
    EXPECT_NEAR(edge_patch(m, e).metrics.kappa, edge_patch(m2, e2).metrics.kappa, 1e-11);
    EXPECT_NEAR(3.5 * edge_patch(m, e).metrics.h_omega, edge_patch(m2, e2).metrics.h_omega, 1e-12);
  }
}

TEST(EdgePatch, DiagonalOfCubeIsInterior)
{
  const Mesh m = generate_cube(1, BoundaryTag::Neumann);
  const int e = m.find_edge(0, 7).value();
  const EdgePatch p = edge_patch(m, e);
  EXPECT_EQ(p.type, PatchType::Interior);
  EXPECT_EQ(p.size(), 6);
  EXPECT_EQ(p.faces.front(), p.faces.back());
  EXPECT_EQ(p.ring.front(), p.ring.back());
  EXPECT_EQ(p.internal_faces.size(), 6u);
  EXPECT_EQ(as_set(p.constrained_faces), as_set(p.internal_faces));
  EXPECT_TRUE(p.neumann_faces.empty());
}

TEST(EdgePatch, OrderingProperties)
{
  const Mesh m = generate_cube(2, BoundaryTag::Neumann);
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const EdgePatch p = edge_patch(m, e);
    ASSERT_EQ(p.tets.size() + 1, p.faces.size());
    ASSERT_EQ(p.ring.size(), p.faces.size());
    EXPECT_EQ(p.vertex_d, m.edge(e)[0]);
    EXPECT_EQ(p.vertex_u, m.edge(e)[1]);
    double vol = 0.0;
    for (int j = 1; j <= p.size(); ++j)
    {
      const int t = p.tets[j - 1];
      EXPECT_EQ(as_set(m.tet(t)), (std::set<int>{p.ring[j - 1], p.ring[j], p.vertex_d, p.vertex_u}));
      vol += m.tet_volume(t);
    }
    for (int j = 0; j <= p.size(); ++j)
      EXPECT_EQ(as_set(m.face(p.faces[j])), (std::set<int>{p.ring[j], p.vertex_d, p.vertex_u}));
    // Consecutive cells share F_j.
    for (int j = 1; j < p.size(); ++j)
    {
      const auto& ts = m.face_tets(p.faces[j]);
      EXPECT_EQ((std::set<int>{ts[0], ts[1]}), (std::set<int>{p.tets[j - 1], p.tets[j]}));
    }
    // Patch volume against a brute-force scan of cells containing both vertices.
    double brute = 0.0;
    for (int t = 0; t < m.num_tets(); ++t)
    {
      const auto& v = m.tet(t);
      if (std::count(v.begin(), v.end(), p.vertex_d) && std::count(v.begin(), v.end(), p.vertex_u))
        brute += m.tet_volume(t);
    }
    EXPECT_NEAR(vol, brute, 1e-15);
    if (p.is_interior())
    {
      EXPECT_EQ(p.tets.front(), *std::min_element(p.tets.begin(), p.tets.end()));
    }
  }
}

TEST(EdgePatch, BoundaryPatchTypesAndFaceSets)
{
  // x = 0 Dirichlet, the rest Neumann.
  const Mesh m = retag(generate_cube(1, BoundaryTag::Neumann), [](const Vec3& c) {
    return c.x() < 1e-12 ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
  });

  // Edge (0,0,0)-(0,1,0) between the x = 0 and z = 0 sides.
  const EdgePatch mixed = edge_patch(m, m.find_edge(0, 2).value());
  EXPECT_EQ(mixed.type, PatchType::MixedBoundary);
  EXPECT_EQ(m.face_tag(mixed.faces.front()), BoundaryTag::Neumann);
  EXPECT_EQ(m.face_tag(mixed.faces.back()), BoundaryTag::Dirichlet);
  EXPECT_EQ(mixed.neumann_faces, std::vector<int>{mixed.faces.front()});
  EXPECT_EQ(as_set(mixed.constrained_faces),
            as_set(std::span<const int>(mixed.faces.data(), mixed.faces.size() - 1)));

  // Edge (0,0,0)-(1,0,0) between two Neumann sides.
  const EdgePatch neumann = edge_patch(m, m.find_edge(0, 1).value());
  EXPECT_EQ(neumann.type, PatchType::NeumannBoundary);
  EXPECT_EQ(as_set(neumann.constrained_faces), as_set(neumann.faces));
  EXPECT_EQ(as_set(neumann.neumann_faces), (std::set<int>{neumann.faces.front(), neumann.faces.back()}));

  // An edge inside the x = 0 side.
  int inside = -1;
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const Vec3 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    if (a.x() == 0 && b.x() == 0 && a.y() != b.y() && a.z() != b.z())
      inside = e;
  }
  ASSERT_GE(inside, 0);
  const EdgePatch dir = edge_patch(m, inside);
  EXPECT_EQ(dir.type, PatchType::DirichletBoundary);
  EXPECT_EQ(as_set(dir.constrained_faces), as_set(dir.internal_faces));
  EXPECT_TRUE(dir.neumann_faces.empty());
  EXPECT_TRUE(m.edge_on_dirichlet(inside));
}

TEST(Refinement, KuhnCubeRefinesToFinerKuhnCube)
{
  const Mesh coarse = generate_cube(1, BoundaryTag::Dirichlet);
  const Mesh fine = uniform_refine(coarse);
  const Mesh direct = generate_cube(2, BoundaryTag::Dirichlet);
  EXPECT_EQ(fine.num_tets(), 48);
  EXPECT_EQ(fine.num_edges(), direct.num_edges());
  EXPECT_EQ(fine.num_faces(), direct.num_faces());
  EXPECT_NEAR(fine.total_volume(), 1.0, 1e-14);
  EXPECT_EQ(sorted_barycenters(fine), sorted_barycenters(direct));
  for (int f = 0; f < fine.num_faces(); ++f)
    if (fine.is_boundary_face(f))
    {
      EXPECT_EQ(fine.face_tag(f), BoundaryTag::Dirichlet);
    }
}

TEST(Refinement, PreservesVolumeAndBoundsShape)
{
  const Mesh m = regular_tet();
  Mesh r = uniform_refine(m);
  double parent_kappa = edge_patch(m, 0).metrics.kappa;
  for (int level = 0; level < 2; ++level)
  {
    EXPECT_NEAR(r.total_volume(), m.total_volume(), 1e-14);
    double worst = 0.0;
    for (int t = 0; t < r.num_tets(); ++t)
      worst = std::max(worst, r.tet_diameter(t) / r.tet_inball_diameter(t));
    EXPECT_LT(worst, 3.0 * parent_kappa);
    r = uniform_refine(r);
  }
}

TEST(Marking, DorflerExamples)
{
  EXPECT_EQ(dorfler_mark({3.0, 0.0, 0.0}, 0.5), std::vector<int>{0});
  const auto two = dorfler_mark({2.0, 2.0, 1.0}, 0.6);
  EXPECT_EQ((std::set<int>(two.begin(), two.end())), (std::set<int>{0, 1}));
  const auto all = dorfler_mark({1.0, 0.0, 2.0}, 1.0);
  EXPECT_EQ((std::set<int>(all.begin(), all.end())), (std::set<int>{0, 2}));
  EXPECT_THROW(dorfler_mark({1.0}, 0.0), ConfigError);
  EXPECT_THROW(dorfler_mark({1.0}, 1.5), ConfigError);
  EXPECT_THROW(dorfler_mark({1.0, -1.0}, 0.5), ConfigError);
}

TEST(Marking, DorflerProperty)
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial)
  {
    const Eigen::VectorXd v = random_vector(30, rng).cwiseAbs();
    std::vector<double> ind(v.data(), v.data() + v.size());
    const double theta = 0.1 + 0.9 * std::abs(random_vector(1, rng)[0]);
    const auto marked = dorfler_mark(ind, theta);
    double s = 0.0;
    for (int i : marked)
      s += ind[i] * ind[i];
    EXPECT_GE(s, theta * v.squaredNorm() * (1 - 1e-14));
    // Minimality: dropping the smallest marked entry falls short.
    double smallest = 1e300;
    for (int i : marked)
      smallest = std::min(smallest, ind[i]);
    EXPECT_LT(s - smallest * smallest, theta * v.squaredNorm());
  }
}

TEST(MeshErrors, InvalidInputsThrow)
{
  const std::vector<Vec3> x{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  std::vector<BoundaryFace> b;
  for (const auto& f : Mesh::kLocalFaces)
    b.push_back({{f[0], f[1], f[2]}, BoundaryTag::Neumann});
  EXPECT_THROW(build_mesh(x, {{0, 1, 2, 4}}, b), MeshError);
  EXPECT_THROW(build_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}, {{0, 1, 2, 3}}, b),
               MeshError);
  EXPECT_THROW(build_mesh(x, {{0, 1, 2, 3}}, std::span(b.data(), 3)), MeshError);

  // Face {0,1,2} shared by three cells.
  const std::vector<Vec3> y{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                            Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(0.2, 0.2, 2)};
  EXPECT_THROW(build_mesh(y, {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}}, {}), MeshError);
}

TEST(MeshIo, RoundTrip)
{
  const Mesh m = retag(generate_cube(2, BoundaryTag::Neumann), [](const Vec3& c) {
    return c.z() > 1 - 1e-12 ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
  });
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  ASSERT_EQ(r.num_tets(), m.num_tets());
  ASSERT_EQ(r.num_faces(), m.num_faces());
  for (int v = 0; v < m.num_vertices(); ++v)
    EXPECT_EQ(r.vertex(v), m.vertex(v));
  for (int t = 0; t < m.num_tets(); ++t)
    EXPECT_EQ(r.tet(t), m.tet(t));
  for (int f = 0; f < m.num_faces(); ++f)
  {
    const auto& v = m.face(f);
    const int g = r.find_face(v[0], v[1], v[2]).value();
    EXPECT_EQ(r.face_tag(g), m.face_tag(f));
  }
}

TEST(MeshIo, CommentsAndBlankLines)
{
  std::istringstream in("# a single cell\n"
                        "tetmesh 1\n\n"
                        "vertices 4   # count\n"
                        "0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                        "tets 1\n0 1 2 3\n"
                        "boundary 4\n1 2 3 N\n0 2 3 D\n0 1 3 N\n0 1 2 N\n");
  const Mesh m = read_mesh(in);
  EXPECT_EQ(m.num_tets(), 1);
  EXPECT_TRUE(m.has_dirichlet());
}

TEST(MeshIo, ErrorsCarryLineNumbers)
{
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try
    {
      read_mesh(in);
    }
    catch (const MeshFormatError& e)
    {
      return e.line();
    }
    return -1;
  };
  const std::string head = "tetmesh 1\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n";
  EXPECT_EQ(line_of("tetmesh 2\n"), 1);
  EXPECT_EQ(line_of("tetmesh 1\nvertices 4\n0 0\n"), 3);
  EXPECT_EQ(line_of(head + "tets 1\n0 1 2 9\n"), 8);
  EXPECT_EQ(line_of(head + "tets 1\n0 1 2 3\nboundary 1\n0 1 2 X\n"), 10);
  EXPECT_EQ(line_of(head + "tets 1\n0 1 2 3\nboundary 4\n1 2 3 N\n0 2 3 N\n0 1 3 N\n0 1 2 N\nextra\n"),
            14);
  EXPECT_EQ(line_of(head + "tets 1\n"), 8);
  EXPECT_THROW(read_mesh_file("/nonexistent/mesh.txt"), MeshError);
}
