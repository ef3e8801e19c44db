#include "curlcurl/cases.hpp"
#include "curlcurl/dof_space.hpp"
#include "curlcurl/quadrature.hpp"
#include "curlcurl/shape_functions.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace curlcurl;
using namespace curlcurl::testing;

namespace
{

const std::array<Family, 3> kFamilies{Family::Lagrange, Family::Nedelec, Family::RaviartThomas};

Mesh skewed_tet()
{
  return single_tet({Vec3(0.1, -0.2, 0.0), Vec3(1.3, 0.1, 0.2), Vec3(0.2, 0.9, -0.1), Vec3(0.3, 0.2, 1.1)});
}

/// Shapes evaluated at one physical point: rows shapes, columns components.
Eigen::MatrixXd values_at(const ReferenceBasis& basis, const TetGeometry& g, const Vec3& x)
{
  BasisValues bv;
  basis_eval(basis, g, g.to_barycentric(x), bv, false);
  return bv.values;
}

/// Per-entity dof counts of the classical spaces.
int expected_entity_size(Family family, int p, int dim)
{
  switch (family)
  {
  case Family::Lagrange:
  {
    const int r = p;
    const int counts[4] = {1, r - 1, (r - 1) * (r - 2) / 2, (r - 1) * (r - 2) * (r - 3) / 6};
    return std::max(0, counts[dim]);
  }
  case Family::Nedelec:
  {
    const int counts[4] = {0, p + 1, p * (p + 1), (p - 1) * p * (p + 1) / 2};
    return counts[dim];
  }
  case Family::RaviartThomas:
  {
    const int counts[4] = {0, 0, (p + 1) * (p + 2) / 2, p * (p + 1) * (p + 2) / 2};
    return counts[dim];
  }
  }
  return -1;
}

} // namespace

TEST(ShapeFunctions, Dimensions)
{
  EXPECT_EQ(local_dimension(Family::Nedelec, 0), 6);
  EXPECT_EQ(local_dimension(Family::Nedelec, 1), 20);
  EXPECT_EQ(local_dimension(Family::RaviartThomas, 0), 4);
  EXPECT_EQ(local_dimension(Family::RaviartThomas, 1), 15);
  EXPECT_EQ(local_dimension(Family::Lagrange, 1), 4);
  EXPECT_EQ(local_dimension(Family::Lagrange, 2), 10);
  for (Family fam : kFamilies)
    for (int p = fam == Family::Lagrange ? 1 : 0; p <= 5; ++p)
    {
      const ReferenceBasis& b = ReferenceBasis::get(fam, p);
      EXPECT_EQ(b.size(), local_dimension(fam, p));
      for (int dim = 0; dim <= 3; ++dim)
        EXPECT_EQ(b.entity_size(dim), expected_entity_size(fam, p, dim)) << to_string(fam) << p << dim;
    }
}

TEST(ShapeFunctions, LinearIndependence)
{
  std::mt19937_64 rng(1);
  const Mesh m = skewed_tet();
  const TetGeometry g = m.geometry(0);
  for (Family fam : kFamilies)
    for (int p = fam == Family::Lagrange ? 1 : 0; p <= 4; ++p)
    {
      const ReferenceBasis& b = ReferenceBasis::get(fam, p);
      BasisValues bv;
      basis_eval(b, g, random_bary(3 * b.size(), rng), bv, false);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bv.values.transpose());
      qr.setThreshold(1e-10);
      EXPECT_EQ(qr.rank(), b.size()) << to_string(fam) << " " << p;
    }
}

TEST(ShapeFunctions, DerivativesMatchFiniteDifferences)
{
  std::mt19937_64 rng(2);
  const Mesh m = skewed_tet();
  const TetGeometry g = m.geometry(0);
  const double h = 1e-5;
  for (Family fam : kFamilies)
    for (int p = fam == Family::Lagrange ? 1 : 0; p <= 3; ++p)
    {
      const ReferenceBasis& b = ReferenceBasis::get(fam, p);
      const Eigen::MatrixXd bary = random_bary(4, rng);
      BasisValues bv;
      basis_eval(b, g, bary, bv);
      for (int q = 0; q < bary.cols(); ++q)
      {
        const Vec3 x = g.to_physical(Eigen::Vector4d(bary.col(q)));
        // Jacobian d(component c)/d(x_k) per shape.
        std::array<Eigen::MatrixXd, 3> jac;
        for (int k = 0; k < 3; ++k)
        {
          const Vec3 dx = h * Vec3::Unit(k);
          jac[k] = (values_at(b, g, x + dx) - values_at(b, g, x - dx)) / (2 * h);
        }
        for (int s = 0; s < b.size(); ++s)
        {
          if (fam == Family::Lagrange)
          {
            const Vec3 grad(jac[0](s, 0), jac[1](s, 0), jac[2](s, 0));
            EXPECT_LT((grad - bv.derivs.block<1, 3>(s, 3 * q).transpose()).norm(), 1e-7);
          }
          else if (fam == Family::Nedelec)
          {
            const Vec3 curl(jac[1](s, 2) - jac[2](s, 1), jac[2](s, 0) - jac[0](s, 2),
                            jac[0](s, 1) - jac[1](s, 0));
            EXPECT_LT((curl - bv.derivs.block<1, 3>(s, 3 * q).transpose()).norm(), 1e-7);
          }
          else
          {
            const double div = jac[0](s, 0) + jac[1](s, 1) + jac[2](s, 2);
            EXPECT_NEAR(div, bv.derivs(s, q), 1e-7);
          }
        }
      }
    }
}

TEST(ShapeFunctions, TracesVanishOffTheirEntity)
{
  std::mt19937_64 rng(3);
  const Mesh m = skewed_tet();
  const TetGeometry g = m.geometry(0);
  for (Family fam : kFamilies)
    for (int p = fam == Family::Lagrange ? 1 : 0; p <= 3; ++p)
    {
      const ReferenceBasis& b = ReferenceBasis::get(fam, p);
      for (int f = 0; f < 4; ++f)
      {
        const int fid = m.tet_faces(0)[f];
        const Vec3 n = m.face_normal(fid);
        Eigen::MatrixXd bary = random_bary(5, rng);
        bary.row(f).setZero();
        bary.array().rowwise() /= bary.colwise().sum().array();
        BasisValues bv;
        basis_eval(b, g, bary, bv, false);
        const auto& closure = b.face_closure(f);
        for (int s = 0; s < b.size(); ++s)
        {
          if (std::find(closure.begin(), closure.end(), s) != closure.end())
            continue;
          for (int q = 0; q < bary.cols(); ++q)
          {
            if (fam == Family::Lagrange)
              EXPECT_NEAR(bv.values(s, q), 0.0, 1e-13);
            else
            {
              const Vec3 v = bv.values.block<1, 3>(s, 3 * q).transpose();
              const double trace = fam == Family::Nedelec ? tangential_component(v, n).norm() : v.dot(n);
              EXPECT_NEAR(trace, 0.0, 1e-12) << to_string(fam) << p << " shape " << s;
            }
          }
        }
      }
    }
}

TEST(DofSpace, GlobalCountsFollowEntityCounts)
{
  const Mesh m = generate_cube(1, BoundaryTag::Neumann);
  for (Family fam : kFamilies)
    for (int p = fam == Family::Lagrange ? 1 : 0; p <= 3; ++p)
    {
      const int counts[4] = {m.num_vertices(), m.num_edges(), m.num_faces(), m.num_tets()};
      int expected = 0;
      for (int dim = 0; dim < 4; ++dim)
        expected += counts[dim] * expected_entity_size(fam, p, dim);
      EXPECT_EQ(DofSpace::conforming(m, fam, p)->size(), expected);
      EXPECT_EQ(DofSpace::broken(m, fam, p)->size(), m.num_tets() * local_dimension(fam, p));
    }
}

TEST(DofSpace, ConformingTracesMatchAcrossFaces)
{
  std::mt19937_64 rng(4);
  const Mesh m = generate_cube(1, BoundaryTag::Neumann);
  for (Family fam : kFamilies)
    for (int p = fam == Family::Lagrange ? 1 : 0; p <= 3; ++p)
    {
      auto space = DofSpace::conforming(m, fam, p);
      const DiscreteField field(space, random_vector(space->size(), rng));
      for (int f = 0; f < m.num_faces(); ++f)
      {
        const auto& ts = m.face_tets(f);
        if (ts[1] < 0)
          continue;
        const Vec3 n = m.face_normal(f);
        for (int trial = 0; trial < 3; ++trial)
        {
          Eigen::Vector3d w = random_bary(1, rng).col(0).head<3>();
          w /= w.sum();
          const Eigen::VectorXd a = field_value(field, space->local_tet(ts[0]), face_point_bary(m, ts[0], f, w));
          const Eigen::VectorXd b = field_value(field, space->local_tet(ts[1]), face_point_bary(m, ts[1], f, w));
          if (fam == Family::Lagrange)
            EXPECT_NEAR(a[0], b[0], 1e-12);
          else if (fam == Family::Nedelec)
            EXPECT_LT(tangential_component(Vec3(a - b), n).norm(), 1e-12);
          else
            EXPECT_NEAR(Vec3(a).dot(n), Vec3(b).dot(n), 1e-12);
        }
      }
    }
}

TEST(DofSpace, ConformingFieldIsABrokenField)
{
  std::mt19937_64 rng(5);
  const Mesh m = generate_cube(1, BoundaryTag::Neumann);
  auto conf = DofSpace::conforming(m, Family::Nedelec, 2);
  auto brok = DofSpace::broken(m, Family::Nedelec, 2);
  const DiscreteField fc(conf, random_vector(conf->size(), rng));
  Eigen::VectorXd cb = Eigen::VectorXd::Zero(brok->size());
  for (int k = 0; k < conf->num_tets(); ++k)
  {
    const Eigen::VectorXd local = fc.local_coefficients(k);
    const auto dofs = brok->tet_dofs(brok->local_tet(conf->tet(k)));
    for (std::size_t a = 0; a < dofs.size(); ++a)
      cb[dofs[a]] = local[static_cast<int>(a)];
  }
  const DiscreteField fb(brok, cb);
  const Eigen::MatrixXd bary = random_bary(6, rng);
  for (int t = 0; t < m.num_tets(); ++t)
  {
    Eigen::MatrixXd va, vb, ca, cbv;
    fc.eval(conf->local_tet(t), bary, &va, &ca);
    fb.eval(brok->local_tet(t), bary, &vb, &cbv);
    EXPECT_LT((va - vb).norm(), 1e-13);
    EXPECT_LT((ca - cbv).norm(), 1e-12);
  }
}

TEST(ShapeFunctions, ExactSequence)
{
  std::mt19937_64 rng(6);
  const Mesh m = skewed_tet();
  const TetGeometry g = m.geometry(0);
  for (int p = 0; p <= 3; ++p)
  {
    const Eigen::MatrixXd bary = random_bary(4 * local_dimension(Family::RaviartThomas, p), rng);
    BasisValues ned, rt, lag;
    basis_eval(ReferenceBasis::get(Family::Nedelec, p), g, bary, ned);
    basis_eval(ReferenceBasis::get(Family::RaviartThomas, p), g, bary, rt);
    basis_eval(ReferenceBasis::get(Family::Lagrange, p + 1), g, bary, lag);

    // curl N_p lies in RT_p and its divergence vanishes.
    const Eigen::VectorXd c = random_vector(ned.values.rows(), rng);
    const Eigen::VectorXd curl = ned.derivs.transpose() * c;
    const Eigen::MatrixXd a = rt.values.transpose();
    const Eigen::VectorXd fit = a.colPivHouseholderQr().solve(curl);
    EXPECT_LT((a * fit - curl).norm(), 1e-10 * curl.norm()) << p;
    EXPECT_LT((rt.derivs.transpose() * fit).norm(), 1e-9 * fit.norm()) << p;

    // grad P_{p+1} lies in N_p.
    const Eigen::VectorXd l = random_vector(lag.values.rows(), rng);
    const Eigen::VectorXd grad = lag.derivs.transpose() * l;
    const Eigen::MatrixXd an = ned.values.transpose();
    const Eigen::VectorXd gfit = an.colPivHouseholderQr().solve(grad);
    EXPECT_LT((an * gfit - grad).norm(), 1e-10 * grad.norm()) << p;
    EXPECT_LT((ned.derivs.transpose() * gfit).norm(), 1e-9 * gfit.norm()) << p;
  }
}

TEST(ShapeFunctions, StokesOnFaces)
{
  std::mt19937_64 rng(7);
  const Mesh m = skewed_tet();
  auto space = DofSpace::conforming(m, Family::Nedelec, 2);
  const DiscreteField v(space, random_vector(space->size(), rng));
  const auto& tri = triangle_quadrature(6);
  const auto& line = line_quadrature(6);
  for (int f = 0; f < 4; ++f)
  {
    const auto& fv = m.face(f);
    const Vec3 n = m.face_normal(f);
    // Flux of the curl.
    double flux = 0.0;
    for (int q = 0; q < tri.size(); ++q)
      flux += tri.weights[q] * surface_curl(Vec3(field_deriv(v, 0, face_point_bary(m, 0, f, tri.points.col(q)))), n);
    flux *= 2.0 * m.face_area(f);
    // Circulation along the boundary, oriented by the right-hand rule about n.
    const Vec3 x0 = m.vertex(fv[0]), x1 = m.vertex(fv[1]), x2 = m.vertex(fv[2]);
    const double s = (x1 - x0).cross(x2 - x0).dot(n) > 0 ? 1.0 : -1.0;
    double circ = 0.0;
    for (int k = 0; k < 3; ++k)
    {
      Eigen::Vector3d wa = Eigen::Vector3d::Unit(k), wb = Eigen::Vector3d::Unit((k + 1) % 3);
      const Vec3 t = m.vertex(fv[(k + 1) % 3]) - m.vertex(fv[k]);
      for (int q = 0; q < line.size(); ++q)
      {
        const Eigen::Vector3d w = line.points(0, q) * wa + line.points(1, q) * wb;
        circ += line.weights[q] * Vec3(field_value(v, 0, face_point_bary(m, 0, f, w))).dot(t);
      }
    }
    EXPECT_NEAR(s * circ, flux, 1e-12);
  }
}

TEST(EdgeFunction, MatchesWhitneyFormAndMoments)
{
  const Mesh m = generate_cube(2, BoundaryTag::Neumann);
  std::mt19937_64 rng(8);
  auto n0 = DofSpace::conforming(m, Family::Nedelec, 0);
  for (int e = 0; e < m.num_edges(); e += 7)
  {
    const DiscreteField psi = edge_function(n0, e);
    const DiscreteField local = edge_function(m, e);
    const double len = m.edge_length(e);
    const int vd = m.edge(e)[0], vu = m.edge(e)[1];
    for (int t = 0; t < m.num_tets(); ++t)
    {
      const TetGeometry g = m.geometry(t);
      const auto& sv = m.sorted_tet(t);
      const int id = static_cast<int>(std::find(sv.begin(), sv.end(), vd) - sv.begin());
      const int iu = static_cast<int>(std::find(sv.begin(), sv.end(), vu) - sv.begin());
      const Eigen::Vector4d b = random_bary(1, rng).col(0);
      Vec3 expected = Vec3::Zero(), expected_curl = Vec3::Zero();
      if (id < 4 && iu < 4)
      {
        expected = len * (b[id] * g.grad_lambda.col(iu) - b[iu] * g.grad_lambda.col(id));
        expected_curl = 2.0 * len * g.grad_lambda.col(id).cross(g.grad_lambda.col(iu));
        const int k = local.space().local_tet(t);
        ASSERT_GE(k, 0);
        EXPECT_LT((Vec3(field_value(local, k, b)) - expected).norm(), 1e-12);
      }
      EXPECT_LT((Vec3(field_value(psi, t, b)) - expected).norm(), 1e-12);
      EXPECT_LT((Vec3(field_deriv(psi, t, b)) - expected_curl).norm(), 1e-11);
      // Tangential moments along the cell edges.
      for (int le = 0; le < 6; ++le)
      {
        const int ge = m.tet_edges(t)[le];
        Eigen::Vector4d mid = Eigen::Vector4d::Zero();
        mid[Mesh::kLocalEdges[le][0]] = mid[Mesh::kLocalEdges[le][1]] = 0.5;
        const double moment = Vec3(field_value(psi, t, mid)).dot(m.tangent(ge)) * m.edge_length(ge);
        EXPECT_NEAR(moment, ge == e ? len : 0.0, 1e-12);
      }
    }
  }
}

TEST(EdgeFunction, PartitionOfUnity)
{
  const Mesh m = generate_cube(2, BoundaryTag::Neumann);
  std::mt19937_64 rng(9);
  auto n0 = DofSpace::conforming(m, Family::Nedelec, 0);
  std::vector<DiscreteField> psi;
  for (int e = 0; e < m.num_edges(); ++e)
    psi.push_back(edge_function(n0, e));
  for (int t = 0; t < m.num_tets(); ++t)
  {
    const Eigen::Vector4d b = random_bary(1, rng).col(0);
    Mat3 sum = Mat3::Zero();
    for (int e : m.tet_edges(t))
      sum += Vec3(field_value(psi[e], t, b)) * m.tangent(e).transpose();
    EXPECT_LT((sum - Mat3::Identity()).norm(), 1e-12);
  }
}
