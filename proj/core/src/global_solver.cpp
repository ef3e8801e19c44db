#include "curlcurl/global_solver.hpp"

#include "sparse_solve.hpp"

#include "curlcurl/parallel.hpp"
#include "curlcurl/quadrature.hpp"

#include <Eigen/Sparse>

#include <cmath>

namespace curlcurl
{

namespace
{

std::vector<int> dirichlet_faces(const Mesh& mesh)
{
  std::vector<int> out;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.is_boundary_face(f) && mesh.face_on_dirichlet(f))
      out.push_back(f);
  return out;
}

/// Maps dofs to free indices (-1 for eliminated dofs).
std::vector<int> free_numbering(int size, const std::vector<int>& eliminated, int& count)
{
  std::vector<int> index(size, 0);
  for (int d : eliminated)
    index[d] = -1;
  count = 0;
  for (int& i : index)
    i = i < 0 ? -1 : count++;
  return index;
}

/// Scales reference weights to a physical cell.
Eigen::VectorXd physical_weights(const QuadratureRule& rule, double volume)
{
  return rule.weights * (6.0 * volume);
}

Eigen::VectorXd repeat3(const Eigen::VectorXd& w)
{
  Eigen::VectorXd out(3 * w.size());
  for (Eigen::Index q = 0; q < w.size(); ++q)
    out.segment<3>(3 * q).setConstant(w[q]);
  return out;
}

} // namespace

GlobalSolution solve(const CurlCurlProblem& problem)
{
  if (!problem.mesh)
    throw ConfigError("problem has no mesh");
  if (problem.degree < 0)
    throw ConfigError("polynomial degree must be nonnegative");
  if (!problem.source)
    throw ConfigError("problem has no source term");
  const Mesh& mesh = *problem.mesh;
  const int p = problem.degree;

  auto vspace = DofSpace::conforming(mesh, Family::Nedelec, p);
  auto sspace = DofSpace::conforming(mesh, Family::Lagrange, p + 1);
  const auto dfaces = dirichlet_faces(mesh);
  std::vector<int> v_fixed = vspace->closure_dofs(dfaces);
  std::vector<int> s_fixed = sspace->closure_dofs(dfaces);
  if (dfaces.empty())
    s_fixed.push_back(sspace->tet_dofs(0)[0]);

  int nv = 0, ns = 0;
  const auto vfree = free_numbering(vspace->size(), v_fixed, nv);
  const auto sfree = free_numbering(sspace->size(), s_fixed, ns);

  const auto& vbasis = vspace->basis();
  const auto& sbasis = sspace->basis();
  const auto& rule = tet_quadrature(2 * p + 2);
  const auto& rhs_rule = tet_quadrature(2 * p + 6);

  const int threads = std::max(1, problem.threads);
  const int chunks = std::min(threads, mesh.num_tets());
  std::vector<std::vector<Eigen::Triplet<double>>> triplets(chunks);
  std::vector<Eigen::VectorXd> cell_loads(mesh.num_tets());
  const CellVectorFn source = physical(problem.source);

  parallel_for(chunks, threads, [&](int c) {
    const int begin = static_cast<int>(static_cast<long>(mesh.num_tets()) * c / chunks);
    const int end = static_cast<int>(static_cast<long>(mesh.num_tets()) * (c + 1) / chunks);
    auto& trip = triplets[c];
    BasisValues bv, bs, bf;
    for (int t = begin; t < end; ++t)
    {
      const TetGeometry g = mesh.geometry(t);
      basis_eval(vbasis, g, rule.points, bv);
      basis_eval(sbasis, g, rule.points, bs);
      const Eigen::VectorXd w3 = repeat3(physical_weights(rule, g.volume));
      const Eigen::MatrixXd kloc = bv.derivs * w3.asDiagonal() * bv.derivs.transpose();
      const Eigen::MatrixXd bloc = bs.derivs * w3.asDiagonal() * bv.values.transpose();

      basis_eval(vbasis, g, rhs_rule.points, bf, false);
      const Eigen::Matrix3Xd jq = source(t, g, rhs_rule.points);
      const Eigen::VectorXd wr = repeat3(physical_weights(rhs_rule, g.volume));
      const Eigen::VectorXd jflat =
          Eigen::Map<const Eigen::VectorXd>(jq.data(), jq.size()).cwiseProduct(wr);
      cell_loads[t] = bf.values * jflat;

      const auto vd = vspace->tet_dofs(t);
      const auto sd = sspace->tet_dofs(t);
      for (int i = 0; i < vbasis.size(); ++i)
      {
        const int gi = vfree[vd[i]];
        if (gi < 0)
          continue;
        for (int j = 0; j < vbasis.size(); ++j)
        {
          const int gj = vfree[vd[j]];
          if (gj >= 0)
            trip.emplace_back(gi, gj, kloc(i, j));
        }
        for (int q = 0; q < sbasis.size(); ++q)
        {
          const int gq = sfree[sd[q]];
          if (gq < 0)
            continue;
          trip.emplace_back(nv + gq, gi, bloc(q, i));
          trip.emplace_back(gi, nv + gq, bloc(q, i));
        }
      }
    }
  });

  std::vector<Eigen::Triplet<double>> all;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + ns);
  for (int c = 0; c < chunks; ++c)
  {
    all.insert(all.end(), triplets[c].begin(), triplets[c].end());
    triplets[c].clear();
    triplets[c].shrink_to_fit();
  }
  // Summed in cell order so the result does not depend on the thread count.
  for (int t = 0; t < mesh.num_tets(); ++t)
  {
    const auto vd = vspace->tet_dofs(t);
    for (int i = 0; i < vbasis.size(); ++i)
      if (vfree[vd[i]] >= 0)
        rhs[vfree[vd[i]]] += cell_loads[t][i];
  }
  Eigen::SparseMatrix<double> system(nv + ns, nv + ns);
  system.setFromTriplets(all.begin(), all.end());
  all.clear();
  all.shrink_to_fit();
  system.makeCompressed();

  const Eigen::VectorXd x = detail::sparse_solve(system, rhs, "global saddle-point system").x;

  GlobalSolution out;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(vspace->size());
  for (int d = 0; d < vspace->size(); ++d)
    if (vfree[d] >= 0)
      a[d] = x[vfree[d]];
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(sspace->size());
  for (int d = 0; d < sspace->size(); ++d)
    if (sfree[d] >= 0)
      phi[d] = x[nv + sfree[d]];

  const Eigen::VectorXd r = system * x - rhs;
  const double fnorm = rhs.head(nv).norm();
  out.galerkin_residual = r.head(nv).norm() / (fnorm > 0.0 ? fnorm : 1.0);

  // Gauge check: each multiplier row against ||A_h|| ||grad s_q||.
  Eigen::VectorXd grad_sq = Eigen::VectorXd::Zero(ns);
  double a_sq = 0.0;
  {
    BasisValues bv, bs;
    for (int t = 0; t < mesh.num_tets(); ++t)
    {
      const TetGeometry g = mesh.geometry(t);
      basis_eval(vbasis, g, rule.points, bv, false);
      basis_eval(sbasis, g, rule.points, bs);
      const Eigen::VectorXd w3 = repeat3(physical_weights(rule, g.volume));
      const auto vd = vspace->tet_dofs(t);
      Eigen::VectorXd c(vbasis.size());
      for (int i = 0; i < vbasis.size(); ++i)
        c[i] = a[vd[i]];
      const Eigen::RowVectorXd val = c.transpose() * bv.values;
      a_sq += val.cwiseProduct(val).dot(w3);
      const auto sd = sspace->tet_dofs(t);
      for (int q = 0; q < sbasis.size(); ++q)
        if (sfree[sd[q]] >= 0)
          grad_sq[sfree[sd[q]]] += bs.derivs.row(q).cwiseProduct(bs.derivs.row(q)).dot(w3);
    }
  }
  const double a_norm = std::sqrt(a_sq);
  for (int q = 0; q < ns; ++q)
  {
    const double denom = a_norm * std::sqrt(grad_sq[q]);
    if (denom > 0.0)
      out.gauge_residual = std::max(out.gauge_residual, std::abs(r[nv + q]) / denom);
  }

  out.a_h = DiscreteField(vspace, std::move(a));
  out.multiplier = DiscreteField(sspace, std::move(phi));
  out.num_dofs = vspace->size();
  out.num_free_dofs = nv;
  out.num_multipliers = ns;
  return out;
}

EnergyError energy_error(const DiscreteField& a_h, const VectorFunction& exact_curl,
                         int quad_degree, int threads)
{
  const DofSpace& space = a_h.space();
  const Mesh& mesh = space.mesh();
  if (quad_degree < 0)
    quad_degree = 2 * space.degree() + 6;
  const auto& rule = tet_quadrature(quad_degree);
  EnergyError out;
  out.per_tet.assign(mesh.num_tets(), 0.0);
  std::vector<double> exact_sq(mesh.num_tets(), 0.0);
  const CellVectorFn exact = physical(exact_curl);
  parallel_for(space.num_tets(), threads, [&](int k) {
    const int t = space.tet(k);
    const TetGeometry g = mesh.geometry(t);
    Eigen::MatrixXd curl;
    a_h.eval(k, rule.points, nullptr, &curl);
    const Eigen::Matrix3Xd ex = exact(t, g, rule.points);
    const Eigen::VectorXd w = physical_weights(rule, g.volume);
    out.per_tet[t] = (ex - curl).colwise().squaredNorm().dot(w);
    exact_sq[t] = ex.colwise().squaredNorm().dot(w);
  });
  double total = 0.0, total_exact = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t)
  {
    total += out.per_tet[t];
    total_exact += exact_sq[t];
  }
  out.per_edge.assign(mesh.num_edges(), 0.0);
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    double s = 0.0;
    for (int t : mesh.edge_tets(e))
      s += out.per_tet[t];
    out.per_edge[e] = std::sqrt(s);
  }
  for (double& v : out.per_tet)
    v = std::sqrt(v);
  out.global = std::sqrt(total);
  out.exact_norm = std::sqrt(total_exact);
  return out;
}

} // namespace curlcurl
