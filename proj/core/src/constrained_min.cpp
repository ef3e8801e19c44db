#include "curlcurl/constrained_min.hpp"

#include "sparse_solve.hpp"

#include "curlcurl/quadrature.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace curlcurl
{

namespace
{

Eigen::VectorXd repeat3(const Eigen::VectorXd& w)
{
  Eigen::VectorXd out(3 * w.size());
  for (Eigen::Index q = 0; q < w.size(); ++q)
    out.segment<3>(3 * q).setConstant(w[q]);
  return out;
}

Eigen::VectorXd flatten(const Eigen::Matrix3Xd& m)
{
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

} // namespace

double cell_distance(const Mesh& mesh, const std::vector<int>& tets, const CellVectorFn& f,
                     const CellVectorFn& g, int quad_degree)
{
  const auto& rule = tet_quadrature(quad_degree);
  double sum = 0.0;
  for (int t : tets)
  {
    const TetGeometry geo = mesh.geometry(t);
    const Eigen::Matrix3Xd d = f(t, geo, rule.points) - g(t, geo, rule.points);
    sum += d.colwise().squaredNorm().dot(rule.weights) * 6.0 * geo.volume;
  }
  return std::sqrt(sum);
}

double cell_norm(const Mesh& mesh, const std::vector<int>& tets, const CellVectorFn& f,
                 int quad_degree)
{
  const auto& rule = tet_quadrature(quad_degree);
  double sum = 0.0;
  for (int t : tets)
  {
    const TetGeometry geo = mesh.geometry(t);
    sum += f(t, geo, rule.points).colwise().squaredNorm().dot(rule.weights) * 6.0 * geo.volume;
  }
  return std::sqrt(sum);
}

CurlConstrainedResult minimize_curl_constrained(const CurlConstrainedProblem& problem,
                                                Eigen::VectorXd& coeffs)
{
  const DofSpace& vspace = *problem.nedelec;
  if (vspace.family() != Family::Nedelec || vspace.is_broken())
    throw Error("constrained minimization needs a conforming Nedelec space");
  if (coeffs.size() != vspace.size())
    throw Error("coefficient vector length does not match the space dimension");
  const Mesh& mesh = vspace.mesh();
  const int p = vspace.degree();

  std::vector<int> cells = problem.cells;
  if (cells.empty())
  {
    cells.resize(vspace.num_tets());
    std::iota(cells.begin(), cells.end(), 0);
  }
  std::vector<int> tets;
  for (int k : cells)
    tets.push_back(vspace.tet(k));

  auto wspace = DofSpace::conforming(mesh, Family::RaviartThomas, p, tets);
  auto zspace = DofSpace::broken(mesh, Family::Lagrange, p, tets);

  // Unknown numbering: free Nedelec dofs, free RT dofs, broken P_p dofs.
  std::unordered_map<int, int> hindex;
  for (int k : cells)
    for (int d : vspace.tet_dofs(k))
      if (problem.fixed.empty() || !problem.fixed[d])
        hindex.try_emplace(d, static_cast<int>(hindex.size()));
  const int nh = static_cast<int>(hindex.size());
  std::vector<int> windex(wspace->size(), 0);
  for (int f : problem.normal_zero_faces)
  {
    bool in_support = false;
    for (int t : mesh.face_tets(f))
      in_support = in_support || (t >= 0 && wspace->local_tet(t) >= 0);
    if (!in_support)
      continue;
    for (int d : wspace->face_closure_dofs(f))
      windex[d] = -1;
  }
  int nw = 0;
  for (int& i : windex)
    i = i < 0 ? -1 : nh + nw++;
  const int nz = zspace->size();
  const int n = nh + nw + nz;

  const auto& vbasis = vspace.basis();
  const auto& wbasis = wspace->basis();
  const auto& zbasis = zspace->basis();
  const int qd = problem.quad_degree >= 0 ? problem.quad_degree : 2 * p + 2;
  const auto& rule = tet_quadrature(qd);

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  BasisValues bv, bw, bz;
  for (std::size_t c = 0; c < cells.size(); ++c)
  {
    const int t = tets[c];
    const TetGeometry g = mesh.geometry(t);
    basis_eval(vbasis, g, rule.points, bv);
    basis_eval(wbasis, g, rule.points, bw);
    basis_eval(zbasis, g, rule.points, bz, false);
    const Eigen::VectorXd w = rule.weights * (6.0 * g.volume);
    const Eigen::VectorXd w3 = repeat3(w);
    const Eigen::MatrixXd vw = bv.values * w3.asDiagonal();
    const Eigen::MatrixXd mloc = vw * bv.values.transpose();
    const Eigen::MatrixXd cloc = bw.values * w3.asDiagonal() * bv.derivs.transpose();
    const Eigen::MatrixXd dloc = bz.values * w.asDiagonal() * bw.derivs.transpose();
    const Eigen::VectorXd fh = vw * flatten(problem.chi(t, g, rule.points));
    const Eigen::VectorXd fw = bw.values * w3.cwiseProduct(flatten(problem.target(t, g, rule.points)));

    const auto vd = vspace.tet_dofs(cells[c]);
    const int k = wspace->local_tet(t);
    const auto wd = wspace->tet_dofs(k);
    const auto zd = zspace->tet_dofs(k);
    std::vector<int> hrow(vd.size());
    for (std::size_t i = 0; i < vd.size(); ++i)
    {
      const auto it = hindex.find(vd[i]);
      hrow[i] = it == hindex.end() ? -1 : it->second;
    }
    for (std::size_t i = 0; i < vd.size(); ++i)
    {
      const int gi = hrow[i];
      if (gi < 0)
        continue;
      rhs[gi] += fh[i];
      for (std::size_t j = 0; j < vd.size(); ++j)
      {
        if (hrow[j] >= 0)
          trip.emplace_back(gi, hrow[j], mloc(i, j));
        else
          rhs[gi] -= mloc(i, j) * coeffs[vd[j]];
      }
    }
    for (std::size_t r = 0; r < wd.size(); ++r)
    {
      const int gr = windex[wd[r]];
      if (gr < 0)
        continue;
      rhs[gr] += fw[r];
      for (std::size_t j = 0; j < vd.size(); ++j)
      {
        if (hrow[j] >= 0)
        {
          trip.emplace_back(gr, hrow[j], cloc(r, j));
          trip.emplace_back(hrow[j], gr, cloc(r, j));
        }
        else
          rhs[gr] -= cloc(r, j) * coeffs[vd[j]];
      }
      for (std::size_t z = 0; z < zd.size(); ++z)
      {
        const int gz = nh + nw + zd[z];
        trip.emplace_back(gz, gr, dloc(z, r));
        trip.emplace_back(gr, gz, dloc(z, r));
      }
    }
  }

  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(trip.begin(), trip.end());
  system.makeCompressed();
  const auto solved = detail::sparse_solve(system, rhs, "constrained minimization");
  const Eigen::VectorXd& x = solved.x;

  CurlConstrainedResult out;
  out.kkt_residual = solved.residual;
  for (const auto& [dof, i] : hindex)
    coeffs[dof] = x[i];
  out.free_dofs = nh;
  out.curl_multipliers = nw;
  out.div_multipliers = nz;

  double obj = 0.0, res = 0.0, tn = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c)
  {
    const int t = tets[c];
    const TetGeometry g = mesh.geometry(t);
    basis_eval(vbasis, g, rule.points, bv);
    const auto vd = vspace.tet_dofs(cells[c]);
    Eigen::VectorXd lc(vd.size());
    for (std::size_t i = 0; i < vd.size(); ++i)
      lc[static_cast<Eigen::Index>(i)] = coeffs[vd[i]];
    const Eigen::MatrixXd h = combine(bv.values, lc, 3);
    const Eigen::MatrixXd curl = combine(bv.derivs, lc, 3);
    const Eigen::Matrix3Xd chi = problem.chi(t, g, rule.points);
    const Eigen::Matrix3Xd target = problem.target(t, g, rule.points);
    const Eigen::VectorXd w = rule.weights * (6.0 * g.volume);
    obj += (h - chi).colwise().squaredNorm().dot(w);
    res += (curl - target).colwise().squaredNorm().dot(w);
    tn += target.colwise().squaredNorm().dot(w);
  }
  out.objective = std::sqrt(obj);
  out.curl_residual = std::sqrt(res);
  out.target_norm = std::sqrt(tn);
  return out;
}

} // namespace curlcurl
