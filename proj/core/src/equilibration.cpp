#include "curlcurl/equilibration.hpp"

#include "sparse_solve.hpp"

#include "curlcurl/parallel.hpp"
#include "curlcurl/quadrature.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace curlcurl
{

const char* to_string(EstimatorMethod method)
{
  switch (method)
  {
  case EstimatorMethod::PatchMixed:
    return "patch";
  case EstimatorMethod::Sweep:
    return "sweep";
  case EstimatorMethod::Both:
    return "both";
  }
  return "unknown";
}

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

int local_face(const Mesh& mesh, int t, int f)
{
  const auto& faces = mesh.tet_faces(t);
  const auto it = std::find(faces.begin(), faces.end(), f);
  if (it == faces.end())
    throw Error("face " + std::to_string(f) + " is not a face of cell " + std::to_string(t));
  return static_cast<int>(it - faces.begin());
}

int local_vertex(const Mesh& mesh, int t, int v)
{
  const auto& s = mesh.sorted_tet(t);
  return static_cast<int>(std::find(s.begin(), s.end(), v) - s.begin());
}

/// Triangle quadrature points of face f as barycentric points of cell t, with
/// physical weights.
void face_points(const Mesh& mesh, int t, int f, int degree, Eigen::MatrixXd& bary,
                 Eigen::VectorXd& weights)
{
  const auto& rule = triangle_quadrature(degree);
  const int lf = local_face(mesh, t, f);
  bary = Eigen::MatrixXd::Zero(4, rule.size());
  for (int i = 0; i < 3; ++i)
    bary.row(Mesh::kLocalFaces[lf][i]) = rule.points.row(i);
  weights = rule.weights * (2.0 * mesh.face_area(f));
}

/// Points along edge (d, u) of cell t as barycentric points.
Eigen::MatrixXd edge_points(const Mesh& mesh, int t, int d, int u, int degree)
{
  const auto& rule = line_quadrature(degree);
  Eigen::MatrixXd bary = Eigen::MatrixXd::Zero(4, rule.size());
  bary.row(local_vertex(mesh, t, d)) = rule.points.row(0);
  bary.row(local_vertex(mesh, t, u)) = rule.points.row(1);
  return bary;
}

struct SparseSolve
{
  Eigen::VectorXd x;
  double residual = 0.0;
};

SparseSolve solve_sparse(int n, const std::vector<Eigen::Triplet<double>>& trip,
                         const Eigen::VectorXd& rhs, const char* what)
{
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  const auto r = detail::sparse_solve(a, rhs, what);
  return {r.x, r.residual};
}

/// Dofs of a conforming space on the closure of the given faces.
std::vector<int> closure_of(const DofSpace& space, const std::vector<int>& faces)
{
  return space.closure_dofs(faces);
}

} // namespace

ProjectedSource project_source(const Mesh& mesh, const EdgePatch& patch, int degree,
                               const CellVectorFn& j, int quad_degree)
{
  const int p = degree;
  auto rt = DofSpace::conforming(mesh, Family::RaviartThomas, p, patch.tets);
  auto pz = DofSpace::broken(mesh, Family::Lagrange, p, patch.tets);
  std::vector<int> index(rt->size(), 0);
  for (int d : closure_of(*rt, patch.neumann_faces))
    index[d] = -1;
  int nw = 0;
  for (int& i : index)
    i = i < 0 ? -1 : nw++;
  const int n = nw + pz->size();

  const auto& rule = tet_quadrature(2 * p + 2);
  const auto& rhs_rule = tet_quadrature(quad_degree >= 0 ? quad_degree : 2 * p + 6);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  BasisValues bw, bz, bf;
  for (int k = 0; k < rt->num_tets(); ++k)
  {
    const int t = rt->tet(k);
    const TetGeometry g = mesh.geometry(t);
    basis_eval(rt->basis(), g, rule.points, bw);
    basis_eval(pz->basis(), g, rule.points, bz, false);
    basis_eval(rt->basis(), g, rhs_rule.points, bf, false);
    const Eigen::VectorXd w = rule.weights * (6.0 * g.volume);
    const Eigen::MatrixXd mloc = bw.values * repeat3(w).asDiagonal() * bw.values.transpose();
    const Eigen::MatrixXd dloc = bz.values * w.asDiagonal() * bw.derivs.transpose();
    const Eigen::VectorXd wr = repeat3(rhs_rule.weights * (6.0 * g.volume));
    const Eigen::VectorXd floc = bf.values * wr.cwiseProduct(flatten(j(t, g, rhs_rule.points)));
    const auto wd = rt->tet_dofs(k);
    const auto zd = pz->tet_dofs(k);
    for (std::size_t a = 0; a < wd.size(); ++a)
    {
      const int ga = index[wd[a]];
      if (ga < 0)
        continue;
      rhs[ga] += floc[a];
      for (std::size_t b = 0; b < wd.size(); ++b)
        if (index[wd[b]] >= 0)
          trip.emplace_back(ga, index[wd[b]], mloc(a, b));
      for (std::size_t z = 0; z < zd.size(); ++z)
      {
        trip.emplace_back(nw + zd[z], ga, dloc(z, a));
        trip.emplace_back(ga, nw + zd[z], dloc(z, a));
      }
    }
  }
  const SparseSolve s = solve_sparse(n, trip, rhs, "source projection");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(rt->size());
  for (int d = 0; d < rt->size(); ++d)
    if (index[d] >= 0)
      c[d] = s.x[index[d]];

  ProjectedSource out;
  out.kkt_residual = s.residual;
  out.j_h = DiscreteField(rt, std::move(c));
  double div = 0.0;
  for (int k = 0; k < rt->num_tets(); ++k)
  {
    const TetGeometry g = mesh.geometry(rt->tet(k));
    Eigen::MatrixXd d;
    out.j_h.eval(k, rule.points, nullptr, &d);
    div += d.row(0).cwiseAbs2().dot(rule.weights) * 6.0 * g.volume;
  }
  out.divergence = std::sqrt(div);
  return out;
}

PatchFlux patch_equilibrate(const Mesh& mesh, const EdgePatch& patch, int degree,
                            const CellVectorFn& j_h, const CellVectorFn& chi)
{
  auto space = DofSpace::conforming(mesh, Family::Nedelec, degree, patch.tets);
  CurlConstrainedProblem prob;
  prob.nedelec = space;
  prob.fixed.assign(space->size(), 0);
  for (int d : closure_of(*space, patch.neumann_faces))
    prob.fixed[d] = 1;
  prob.normal_zero_faces = patch.neumann_faces;
  prob.target = j_h;
  prob.chi = chi;
  prob.quad_degree = 2 * degree + 2;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->size());
  const CurlConstrainedResult r = minimize_curl_constrained(prob, c);

  PatchFlux out;
  out.h = DiscreteField(space, std::move(c));
  out.eta = r.objective;
  out.curl_residual = r.curl_residual;
  out.j_norm = r.target_norm;
  out.kkt_residual = r.kkt_residual;
  return out;
}

std::vector<int> sweep_faces(const EdgePatch& patch, int j)
{
  const int n = patch.size();
  const bool first_neumann = std::find(patch.neumann_faces.begin(), patch.neumann_faces.end(),
                                       patch.faces.front()) != patch.neumann_faces.end();
  const bool last_neumann = !patch.is_interior() &&
                            std::find(patch.neumann_faces.begin(), patch.neumann_faces.end(),
                                      patch.faces.back()) != patch.neumann_faces.end();
  std::vector<int> out;
  if (j > 1)
    out.push_back(patch.faces[j - 1]);
  else if (first_neumann)
    out.push_back(patch.faces[0]);
  if (j == n && (patch.is_interior() || last_neumann))
    if (std::find(out.begin(), out.end(), patch.faces[n]) == out.end())
      out.push_back(patch.faces[n]);
  return out;
}

namespace
{

/// Fixes the N_0 trace on F_0 to the constrained L2 fit of the mean tangential
/// trace of chi on that face.
void fix_mean_trace(const Mesh& mesh, const EdgePatch& patch, const DofSpace& space,
                    const CellVectorFn& j_h, const CellVectorFn& chi, Eigen::VectorXd& coeffs,
                    std::vector<std::uint8_t>& fixed)
{
  const int f = patch.faces.front();
  const Vec3 n = mesh.face_normal(f);
  std::vector<int> cells{0};
  if (patch.is_interior() && patch.size() > 1)
    cells.push_back(patch.size() - 1);
  const int t1 = patch.tets.front();
  const int lf = local_face(mesh, t1, f);
  const auto& closure = space.basis().face_closure(lf);
  const int m = static_cast<int>(closure.size());

  Eigen::MatrixXd bary;
  Eigen::VectorXd w;
  face_points(mesh, t1, f, 4, bary, w);
  const TetGeometry g1 = mesh.geometry(t1);
  BasisValues bv;
  basis_eval(space.basis(), g1, bary, bv);
  Eigen::Matrix3Xd mean = Eigen::Matrix3Xd::Zero(3, bary.cols());
  for (int k : cells)
  {
    const int t = patch.tets[k];
    Eigen::MatrixXd bk;
    Eigen::VectorXd wk;
    face_points(mesh, t, f, 4, bk, wk);
    mean += chi(t, mesh.geometry(t), bk) / static_cast<double>(cells.size());
  }
  const double flux = (j_h(t1, g1, bary).transpose() * n).dot(w);

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  for (int q = 0; q < bary.cols(); ++q)
  {
    const Vec3 target = tangential_component(mean.col(q), n);
    for (int a = 0; a < m; ++a)
    {
      const Vec3 pa = tangential_component(bv.values.block<1, 3>(closure[a], 3 * q).transpose(), n);
      rhs[a] += w[q] * pa.dot(target);
      for (int b = 0; b < m; ++b)
        kkt(a, b) += w[q] * pa.dot(
                                tangential_component(bv.values.block<1, 3>(closure[b], 3 * q).transpose(), n));
      kkt(a, m) += w[q] * surface_curl(bv.derivs.block<1, 3>(closure[a], 3 * q).transpose(), n);
    }
  }
  kkt.row(m).head(m) = kkt.col(m).head(m).transpose();
  rhs[m] = flux;
  const Eigen::VectorXd x = kkt.fullPivLu().solve(rhs);
  const auto dofs = space.tet_dofs(0);
  for (int a = 0; a < m; ++a)
  {
    coeffs[dofs[closure[a]]] = x[a];
    fixed[dofs[closure[a]]] = 1;
  }
}

} // namespace

PatchFlux sweep_equilibrate(const Mesh& mesh, const EdgePatch& patch, int degree,
                            const CellVectorFn& j_h, const CellVectorFn& chi,
                            const SweepOptions& options)
{
  auto space = DofSpace::conforming(mesh, Family::Nedelec, degree, patch.tets);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->size());
  std::vector<std::uint8_t> base(space->size(), 0);
  for (int d : closure_of(*space, patch.neumann_faces))
    base[d] = 1;

  const bool first_neumann = std::find(patch.neumann_faces.begin(), patch.neumann_faces.end(),
                                       patch.faces.front()) != patch.neumann_faces.end();
  const bool trick = options.mean_trace && degree == 0 && !first_neumann;
  if (trick)
    fix_mean_trace(mesh, patch, *space, j_h, chi, c, base);

  PatchFlux out;
  double obj = 0.0, res = 0.0, jn = 0.0;
  for (int j = 1; j <= patch.size(); ++j)
  {
    std::vector<int> faces = sweep_faces(patch, j);
    if (trick && j == 1)
      faces.push_back(patch.faces.front());
    CurlConstrainedProblem prob;
    prob.nedelec = space;
    prob.cells = {j - 1};
    prob.fixed = base;
    for (int f : faces)
      for (int d : space->face_closure_dofs(f, j - 1))
        prob.fixed[d] = 1;
    prob.normal_zero_faces = faces;
    prob.target = j_h;
    prob.chi = chi;
    prob.quad_degree = 2 * degree + 2;
    const CurlConstrainedResult r = minimize_curl_constrained(prob, c);
    obj += r.objective * r.objective;
    res += r.curl_residual * r.curl_residual;
    jn += r.target_norm * r.target_norm;
    out.kkt_residual = std::max(out.kkt_residual, r.kkt_residual);
    out.unknowns.push_back(r.free_dofs - (r.curl_multipliers - r.div_multipliers));
  }
  out.h = DiscreteField(space, std::move(c));
  out.eta = std::sqrt(obj);
  out.curl_residual = std::sqrt(res);
  out.j_norm = std::sqrt(jn);
  return out;
}

CompatibilityReport compatibility_check(const Mesh& mesh, const EdgePatch& patch,
                                        const DiscreteField& r_t, const DiscreteField& w,
                                        double tolerance)
{
  if (r_t.space().family() != Family::RaviartThomas || w.space().family() != Family::Nedelec)
    throw Error("compatibility check expects Raviart-Thomas volume data and Nedelec face data");
  const int p = std::max(r_t.space().degree(), w.space().degree());
  const auto& rule = tet_quadrature(2 * p + 2);
  CompatibilityReport out;

  double div = 0.0, scale = 0.0;
  for (int t : patch.tets)
  {
    const int k = r_t.space().local_tet(t);
    if (k < 0 || w.space().local_tet(t) < 0)
      throw Error("compatibility data do not cover the patch");
    const TetGeometry g = mesh.geometry(t);
    Eigen::MatrixXd v, d;
    r_t.eval(k, rule.points, &v, &d);
    const Eigen::VectorXd wq = rule.weights * (6.0 * g.volume);
    div += d.row(0).cwiseAbs2().dot(wq);
    scale += v.colwise().squaredNorm().dot(wq);
  }
  out.divergence = std::sqrt(div);
  out.scale = 1.0 + std::sqrt(scale);

  for (int f : patch.constrained_faces)
  {
    const Vec3 n = mesh.face_normal(f);
    Eigen::VectorXd jump;
    Eigen::VectorXd weights;
    for (int t : mesh.face_tets(f))
    {
      if (t < 0 || patch.local_index(t) < 0)
        continue;
      const double s = mesh.tet_face_sign(t, local_face(mesh, t, f));
      Eigen::MatrixXd bary;
      face_points(mesh, t, f, 2 * p + 2, bary, weights);
      Eigen::MatrixXd rv, curl;
      r_t.eval(r_t.space().local_tet(t), bary, &rv, nullptr);
      w.eval(w.space().local_tet(t), bary, nullptr, &curl);
      const Eigen::VectorXd contrib = s * ((rv - curl).transpose() * n);
      if (jump.size() == 0)
        jump = contrib;
      else
        jump += contrib;
    }
    out.face_mismatch = std::max(out.face_mismatch, std::sqrt(jump.cwiseAbs2().dot(weights)));
  }

  const bool needs_edge = patch.type == PatchType::Interior || patch.type == PatchType::NeumannBoundary;
  if (needs_edge)
  {
    const Vec3 tau = mesh.tangent(patch.edge);
    const int n = patch.size();
    Eigen::VectorXd sum;
    auto add = [&](int face_index) {
      const int f = patch.faces[face_index];
      // Orientation from K_j towards K_{j+1}; F_0 is entered from outside.
      const int kj = face_index == 0 ? patch.tets.front() : patch.tets[face_index - 1];
      const double o = face_index == 0 ? -mesh.tet_face_sign(kj, local_face(mesh, kj, f))
                                       : mesh.tet_face_sign(kj, local_face(mesh, kj, f));
      for (int t : mesh.face_tets(f))
      {
        if (t < 0 || patch.local_index(t) < 0)
          continue;
        const double s = mesh.tet_face_sign(t, local_face(mesh, t, f));
        const Eigen::MatrixXd bary = edge_points(mesh, t, patch.vertex_d, patch.vertex_u, 2 * p + 2);
        Eigen::MatrixXd v;
        w.eval(w.space().local_tet(t), bary, &v, nullptr);
        const Eigen::VectorXd contrib = o * s * (v.transpose() * tau);
        if (sum.size() == 0)
          sum = contrib;
        else
          sum += contrib;
      }
    };
    if (patch.type == PatchType::Interior)
      for (int j = 1; j <= n; ++j)
        add(j);
    else
      for (int j = 0; j <= n; ++j)
        add(j);
    out.edge_circulation = sum.cwiseAbs().maxCoeff();
  }

  const double tol = tolerance * out.scale;
  if (out.divergence > tol)
    out.violation = "divergence of the volume data is nonzero";
  else if (out.face_mismatch > tol)
    out.violation = "normal jump of the volume data differs from the surface curl of the face data";
  else if (out.edge_circulation > tol)
    out.violation = "edge circulation of the face data does not vanish";
  out.compatible = out.violation.empty();
  return out;
}

bool patch_is_convex(const Mesh& mesh, const EdgePatch& patch)
{
  std::vector<int> faces;
  for (int t : patch.tets)
    for (int f : mesh.tet_faces(t))
      faces.push_back(f);
  std::sort(faces.begin(), faces.end());
  std::vector<int> verts{patch.vertex_d, patch.vertex_u};
  verts.insert(verts.end(), patch.ring.begin(), patch.ring.end());
  const double tol = 1e-10 * patch.metrics.h_omega;
  for (std::size_t i = 0; i < faces.size(); ++i)
  {
    const bool repeated = (i > 0 && faces[i - 1] == faces[i]) ||
                          (i + 1 < faces.size() && faces[i + 1] == faces[i]);
    if (repeated)
      continue;
    const int f = faces[i];
    const Vec3 n = mesh.face_normal(f);
    const Vec3 x0 = mesh.vertex(mesh.face(f)[0]);
    bool below = false, above = false;
    for (int v : verts)
    {
      const double d = n.dot(mesh.vertex(v) - x0);
      below = below || d < -tol;
      above = above || d > tol;
    }
    if (below && above)
      return false;
  }
  return true;
}

CutoffConstants cutoff_constants(const Mesh& mesh, const EdgePatch& patch, double c_p_fallback)
{
  CutoffConstants out;
  out.convex = patch_is_convex(mesh, patch);
  if (patch.is_interior() && out.convex)
    out.c_p = 1.0 / std::numbers::pi;
  else if (patch.type == PatchType::DirichletBoundary)
    out.c_p = 1.0;
  else
    out.c_p = c_p_fallback;

  const double len = mesh.edge_length(patch.edge);
  double psi_inf = 0.0, curl_inf = 0.0;
  for (int t : patch.tets)
  {
    const TetGeometry g = mesh.geometry(t);
    const Vec3 gd = g.grad_lambda.col(local_vertex(mesh, t, patch.vertex_d));
    const Vec3 gu = g.grad_lambda.col(local_vertex(mesh, t, patch.vertex_u));
    psi_inf = std::max({psi_inf, len * gd.norm(), len * gu.norm()});
    curl_inf = std::max(curl_inf, 2.0 * len * gd.cross(gu).norm());
  }
  const ShapeMetrics& m = patch.metrics;
  out.c_cont = psi_inf + out.c_p * m.h_omega * curl_inf;
  out.c_kappa = (2.0 * len / m.rho) * (1.0 + out.c_p * m.kappa);
  return out;
}

double oscillation(const Mesh& mesh, const EdgePatch& patch, const CellVectorFn& j,
                   const CellVectorFn& j_h, double c_pfw, int quad_degree)
{
  if (c_pfw == 0.0)
    return 0.0;
  return c_pfw * patch.metrics.h_omega * cell_distance(mesh, patch.tets, j, j_h, quad_degree);
}

void aggregate(EstimatorReport& report, double c_l)
{
  double cofree = 0.0, ofree = 0.0, upper = 0.0, osc = 0.0;
  for (const auto& e : report.patches)
  {
    cofree += e.eta * e.eta;
    ofree += std::pow(e.c_cont * e.eta, 2);
    upper += std::pow(e.c_cont * (e.eta + e.osc), 2);
    osc += e.osc * e.osc;
  }
  report.c_l = c_l;
  report.eta_cofree = std::sqrt(cofree);
  report.eta_ofree = std::sqrt(6.0 * ofree);
  report.upper_bound = std::sqrt(6.0) * c_l * std::sqrt(upper);
  report.osc_total = std::sqrt(osc);
}

EstimatorReport estimate(const Mesh& mesh, const DiscreteField& a_h, const VectorFunction& source,
                         const EstimatorOptions& options)
{
  if (a_h.space().family() != Family::Nedelec || a_h.space().num_tets() != mesh.num_tets())
    throw ConfigError("estimator expects a Nedelec field on the whole mesh");
  if (options.c_pfw < 0.0 || options.c_l <= 0.0 || options.c_p_fallback <= 0.0)
    throw ConfigError("estimator constants must be positive");
  const int p = a_h.space().degree();
  const int qd = options.source_quad_degree >= 0 ? options.source_quad_degree : 2 * p + 6;
  const CellVectorFn j = physical(source);
  const CellVectorFn chi = field_curls(a_h);

  EstimatorReport report;
  report.patches.resize(mesh.num_edges());
  report.oscillation_disabled = options.c_pfw == 0.0;
  parallel_for(mesh.num_edges(), options.threads, [&](int e) {
    PatchEstimate& est = report.patches[e];
    const EdgePatch patch = edge_patch(mesh, e);
    est.edge = e;
    est.type = patch.type;
    est.num_tets = patch.size();
    est.kappa = patch.metrics.kappa;
    const ProjectedSource ps = project_source(mesh, patch, p, j, qd);
    est.projection_residual = ps.kkt_residual;
    const CellVectorFn jh = field_values(ps.j_h);
    if (options.method != EstimatorMethod::Sweep)
    {
      PatchFlux f = patch_equilibrate(mesh, patch, p, jh, chi);
      est.eta_patch = f.eta;
      est.curl_residual_patch = f.curl_residual;
      est.j_norm = f.j_norm;
      est.kkt_residual = f.kkt_residual;
      if (options.keep_flux)
        est.flux = std::move(f.h);
    }
    if (options.method != EstimatorMethod::PatchMixed)
    {
      PatchFlux f = sweep_equilibrate(mesh, patch, p, jh, chi, options.sweep);
      est.eta_sweep = f.eta;
      est.curl_residual_sweep = f.curl_residual;
      est.j_norm = f.j_norm;
      est.kkt_residual = std::max(est.kkt_residual, f.kkt_residual);
      if (options.keep_flux && options.method == EstimatorMethod::Sweep)
        est.flux = std::move(f.h);
    }
    est.eta = options.method == EstimatorMethod::Sweep ? est.eta_sweep : est.eta_patch;
    const CutoffConstants cc = cutoff_constants(mesh, patch, options.c_p_fallback);
    est.c_p = cc.c_p;
    est.c_cont = cc.c_cont;
    est.c_kappa = cc.c_kappa;
    est.osc = oscillation(mesh, patch, j, jh, options.c_pfw, qd);
  });
  aggregate(report, options.c_l);
  return report;
}

} // namespace curlcurl
