#include "curlcurl/oracles.hpp"

#include "curlcurl/parallel.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace curlcurl
{

double residual_dual_norm(const Mesh& mesh, const EdgePatch& patch, int degree,
                          const CellVectorFn& j_h, const CellVectorFn& chi, int enrichment)
{
  if (enrichment < 0)
    throw ConfigError("enrichment must be nonnegative");
  return patch_equilibrate(mesh, patch, degree + enrichment, j_h, chi).eta;
}

const char* to_string(TestFamily family)
{
  return family == TestFamily::RandomBroken ? "random" : "gradient";
}

PatchData random_patch_data(const Mesh& mesh, const EdgePatch& patch, int degree,
                            TestFamily family, std::uint64_t seed)
{
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(degree));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PatchData out;
  if (family == TestFamily::RandomBroken)
  {
    auto space = DofSpace::broken(mesh, Family::Nedelec, degree, patch.tets);
    Eigen::VectorXd c(space->size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      c[i] = dist(rng);
    const DiscreteField chi(space, std::move(c));
    out.chi = field_values(chi);
    const ProjectedSource ps = project_source(mesh, patch, degree, field_curls(chi), 2 * degree + 2);
    out.j_h = field_values(ps.j_h);
  }
  else
  {
    auto space = DofSpace::broken(mesh, Family::Lagrange, degree + 1, patch.tets);
    Eigen::VectorXd c(space->size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      c[i] = dist(rng);
    const DiscreteField q(space, std::move(c));
    out.chi = [q](int tet, const TetGeometry&, const Eigen::MatrixXd& bary) -> Eigen::Matrix3Xd {
      Eigen::MatrixXd grad;
      q.eval(q.space().local_tet(tet), bary, nullptr, &grad);
      return grad;
    };
    out.j_h = [](int, const TetGeometry&, const Eigen::MatrixXd& bary) -> Eigen::Matrix3Xd {
      return Eigen::Matrix3Xd::Zero(3, bary.cols());
    };
  }
  return out;
}

StabilityExperiment stability_ratio(const Mesh& mesh, const EdgePatch& patch, TestFamily family,
                                    const std::vector<int>& degrees, int enrichment,
                                    std::uint64_t seed, int threads)
{
  StabilityExperiment out;
  out.edge = patch.edge;
  out.enrichment = enrichment;
  out.family = family;
  out.rows.resize(degrees.size());
  parallel_for(static_cast<int>(degrees.size()), threads, [&](int i) {
    const int p = degrees[i];
    const PatchData data = random_patch_data(mesh, patch, p, family, seed);
    StabilityRow& row = out.rows[i];
    row.degree = p;
    row.eta_patch = patch_equilibrate(mesh, patch, p, data.j_h, data.chi).eta;
    row.eta_sweep = sweep_equilibrate(mesh, patch, p, data.j_h, data.chi).eta;
    row.dual_norm = residual_dual_norm(mesh, patch, p, data.j_h, data.chi, enrichment);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.ratio_patch = row.dual_norm > 0.0 ? row.eta_patch / row.dual_norm : nan;
    row.ratio_sweep = row.dual_norm > 0.0 ? row.eta_sweep / row.dual_norm : nan;
  });
  return out;
}

BoundCheck bound_check(const EstimatorReport& report, const EnergyError& error)
{
  BoundCheck out;
  out.error = error.global;
  out.upper_bound = report.upper_bound;
  out.upper_holds = out.error <= out.upper_bound;
  out.margin = out.error > 0.0 ? out.upper_bound / out.error - 1.0
                               : std::numeric_limits<double>::infinity();
  out.local_constants.assign(report.patches.size(), 0.0);
  for (std::size_t i = 0; i < report.patches.size(); ++i)
  {
    const auto& p = report.patches[i];
    const double denom = error.per_edge[p.edge] + p.osc;
    if (denom > 0.0)
      out.local_constants[i] = p.eta / denom;
    out.max_local_constant = std::max(out.max_local_constant, out.local_constants[i]);
  }
  return out;
}

} // namespace curlcurl
