#include "curlcurl/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace curlcurl
{

const char* to_string(CaseKind kind)
{
  switch (kind)
  {
  case CaseKind::CubeSmooth:
    return "cube-smooth";
  case CaseKind::LShapeSingular:
    return "lshape-singular";
  case CaseKind::File:
    return "file";
  }
  return "unknown";
}

CaseKind parse_case(const std::string& name)
{
  if (name == "cube-smooth")
    return CaseKind::CubeSmooth;
  if (name == "lshape-singular")
    return CaseKind::LShapeSingular;
  if (name == "file")
    return CaseKind::File;
  throw ConfigError("unknown case '" + name + "'");
}

EstimatorMethod parse_method(const std::string& name)
{
  if (name == "patch")
    return EstimatorMethod::PatchMixed;
  if (name == "sweep")
    return EstimatorMethod::Sweep;
  if (name == "both")
    return EstimatorMethod::Both;
  throw ConfigError("unknown estimator '" + name + "'");
}

void CaseConfig::validate() const
{
  if (degree < 0)
    throw ConfigError("degree must be nonnegative");
  if (levels < 1)
    throw ConfigError("levels must be at least 1");
  if (!(theta > 0.0 && theta <= 1.0))
    throw ConfigError("theta must lie in (0, 1]");
  if (!(c_l > 0.0))
    throw ConfigError("C_L must be positive");
  if (!(c_pfw >= 0.0))
    throw ConfigError("C_PFW must be nonnegative");
  if (!(c_p_fallback > 0.0))
    throw ConfigError("fallback Poincare constant must be positive");
  if (kind != CaseKind::File && n < 1)
    throw ConfigError("N must be at least 1");
  if (kind == CaseKind::File && mesh_path.empty())
    throw ConfigError("the file case needs a mesh path");
  if (threads < 1)
    throw ConfigError("thread count must be positive");
}

Mesh case_mesh(const CaseConfig& config, int n)
{
  switch (config.kind)
  {
  case CaseKind::CubeSmooth:
    return generate_cube(n, config.cube_boundary);
  case CaseKind::LShapeSingular:
    return generate_lshape(n);
  case CaseKind::File:
    return read_mesh_file(config.mesh_path);
  }
  throw ConfigError("unknown case");
}

ManufacturedSolution case_solution(const CaseConfig& config)
{
  if (config.kind == CaseKind::LShapeSingular)
    return lshape_solution(config.lshape_alpha);
  return cube_smooth_solution();
}

namespace
{

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

RunResult run_case(const CaseConfig& config)
{
  config.validate();
  const ManufacturedSolution sol = case_solution(config);
  RunResult result;
  std::shared_ptr<const Mesh> file_mesh;
  for (int level = 0; level < config.levels; ++level)
  {
    LevelTimings timing;
    auto start = std::chrono::steady_clock::now();
    const int n = config.kind == CaseKind::File ? -1 : config.n << level;
    std::shared_ptr<const Mesh> mesh;
    if (config.kind == CaseKind::File)
    {
      file_mesh = level == 0 ? std::make_shared<const Mesh>(case_mesh(config, 0))
                             : std::make_shared<const Mesh>(uniform_refine(*file_mesh));
      mesh = file_mesh;
    }
    else
      mesh = std::make_shared<const Mesh>(case_mesh(config, n));
    timing.mesh_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    CurlCurlProblem problem;
    problem.mesh = mesh.get();
    problem.degree = config.degree;
    problem.source = sol.source;
    problem.exact_solution = sol.a;
    problem.exact_curl = sol.curl_a;
    problem.c_l = config.c_l;
    problem.threads = config.threads;
    GlobalSolution solution = solve(problem);
    EnergyError err = energy_error(solution.a_h, sol.curl_a, -1, config.threads);
    timing.solve_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    EstimatorOptions opts;
    opts.method = config.method;
    opts.c_l = config.c_l;
    opts.c_pfw = config.c_pfw;
    opts.c_p_fallback = config.c_p_fallback;
    opts.sweep.mean_trace = config.sweep_mean_trace;
    opts.threads = config.threads;
    EstimatorReport report = estimate(*mesh, solution.a_h, sol.source, opts);
    timing.estimate_seconds = seconds_since(start);

    std::vector<double> indicators(report.patches.size());
    LevelRow row;
    row.level = level;
    row.n = n;
    row.h = mesh->mesh_size();
    row.ndofs = solution.num_dofs;
    row.error = err.global;
    row.eta_cofree = report.eta_cofree;
    row.eta_ofree = report.eta_ofree;
    row.upper_bound = report.upper_bound;
    row.osc_total = report.osc_total;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.eff_cofree = err.global > 0.0 ? report.eta_cofree / err.global : nan;
    row.eff_ofree = err.global > 0.0 ? report.eta_ofree / err.global : nan;
    for (std::size_t i = 0; i < report.patches.size(); ++i)
    {
      const auto& pe = report.patches[i];
      indicators[i] = pe.eta;
      if (err.per_edge[pe.edge] > 0.0)
        row.max_local_eff = std::max(row.max_local_eff, pe.eta / err.per_edge[pe.edge]);
    }
    std::vector<int> marked;
    bool any = false;
    for (double v : indicators)
      any = any || v > 0.0;
    if (any)
      marked = dorfler_mark(indicators, config.theta);
    row.n_marked = static_cast<int>(marked.size());

    result.rows.push_back(row);
    result.timings.push_back(timing);
    result.marked.push_back(std::move(marked));
    if (config.keep_details)
      result.details.push_back({mesh, std::move(solution), std::move(err), std::move(report)});
  }
  return result;
}

std::string format_number(double value)
{
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

const char* const kRunCsvHeader = "level,N,h,ndofs,error,eta_cofree,eta_ofree,upper_bound,osc_total,"
                                  "eff_cofree,eff_ofree,max_local_eff,n_marked";

void write_run_csv(std::ostream& out, const RunResult& result)
{
  out << kRunCsvHeader << "\r\n";
  for (const auto& r : result.rows)
    out << r.level << ',' << r.n << ',' << format_number(r.h) << ',' << r.ndofs << ','
        << format_number(r.error) << ',' << format_number(r.eta_cofree) << ','
        << format_number(r.eta_ofree) << ',' << format_number(r.upper_bound) << ','
        << format_number(r.osc_total) << ',' << format_number(r.eff_cofree) << ','
        << format_number(r.eff_ofree) << ',' << format_number(r.max_local_eff) << ','
        << r.n_marked << "\r\n";
}

void write_timings_csv(std::ostream& out, const RunResult& result)
{
  out << "level,mesh_seconds,solve_seconds,estimate_seconds\r\n";
  for (std::size_t i = 0; i < result.timings.size(); ++i)
  {
    const auto& t = result.timings[i];
    out << i << ',' << format_number(t.mesh_seconds) << ',' << format_number(t.solve_seconds)
        << ',' << format_number(t.estimate_seconds) << "\r\n";
  }
}

void write_marked_csv(std::ostream& out, const RunResult& result)
{
  out << "level,edge\r\n";
  for (std::size_t i = 0; i < result.marked.size(); ++i)
    for (int e : result.marked[i])
      out << i << ',' << e << "\r\n";
}

int central_interior_edge(const Mesh& mesh)
{
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : mesh.vertices())
    centroid += v;
  centroid /= mesh.num_vertices();
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (mesh.is_boundary_edge(e))
      continue;
    const Vec3 mid = 0.5 * (mesh.vertex(mesh.edge(e)[0]) + mesh.vertex(mesh.edge(e)[1]));
    const double d = (mid - centroid).norm();
    if (d < best_dist - 1e-12)
    {
      best = e;
      best_dist = d;
    }
  }
  if (best < 0)
    throw MeshError("mesh has no interior edge");
  return best;
}

StabilityExperiment run_patch_experiment(const PatchExperimentConfig& config)
{
  config.base.validate();
  if (config.degrees.empty())
    throw ConfigError("no degrees given");
  for (int p : config.degrees)
    if (p < 0)
      throw ConfigError("degrees must be nonnegative");
  if (config.enrichment < 0)
    throw ConfigError("enrichment must be nonnegative");
  const Mesh mesh = case_mesh(config.base, config.base.n);
  const int e = config.edge >= 0 ? config.edge : central_interior_edge(mesh);
  if (e >= mesh.num_edges())
    throw ConfigError("edge " + std::to_string(e) + " out of range");
  const EdgePatch patch = edge_patch(mesh, e);
  return stability_ratio(mesh, patch, config.family, config.degrees, config.enrichment,
                         config.base.seed, config.base.threads);
}

const char* const kPatchCsvHeader = "degree,eta_patch,eta_sweep,dual_norm,ratio_patch,ratio_sweep";

void write_patch_csv(std::ostream& out, const StabilityExperiment& experiment)
{
  out << kPatchCsvHeader << "\r\n";
  for (const auto& r : experiment.rows)
    out << r.degree << ',' << format_number(r.eta_patch) << ',' << format_number(r.eta_sweep)
        << ',' << format_number(r.dual_norm) << ',' << format_number(r.ratio_patch) << ','
        << format_number(r.ratio_sweep) << "\r\n";
}

} // namespace curlcurl
