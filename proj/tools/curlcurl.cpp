#include "curlcurl/parallel.hpp"
#include "curlcurl/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace
{

using namespace curlcurl;

enum ExitCode
{
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kMesh = 3,
  kSolver = 4
};

/// Parses "a..b" or a comma-separated list.
std::vector<int> parse_degrees(const std::string& text)
{
  std::vector<int> out;
  try
  {
    const auto dots = text.find("..");
    if (dots != std::string::npos)
    {
      const int a = std::stoi(text.substr(0, dots));
      const int b = std::stoi(text.substr(dots + 2));
      if (b < a)
        throw ConfigError("empty degree range '" + text + "'");
      for (int p = a; p <= b; ++p)
        out.push_back(p);
      return out;
    }
    std::size_t start = 0;
    while (start <= text.size())
    {
      const auto comma = text.find(',', start);
      out.push_back(std::stoi(text.substr(start, comma - start)));
      if (comma == std::string::npos)
        break;
      start = comma + 1;
    }
  }
  catch (const std::logic_error&)
  {
    throw ConfigError("cannot parse degree list '" + text + "'");
  }
  return out;
}

BoundaryTag parse_boundary(const std::string& name)
{
  if (name == "neumann")
    return BoundaryTag::Neumann;
  if (name == "dirichlet")
    return BoundaryTag::Dirichlet;
  throw ConfigError("unknown boundary '" + name + "'");
}

TestFamily parse_family(const std::string& name)
{
  if (name == "random")
    return TestFamily::RandomBroken;
  if (name == "gradient")
    return TestFamily::GradientOnly;
  throw ConfigError("unknown test family '" + name + "'");
}

std::ofstream open_output(const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open '" + path + "' for writing");
  return out;
}

struct CommonArgs
{
  std::string case_name = "cube-smooth";
  std::string mesh;
  std::string boundary = "neumann";
  int n = 2;
  std::uint64_t seed = 0;
  double alpha = 2.0 / 3.0;
  std::string out;
};

void add_common(CLI::App& app, CommonArgs& args)
{
  app.add_option("--case", args.case_name, "cube-smooth, lshape-singular or file")
      ->check(CLI::IsMember({"cube-smooth", "lshape-singular", "file"}));
  app.add_option("--mesh", args.mesh, "Mesh file for --case file");
  app.add_option("--N", args.n, "Subdivisions per unit length");
  app.add_option("--seed", args.seed, "Seed for random test data");
  app.add_option("--boundary", args.boundary, "Cube boundary tag: neumann or dirichlet");
  app.add_option("--alpha", args.alpha, "Singular exponent of the L-shape solution");
  app.add_option("--out", args.out, "Output CSV path")->required();
}

CaseConfig base_config(const CommonArgs& args)
{
  CaseConfig c;
  c.kind = parse_case(args.case_name);
  c.mesh_path = args.mesh;
  c.n = args.n;
  c.seed = args.seed;
  c.lshape_alpha = args.alpha;
  c.cube_boundary = parse_boundary(args.boundary);
  c.threads = default_threads();
  return c;
}

int check_mesh(const std::string& path)
{
  const Mesh mesh = read_mesh_file(path);
  std::map<std::string, int> types;
  double kappa_min = 1e300, kappa_max = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const EdgePatch patch = edge_patch(mesh, e);
    ++types[to_string(patch.type)];
    kappa_min = std::min(kappa_min, patch.metrics.kappa);
    kappa_max = std::max(kappa_max, patch.metrics.kappa);
  }
  std::cout << "vertices " << mesh.num_vertices() << "\n"
            << "edges " << mesh.num_edges() << "\n"
            << "faces " << mesh.num_faces() << "\n"
            << "tets " << mesh.num_tets() << "\n"
            << "volume " << format_number(mesh.total_volume()) << "\n"
            << "h " << format_number(mesh.mesh_size()) << "\n"
            << "kappa_min " << format_number(kappa_min) << "\n"
            << "kappa_max " << format_number(kappa_max) << "\n";
  for (const auto& [name, count] : types)
    std::cout << "patches_" << name << " " << count << "\n";
  return kOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Curl-curl solver with equilibrated a posteriori error estimators"};
  app.require_subcommand(1);

  CommonArgs run_args;
  int degree = 0, levels = 1;
  std::string estimator = "patch";
  double theta = 0.5, c_l = 1.0, c_pfw = 1.0, c_p_fallback = 1.0;
  bool mean_trace = false;
  auto* run = app.add_subcommand("run", "Convergence study with estimators");
  add_common(*run, run_args);
  run->add_option("--degree", degree, "Polynomial degree p");
  run->add_option("--levels", levels, "Number of refinement levels");
  run->add_option("--estimator", estimator, "patch, sweep or both")
      ->check(CLI::IsMember({"patch", "sweep", "both"}));
  run->add_option("--theta", theta, "Dörfler parameter in (0, 1]");
  run->add_option("--c-l", c_l, "Regular decomposition constant C_L");
  run->add_option("--c-pfw", c_pfw, "Oscillation constant C_PFW");
  run->add_option("--c-p-fallback", c_p_fallback, "Poincare constant for nonconvex patches");
  run->add_flag("--mean-trace", mean_trace, "Sweep: fix the first face trace for p = 0");

  CommonArgs exp_args;
  std::string degrees = "0..4", family = "random";
  int enrich = 3, edge = -1;
  auto* exp = app.add_subcommand("patch-experiment", "Stability ratios on one edge patch");
  add_common(*exp, exp_args);
  exp->add_option("--degrees", degrees, "Degree range a..b or list a,b,c");
  exp->add_option("--enrich", enrich, "Degree enrichment of the reference minimization");
  exp->add_option("--family", family, "Test data: random or gradient")
      ->check(CLI::IsMember({"random", "gradient"}));
  exp->add_option("--edge", edge, "Edge id (default: central interior edge)");

  std::string mesh_path;
  auto* check = app.add_subcommand("check-mesh", "Validate a mesh file and print statistics");
  check->add_option("path", mesh_path, "Mesh file")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try
  {
    if (*run)
    {
      CaseConfig config = base_config(run_args);
      config.degree = degree;
      config.levels = levels;
      config.method = parse_method(estimator);
      config.theta = theta;
      config.c_l = c_l;
      config.c_pfw = c_pfw;
      config.c_p_fallback = c_p_fallback;
      config.sweep_mean_trace = mean_trace;
      config.validate();
      const RunResult result = run_case(config);
      auto out = open_output(run_args.out);
      write_run_csv(out, result);
      auto timings = open_output(run_args.out + ".timings.csv");
      write_timings_csv(timings, result);
      auto marked = open_output(run_args.out + ".marked.csv");
      write_marked_csv(marked, result);
    }
    else if (*exp)
    {
      PatchExperimentConfig config;
      config.base = base_config(exp_args);
      config.degrees = parse_degrees(degrees);
      config.enrichment = enrich;
      config.family = parse_family(family);
      config.edge = edge;
      const StabilityExperiment result = run_patch_experiment(config);
      auto out = open_output(exp_args.out);
      write_patch_csv(out, result);
    }
    else if (*check)
      return check_mesh(mesh_path);
  }
  catch (const ConfigError& e)
  {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  }
  catch (const MeshError& e)
  {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kMesh;
  }
  catch (const SolverError& e)
  {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOk;
}
