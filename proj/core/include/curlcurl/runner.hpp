#pragma once

#include "curlcurl/cases.hpp"
#include "curlcurl/equilibration.hpp"
#include "curlcurl/global_solver.hpp"
#include "curlcurl/oracles.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace curlcurl
{

enum class CaseKind : std::uint8_t
{
  CubeSmooth,
  LShapeSingular,
  File
};

const char* to_string(CaseKind kind);
/// Parses "cube-smooth", "lshape-singular" or "file". Throws ConfigError.
CaseKind parse_case(const std::string& name);
/// Parses "patch", "sweep" or "both". Throws ConfigError.
EstimatorMethod parse_method(const std::string& name);

struct CaseConfig
{
  CaseKind kind = CaseKind::CubeSmooth;
  /// Mesh file for CaseKind::File.
  std::string mesh_path;
  /// Subdivisions per unit length on level 0.
  int n = 2;
  int degree = 0;
  int levels = 1;
  EstimatorMethod method = EstimatorMethod::PatchMixed;
  double theta = 0.5;
  double c_l = 1.0;
  double c_pfw = 1.0;
  double c_p_fallback = 1.0;
  std::uint64_t seed = 0;
  /// Singular exponent of the L-shape solution.
  double lshape_alpha = 2.0 / 3.0;
  /// Boundary of the cube case.
  BoundaryTag cube_boundary = BoundaryTag::Neumann;
  bool sweep_mean_trace = false;
  int threads = 1;
  /// Keep meshes, solutions and reports of every level in the result.
  bool keep_details = false;

  /// Throws ConfigError if a field is out of range.
  void validate() const;
};

struct LevelRow
{
  int level = 0;
  /// Subdivisions per unit length; -1 for file meshes.
  int n = -1;
  double h = 0.0;
  int ndofs = 0;
  double error = 0.0;
  double eta_cofree = 0.0;
  double eta_ofree = 0.0;
  double upper_bound = 0.0;
  double osc_total = 0.0;
  double eff_cofree = 0.0;
  double eff_ofree = 0.0;
  double max_local_eff = 0.0;
  int n_marked = 0;
};

struct LevelTimings
{
  double mesh_seconds = 0.0;
  double solve_seconds = 0.0;
  double estimate_seconds = 0.0;
};

struct LevelDetails
{
  std::shared_ptr<const Mesh> mesh;
  GlobalSolution solution;
  EnergyError error;
  EstimatorReport report;
};

struct RunResult
{
  std::vector<LevelRow> rows;
  std::vector<LevelTimings> timings;
  /// Dörfler-marked edges per level.
  std::vector<std::vector<int>> marked;
  std::vector<LevelDetails> details;
};

/// Mesh of a case at a given subdivision (ignored for files) and its solution.
Mesh case_mesh(const CaseConfig& config, int n);
ManufacturedSolution case_solution(const CaseConfig& config);

/// Runs the configured convergence study.
RunResult run_case(const CaseConfig& config);

/// Column header of the run CSV.
extern const char* const kRunCsvHeader;
void write_run_csv(std::ostream& out, const RunResult& result);
void write_timings_csv(std::ostream& out, const RunResult& result);
void write_marked_csv(std::ostream& out, const RunResult& result);

struct PatchExperimentConfig
{
  CaseConfig base;
  std::vector<int> degrees{0, 1, 2, 3, 4};
  int enrichment = 3;
  TestFamily family = TestFamily::RandomBroken;
  /// Edge of the patch; the interior edge closest to the centroid if negative.
  int edge = -1;
};

/// Interior edge whose midpoint is closest to the vertex centroid (lowest id on
/// ties). Throws MeshError if the mesh has no interior edge.
int central_interior_edge(const Mesh& mesh);

StabilityExperiment run_patch_experiment(const PatchExperimentConfig& config);

extern const char* const kPatchCsvHeader;
void write_patch_csv(std::ostream& out, const StabilityExperiment& experiment);

/// Formats a number with 17 significant digits.
std::string format_number(double value);

} // namespace curlcurl
