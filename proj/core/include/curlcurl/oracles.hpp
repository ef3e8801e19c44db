#pragma once

#include "curlcurl/equilibration.hpp"
#include "curlcurl/global_solver.hpp"

#include <cstdint>
#include <vector>

namespace curlcurl
{

/// Degree-(p + enrichment) patch minimum of ||h - chi|| subject to
/// curl h = j_h: an upper approximation of the localized residual dual norm.
double residual_dual_norm(const Mesh& mesh, const EdgePatch& patch, int degree,
                          const CellVectorFn& j_h, const CellVectorFn& chi, int enrichment);

enum class TestFamily : std::uint8_t
{
  /// chi random in broken N_p, j_h the projection of its elementwise curl.
  RandomBroken,
  /// chi the gradient of a random broken P_{p+1} function, j_h = 0.
  GradientOnly
};

const char* to_string(TestFamily family);

/// Seeded test data on a patch.
struct PatchData
{
  CellVectorFn chi;
  CellVectorFn j_h;
};

/// Coefficients uniform in [-1, 1] from a 64-bit Mersenne twister seeded with
/// seed + degree.
PatchData random_patch_data(const Mesh& mesh, const EdgePatch& patch, int degree,
                            TestFamily family, std::uint64_t seed);

struct StabilityRow
{
  int degree = 0;
  double eta_patch = 0.0;
  double eta_sweep = 0.0;
  double dual_norm = 0.0;
  double ratio_patch = 0.0;
  double ratio_sweep = 0.0;
};

struct StabilityExperiment
{
  int edge = -1;
  int enrichment = 0;
  TestFamily family = TestFamily::RandomBroken;
  std::vector<StabilityRow> rows;
};

/// eta(p) / dual_norm(p, enrichment) for the patch and sweep methods on seeded
/// data, for each degree.
StabilityExperiment stability_ratio(const Mesh& mesh, const EdgePatch& patch, TestFamily family,
                                    const std::vector<int>& degrees, int enrichment,
                                    std::uint64_t seed, int threads = 1);

struct BoundCheck
{
  bool upper_holds = false;
  double error = 0.0;
  double upper_bound = 0.0;
  /// upper_bound / error - 1.
  double margin = 0.0;
  /// eta_e / (error_e + osc_e) per edge (0 where both vanish).
  std::vector<double> local_constants;
  double max_local_constant = 0.0;
};

/// Compares a report against the true error.
BoundCheck bound_check(const EstimatorReport& report, const EnergyError& error);

} // namespace curlcurl
