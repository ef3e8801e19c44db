#pragma once

#include "curlcurl/constrained_min.hpp"
#include "curlcurl/edge_patch.hpp"

#include <optional>
#include <string>
#include <vector>

namespace curlcurl
{

enum class EstimatorMethod : std::uint8_t
{
  /// Edge-patch mixed problem.
  PatchMixed,
  /// Elementwise sweep around the edge.
  Sweep,
  /// Both; the patch value drives the aggregated estimators.
  Both
};

const char* to_string(EstimatorMethod method);

/// Divergence-free projection of a source onto the patch.
struct ProjectedSource
{
  /// Conforming RT_p field on the patch cells with zero normal trace on the
  /// Neumann faces of the patch.
  DiscreteField j_h;
  /// Relative residual of the projection system.
  double kkt_residual = 0.0;
  /// ||div j_h|| over the patch.
  double divergence = 0.0;
};

/// L2 projection of j onto {v in RT_p(T^e), normal trace zero on the Neumann
/// faces of the patch, div v = 0}. The right-hand side uses quadrature of
/// degree `quad_degree` (2p + 6 if negative).
ProjectedSource project_source(const Mesh& mesh, const EdgePatch& patch, int degree,
                               const CellVectorFn& j, int quad_degree = -1);

/// A flux h on the patch with curl h = j_h.
struct PatchFlux
{
  /// Conforming Nedelec field on the patch cells.
  DiscreteField h;
  /// ||h - chi||_{omega_e}.
  double eta = 0.0;
  /// ||curl h - j_h||_{omega_e}.
  double curl_residual = 0.0;
  /// ||j_h||_{omega_e}.
  double j_norm = 0.0;
  /// Largest relative residual of the linear systems solved.
  double kkt_residual = 0.0;
  /// Sweep only: free dofs minus independent curl constraints, per cell.
  std::vector<int> unknowns;
};

/// min ||h - chi|| over N_q(T^e) conforming, zero tangential trace on the
/// Neumann faces of the patch, curl h = j_h. `degree` q may exceed the degree
/// of j_h and chi.
PatchFlux patch_equilibrate(const Mesh& mesh, const EdgePatch& patch, int degree,
                            const CellVectorFn& j_h, const CellVectorFn& chi);

struct SweepOptions
{
  /// For p = 0 patches whose first face is not Neumann: fix the tangential
  /// trace on F_0 from the mean trace of chi before the sweep.
  bool mean_trace = false;
};

/// Sequential elementwise minimization over K_1..K_n, each cell inheriting
/// tangential traces on the faces it shares with visited cells.
PatchFlux sweep_equilibrate(const Mesh& mesh, const EdgePatch& patch, int degree,
                            const CellVectorFn& j_h, const CellVectorFn& chi,
                            const SweepOptions& options = {});

/// Face set used by the sweep for cell K_j (1-based j).
std::vector<int> sweep_faces(const EdgePatch& patch, int j);

struct CompatibilityReport
{
  bool compatible = true;
  /// ||div r_T|| over the patch.
  double divergence = 0.0;
  /// Largest ||[r_T].n_F - curl_F(r_F)||_F over the face set.
  double face_mismatch = 0.0;
  /// Largest value of the oriented edge circulation sum along the edge.
  double edge_circulation = 0.0;
  /// Scale the tolerance is relative to.
  double scale = 0.0;
  std::string violation;
};

/// Checks the compatibility of volume data r_T (broken RT on the patch cells)
/// and face data r_F on the face set of the patch, where r_F is given as the
/// tangential jump of a broken Nedelec field w on the patch cells. Jumps are
/// sum_K (n_K . n_F) w|_K; the edge condition is taken with each face
/// oriented from K_j towards K_{j+1}.
CompatibilityReport compatibility_check(const Mesh& mesh, const EdgePatch& patch,
                                        const DiscreteField& r_t, const DiscreteField& w,
                                        double tolerance = 1e-10);

struct CutoffConstants
{
  double c_p = 1.0;
  double c_cont = 0.0;
  double c_kappa = 0.0;
  bool convex = false;
};

/// True if every boundary face plane of the patch leaves all patch vertices on
/// the inner side, within 1e-10 h_omega.
bool patch_is_convex(const Mesh& mesh, const EdgePatch& patch);

/// Poincare constant (1/pi for convex interior patches, 1 for Dirichlet
/// patches, `fallback` otherwise) and the cut-off constants
/// C_cont = ||psi_e||_inf + C_P h_omega ||curl psi_e||_inf and
/// C_kappa = (2|e|/rho)(1 + C_P kappa).
CutoffConstants cutoff_constants(const Mesh& mesh, const EdgePatch& patch,
                                 double c_p_fallback = 1.0);

/// C_PFW h_omega ||j - j_h||_{omega_e}.
double oscillation(const Mesh& mesh, const EdgePatch& patch, const CellVectorFn& j,
                   const CellVectorFn& j_h, double c_pfw, int quad_degree);

struct PatchEstimate
{
  int edge = -1;
  PatchType type = PatchType::Interior;
  int num_tets = 0;
  /// Indicator used for aggregation.
  double eta = 0.0;
  double eta_patch = -1.0;
  double eta_sweep = -1.0;
  double osc = 0.0;
  double c_p = 1.0;
  double c_cont = 0.0;
  double c_kappa = 0.0;
  double kappa = 0.0;
  double j_norm = 0.0;
  double curl_residual_patch = 0.0;
  double curl_residual_sweep = 0.0;
  double kkt_residual = 0.0;
  double projection_residual = 0.0;
  std::optional<DiscreteField> flux;
};

struct EstimatorOptions
{
  EstimatorMethod method = EstimatorMethod::PatchMixed;
  double c_l = 1.0;
  double c_pfw = 1.0;
  double c_p_fallback = 1.0;
  /// Quadrature degree for the source (2p + 6 if negative).
  int source_quad_degree = -1;
  SweepOptions sweep;
  bool keep_flux = false;
  int threads = 1;
};

struct EstimatorReport
{
  std::vector<PatchEstimate> patches;
  double eta_ofree = 0.0;
  double eta_cofree = 0.0;
  double upper_bound = 0.0;
  double osc_total = 0.0;
  double c_l = 1.0;
  /// Set when the oscillation constant is 0 (oscillation ignored).
  bool oscillation_disabled = false;
};

/// Fills the aggregated quantities from per-edge estimates.
void aggregate(EstimatorReport& report, double c_l);

/// Per-edge estimators for a discrete solution of the curl-curl problem.
EstimatorReport estimate(const Mesh& mesh, const DiscreteField& a_h, const VectorFunction& source,
                         const EstimatorOptions& options);

} // namespace curlcurl
