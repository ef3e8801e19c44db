#pragma once

#include "curlcurl/shape_functions.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace curlcurl
{

/// Degrees of freedom of one finite element family over a set of mesh cells.
///
/// A conforming space shares the coefficients of shapes attached to common
/// vertices, edges and faces; a broken space gives every cell its own copy.
/// The mesh must outlive the space.
class DofSpace
{
public:
  /// Space over `tets` (all cells if empty), in the given cell order.
  static std::shared_ptr<const DofSpace> conforming(const Mesh& mesh, Family family, int degree,
                                                    std::vector<int> tets = {});
  static std::shared_ptr<const DofSpace> broken(const Mesh& mesh, Family family, int degree,
                                                std::vector<int> tets = {});

  const Mesh& mesh() const { return *mesh_; }
  Family family() const { return basis_->family(); }
  int degree() const { return basis_->degree(); }
  const ReferenceBasis& basis() const { return *basis_; }
  bool is_broken() const { return broken_; }

  int size() const { return size_; }
  int num_tets() const { return static_cast<int>(tets_.size()); }
  /// Mesh cell of support position `local`.
  int tet(int local) const { return tets_[local]; }
  const std::vector<int>& tets() const { return tets_; }
  /// Support position of a mesh cell, or -1.
  int local_tet(int tet) const;
  /// Global dof of each shape of the support cell, in basis order.
  std::span<const int> tet_dofs(int local) const
  {
    const auto n = static_cast<std::size_t>(basis_->size());
    return {tet_dofs_.data() + n * local, n};
  }

  /// Dofs attached to the closure of mesh face f, seen from support cell
  /// `local` (any adjacent support cell if -1; required for broken spaces).
  std::vector<int> face_closure_dofs(int f, int local = -1) const;
  /// Dofs attached to the closure of the given faces, sorted and unique.
  std::vector<int> closure_dofs(std::span<const int> faces) const;

private:
  DofSpace() = default;
  static std::shared_ptr<const DofSpace> make(const Mesh& mesh, Family family, int degree,
                                              std::vector<int> tets, bool broken);

  const Mesh* mesh_ = nullptr;
  const ReferenceBasis* basis_ = nullptr;
  bool broken_ = false;
  bool full_ = false;
  int size_ = 0;
  std::vector<int> tets_;
  std::vector<int> tet_dofs_;
};

/// A coefficient vector attached to a DofSpace.
class DiscreteField
{
public:
  DiscreteField() = default;
  DiscreteField(std::shared_ptr<const DofSpace> space, Eigen::VectorXd coefficients);

  const DofSpace& space() const { return *space_; }
  const std::shared_ptr<const DofSpace>& space_ptr() const { return space_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  Eigen::VectorXd& coefficients() { return coeffs_; }

  /// Coefficients of the shapes of one support cell.
  Eigen::VectorXd local_coefficients(int local) const;

  /// Values (value_dim x nq) and derivatives (curl 3 x nq, div 1 x nq or
  /// gradient 3 x nq) at barycentric points of a support cell. Either output
  /// may be null.
  void eval(int local, const Eigen::Ref<const Eigen::MatrixXd>& bary, Eigen::MatrixXd* values,
            Eigen::MatrixXd* derivs) const;

  /// Value at a physical point; throws Error if the point is outside the support.
  Eigen::VectorXd value_at(const Vec3& x) const;
  /// Curl/div/gradient at a physical point.
  Eigen::VectorXd deriv_at(const Vec3& x) const;

private:
  std::pair<int, Eigen::Vector4d> locate(const Vec3& x) const;

  std::shared_ptr<const DofSpace> space_;
  Eigen::VectorXd coeffs_;
};

/// Vector data on a cell: returns 3 x nq values at barycentric points.
using CellVectorFn =
    std::function<Eigen::Matrix3Xd(int tet, const TetGeometry& geometry, const Eigen::MatrixXd& bary)>;

/// Values of a vector-valued field on its support cells.
CellVectorFn field_values(const DiscreteField& field);
/// Curl of a Nedelec field on its support cells.
CellVectorFn field_curls(const DiscreteField& field);
/// A function of the physical point.
CellVectorFn physical(VectorFunction f);

/// Combines per-point shape rows with coefficients: returns dim x nq.
Eigen::MatrixXd combine(const Eigen::MatrixXd& shape_rows, const Eigen::VectorXd& coeffs, int dim);

/// The lowest-order edge function psi_e with int_{e'} psi_e . tau_{e'} = delta |e|,
/// on a conforming N_0 space containing the patch of e.
DiscreteField edge_function(std::shared_ptr<const DofSpace> n0_space, int e);
/// Same, on the conforming N_0 space of the patch cells of e.
DiscreteField edge_function(const Mesh& mesh, int e);

} // namespace curlcurl
