#include "curlcurl/dof_space.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace curlcurl
{

std::shared_ptr<const DofSpace> DofSpace::conforming(const Mesh& mesh, Family family, int degree,
                                                     std::vector<int> tets)
{
  return make(mesh, family, degree, std::move(tets), false);
}

std::shared_ptr<const DofSpace> DofSpace::broken(const Mesh& mesh, Family family, int degree,
                                                 std::vector<int> tets)
{
  return make(mesh, family, degree, std::move(tets), true);
}

std::shared_ptr<const DofSpace> DofSpace::make(const Mesh& mesh, Family family, int degree,
                                               std::vector<int> tets, bool broken)
{
  std::shared_ptr<DofSpace> s(new DofSpace());
  s->mesh_ = &mesh;
  s->basis_ = &ReferenceBasis::get(family, degree);
  s->broken_ = broken;
  s->full_ = tets.empty();
  if (s->full_)
  {
    tets.resize(mesh.num_tets());
    std::iota(tets.begin(), tets.end(), 0);
  }
  for (int t : tets)
    if (t < 0 || t >= mesh.num_tets())
      throw Error("space support cell " + std::to_string(t) + " out of range");
  s->tets_ = std::move(tets);

  const ReferenceBasis& basis = *s->basis_;
  const int nloc = basis.size();
  s->tet_dofs_.resize(static_cast<std::size_t>(nloc) * s->tets_.size());
  if (broken)
  {
    std::iota(s->tet_dofs_.begin(), s->tet_dofs_.end(), 0);
    s->size_ = static_cast<int>(s->tet_dofs_.size());
    return s;
  }

  std::unordered_map<std::uint64_t, int> base;
  int next = 0;
  for (std::size_t k = 0; k < s->tets_.size(); ++k)
  {
    const int t = s->tets_[k];
    auto entity_id = [&](int dim, int local) {
      switch (dim)
      {
      case 0:
        return mesh.sorted_tet(t)[local];
      case 1:
        return mesh.tet_edges(t)[local];
      case 2:
        return mesh.tet_faces(t)[local];
      default:
        return t;
      }
    };
    for (int i = 0; i < nloc; ++i)
    {
      const LocalShape& sh = basis.shape(i);
      const std::uint64_t key = (static_cast<std::uint64_t>(sh.entity_dim) << 32) |
                                static_cast<std::uint32_t>(entity_id(sh.entity_dim, sh.entity_local));
      auto [it, inserted] = base.try_emplace(key, next);
      if (inserted)
        next += basis.entity_size(sh.entity_dim);
      s->tet_dofs_[k * nloc + i] = it->second + sh.entity_offset;
    }
  }
  s->size_ = next;
  return s;
}

int DofSpace::local_tet(int tet) const
{
  if (full_)
    return tet >= 0 && tet < num_tets() ? tet : -1;
  const auto it = std::find(tets_.begin(), tets_.end(), tet);
  return it == tets_.end() ? -1 : static_cast<int>(it - tets_.begin());
}

std::vector<int> DofSpace::face_closure_dofs(int f, int local) const
{
  if (local < 0)
  {
    for (int t : mesh_->face_tets(f))
      if (t >= 0 && (local = local_tet(t)) >= 0)
        break;
    if (local < 0)
      throw Error("face " + std::to_string(f) + " is not in the space support");
    if (broken_)
      throw Error("broken spaces need an explicit cell for face dofs");
  }
  const auto& faces = mesh_->tet_faces(tets_[local]);
  const auto lf = static_cast<int>(std::find(faces.begin(), faces.end(), f) - faces.begin());
  if (lf == 4)
    throw Error("face " + std::to_string(f) + " does not belong to cell " +
                std::to_string(tets_[local]));
  const auto dofs = tet_dofs(local);
  std::vector<int> out;
  for (int i : basis_->face_closure(lf))
    out.push_back(dofs[i]);
  return out;
}

std::vector<int> DofSpace::closure_dofs(std::span<const int> faces) const
{
  std::vector<int> out;
  for (int f : faces)
  {
    const auto d = face_closure_dofs(f);
    out.insert(out.end(), d.begin(), d.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DiscreteField::DiscreteField(std::shared_ptr<const DofSpace> space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients))
{
  if (coeffs_.size() != space_->size())
    throw Error("coefficient vector length does not match the space dimension");
}

Eigen::VectorXd DiscreteField::local_coefficients(int local) const
{
  const auto dofs = space_->tet_dofs(local);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i)
    c[static_cast<Eigen::Index>(i)] = coeffs_[dofs[i]];
  return c;
}

Eigen::MatrixXd combine(const Eigen::MatrixXd& shape_rows, const Eigen::VectorXd& coeffs, int dim)
{
  const Eigen::RowVectorXd flat = coeffs.transpose() * shape_rows;
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), dim, flat.size() / dim);
}

void DiscreteField::eval(int local, const Eigen::Ref<const Eigen::MatrixXd>& bary,
                         Eigen::MatrixXd* values, Eigen::MatrixXd* derivs) const
{
  const auto& basis = space_->basis();
  BasisValues bv;
  basis_eval(basis, space_->mesh().geometry(space_->tet(local)), bary, bv, derivs != nullptr);
  const Eigen::VectorXd c = local_coefficients(local);
  if (values)
    *values = combine(bv.values, c, basis.value_dim());
  if (derivs)
    *derivs = combine(bv.derivs, c, deriv_dim(basis.family()));
}

std::pair<int, Eigen::Vector4d> DiscreteField::locate(const Vec3& x) const
{
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  Eigen::Vector4d best_lambda;
  for (int k = 0; k < space_->num_tets(); ++k)
  {
    const auto lambda = space_->mesh().geometry(space_->tet(k)).to_barycentric(x);
    if (lambda.minCoeff() > best_min)
    {
      best_min = lambda.minCoeff();
      best = k;
      best_lambda = lambda;
    }
  }
  if (best < 0 || best_min < -1e-10)
    throw Error("point outside the field support");
  return {best, best_lambda};
}

Eigen::VectorXd DiscreteField::value_at(const Vec3& x) const
{
  const auto [k, lambda] = locate(x);
  Eigen::MatrixXd v;
  eval(k, lambda, &v, nullptr);
  return v.col(0);
}

Eigen::VectorXd DiscreteField::deriv_at(const Vec3& x) const
{
  const auto [k, lambda] = locate(x);
  Eigen::MatrixXd d;
  eval(k, lambda, nullptr, &d);
  return d.col(0);
}

CellVectorFn field_values(const DiscreteField& field)
{
  return [field](int tet, const TetGeometry&, const Eigen::MatrixXd& bary) -> Eigen::Matrix3Xd {
    const int k = field.space().local_tet(tet);
    if (k < 0)
      throw Error("cell " + std::to_string(tet) + " outside the field support");
    Eigen::MatrixXd v;
    field.eval(k, bary, &v, nullptr);
    return v;
  };
}

CellVectorFn field_curls(const DiscreteField& field)
{
  if (field.space().family() != Family::Nedelec)
    throw Error("curl requested of a non-Nedelec field");
  return [field](int tet, const TetGeometry&, const Eigen::MatrixXd& bary) -> Eigen::Matrix3Xd {
    const int k = field.space().local_tet(tet);
    if (k < 0)
      throw Error("cell " + std::to_string(tet) + " outside the field support");
    Eigen::MatrixXd d;
    field.eval(k, bary, nullptr, &d);
    return d;
  };
}

CellVectorFn physical(VectorFunction f)
{
  return [f = std::move(f)](int, const TetGeometry& g, const Eigen::MatrixXd& bary) {
    const Eigen::Matrix3Xd x = g.to_physical(Eigen::Matrix4Xd(bary));
    Eigen::Matrix3Xd out(3, x.cols());
    for (Eigen::Index q = 0; q < x.cols(); ++q)
      out.col(q) = f(x.col(q));
    return out;
  };
}

DiscreteField edge_function(std::shared_ptr<const DofSpace> space, int e)
{
  if (space->family() != Family::Nedelec || space->degree() != 0 || space->is_broken())
    throw Error("edge functions live in the conforming lowest-order Nedelec space");
  const Mesh& mesh = space->mesh();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space->size());
  bool found = false;
  for (int t : mesh.edge_tets(e))
  {
    const int k = space->local_tet(t);
    if (k < 0)
      continue;
    const auto& edges = mesh.tet_edges(t);
    const auto le = static_cast<int>(std::find(edges.begin(), edges.end(), e) - edges.begin());
    c[space->tet_dofs(k)[space->basis().entity_shapes(1, le)[0]]] = mesh.edge_length(e);
    found = true;
  }
  if (!found)
    throw Error("edge " + std::to_string(e) + " is not in the space support");
  return DiscreteField(std::move(space), std::move(c));
}

DiscreteField edge_function(const Mesh& mesh, int e)
{
  const auto cells = mesh.edge_tets(e);
  return edge_function(
      DofSpace::conforming(mesh, Family::Nedelec, 0, std::vector<int>(cells.begin(), cells.end())), e);
}

} // namespace curlcurl
