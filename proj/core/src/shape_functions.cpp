#include "curlcurl/shape_functions.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace curlcurl
{

const char* to_string(Family family)
{
  switch (family)
  {
  case Family::Lagrange:
    return "lagrange";
  case Family::Nedelec:
    return "nedelec";
  case Family::RaviartThomas:
    return "raviart-thomas";
  }
  return "unknown";
}

int local_dimension(Family family, int p)
{
  switch (family)
  {
  case Family::Lagrange:
    return (p + 1) * (p + 2) * (p + 3) / 6;
  case Family::Nedelec:
    return (p + 1) * (p + 3) * (p + 4) / 2;
  case Family::RaviartThomas:
    return (p + 1) * (p + 2) * (p + 4) / 2;
  }
  return 0;
}

int deriv_dim(Family family) { return family == Family::RaviartThomas ? 1 : 3; }

namespace
{

/// All compositions of `total` into `parts` nonnegative integers, lexicographic.
void compositions(int total, int parts, std::vector<int>& current,
                  std::vector<std::vector<int>>& out)
{
  if (parts == 1)
  {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int k = total; k >= 0; --k)
  {
    current.push_back(k);
    compositions(total - k, parts - 1, current, out);
    current.pop_back();
  }
}

/// Subsets of size k of {0..n-1}, lexicographic.
void subsets(int n, int k, int start, std::vector<int>& current, std::vector<std::vector<int>>& out)
{
  if (static_cast<int>(current.size()) == k)
  {
    out.push_back(current);
    return;
  }
  for (int i = start; i < n; ++i)
  {
    current.push_back(i);
    subsets(n, k, i + 1, current, out);
    current.pop_back();
  }
}

/// Shapes attached to the entity with local vertices `verts` (ascending).
std::vector<LocalShape> make_entity_shapes(const std::vector<int>& verts, int sigma_size, int degree,
                                      int entity_dim, int entity_local)
{
  const int m = static_cast<int>(verts.size());
  std::vector<LocalShape> out;
  if (sigma_size > m)
    return out;
  std::vector<std::vector<int>> sigmas, alphas;
  std::vector<int> scratch;
  subsets(m, sigma_size, 0, scratch, sigmas);
  compositions(degree, m, scratch, alphas);
  for (const auto& sigma : sigmas)
  {
    const int min_sigma = sigma.empty() ? 0 : sigma.front();
    for (const auto& alpha : alphas)
    {
      bool ok = true;
      for (int i = 0; i < m && ok; ++i)
      {
        const bool in_sigma = std::find(sigma.begin(), sigma.end(), i) != sigma.end();
        if (alpha[i] == 0 && !in_sigma)
          ok = false;
        if (i < min_sigma && alpha[i] != 0)
          ok = false;
      }
      if (!ok)
        continue;
      LocalShape s;
      for (int i = 0; i < m; ++i)
        s.alpha[verts[i]] = alpha[i];
      s.sigma_size = sigma_size;
      for (int i = 0; i < sigma_size; ++i)
        s.sigma[i] = verts[sigma[i]];
      s.entity_dim = entity_dim;
      s.entity_local = entity_local;
      s.entity_offset = static_cast<int>(out.size());
      out.push_back(s);
    }
  }
  return out;
}

} // namespace

ReferenceBasis::ReferenceBasis(Family family, int degree) : family_(family), degree_(degree)
{
  if (degree < 0)
    throw ConfigError("negative polynomial degree");
  const int sigma_size = family == Family::Lagrange ? 0 : (family == Family::Nedelec ? 2 : 3);
  auto add = [&](std::vector<LocalShape> list, int dim) {
    std::vector<int> indices;
    for (auto& s : list)
    {
      indices.push_back(size());
      shapes_.push_back(s);
    }
    entity_size_[dim] = static_cast<int>(indices.size());
    entity_shapes_[dim].push_back(std::move(indices));
  };

  if (family == Family::Lagrange && degree == 0)
  {
    for (int d = 0; d < 3; ++d)
      entity_shapes_[d].assign(d == 0 ? 4 : (d == 1 ? 6 : 4), {});
    LocalShape s;
    s.entity_dim = 3;
    shapes_.push_back(s);
    entity_shapes_[3].push_back({0});
    entity_size_[3] = 1;
  }
  else
  {
    for (int v = 0; v < 4; ++v)
      add(make_entity_shapes({v}, sigma_size, degree, 0, v), 0);
    for (int e = 0; e < 6; ++e)
      add(make_entity_shapes({Mesh::kLocalEdges[e][0], Mesh::kLocalEdges[e][1]}, sigma_size, degree, 1, e),
          1);
    for (int f = 0; f < 4; ++f)
      add(make_entity_shapes({Mesh::kLocalFaces[f][0], Mesh::kLocalFaces[f][1], Mesh::kLocalFaces[f][2]},
                        sigma_size, degree, 2, f),
          2);
    add(make_entity_shapes({0, 1, 2, 3}, sigma_size, degree, 3, 0), 3);
  }
  if (size() != local_dimension(family, degree))
    throw Error("internal: basis size mismatch");

  auto entity_mask = [](const LocalShape& s) {
    switch (s.entity_dim)
    {
    case 0:
      return 1u << s.entity_local;
    case 1:
      return (1u << Mesh::kLocalEdges[s.entity_local][0]) | (1u << Mesh::kLocalEdges[s.entity_local][1]);
    case 2:
      return 15u & ~(1u << s.entity_local);
    default:
      return 15u;
    }
  };
  for (int i = 0; i < size(); ++i)
  {
    const unsigned mask = entity_mask(shapes_[i]);
    for (int f = 0; f < 4; ++f)
      if ((mask & ~(15u & ~(1u << f))) == 0)
        face_closure_[f].push_back(i);
    for (int e = 0; e < 6; ++e)
    {
      const unsigned em = (1u << Mesh::kLocalEdges[e][0]) | (1u << Mesh::kLocalEdges[e][1]);
      if ((mask & ~em) == 0)
        edge_closure_[e].push_back(i);
    }
  }
}

const ReferenceBasis& ReferenceBasis::get(Family family, int degree)
{
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<ReferenceBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{static_cast<int>(family), degree}];
  if (!slot)
    slot.reset(new ReferenceBasis(family, degree));
  return *slot;
}

std::span<const int> ReferenceBasis::entity_shapes(int dim, int local) const
{
  return entity_shapes_[dim][local];
}

void basis_eval(const ReferenceBasis& basis, const TetGeometry& g,
                const Eigen::Ref<const Eigen::MatrixXd>& bary, BasisValues& out, bool with_derivs)
{
  const int n = basis.size();
  const int nq = static_cast<int>(bary.cols());
  const int p = basis.degree();
  const Family family = basis.family();
  const int vd = basis.value_dim();
  const int dd = deriv_dim(family);
  out.values.resize(n, vd * nq);
  if (with_derivs)
    out.derivs.resize(n, dd * nq);

  const auto& G = g.grad_lambda;
  std::array<std::array<Vec3, 4>, 4> cross;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      cross[a][b] = G.col(a).cross(G.col(b));

  std::vector<std::array<double, 4>> pw(p + 1);
  for (int q = 0; q < nq; ++q)
  {
    const Eigen::Vector4d lambda = bary.col(q);
    for (int m = 0; m < 4; ++m)
    {
      pw[0][m] = 1.0;
      for (int k = 1; k <= p; ++k)
        pw[k][m] = pw[k - 1][m] * lambda[m];
    }
    for (int i = 0; i < n; ++i)
    {
      const LocalShape& s = basis.shape(i);
      double mono = 1.0;
      for (int m = 0; m < 4; ++m)
        mono *= pw[s.alpha[m]][m];
      Vec3 grad = Vec3::Zero();
      if (with_derivs)
        for (int m = 0; m < 4; ++m)
        {
          if (s.alpha[m] == 0)
            continue;
          double c = s.alpha[m] * pw[s.alpha[m] - 1][m];
          for (int l = 0; l < 4; ++l)
            if (l != m)
              c *= pw[s.alpha[l]][l];
          grad += c * G.col(m);
        }
      switch (family)
      {
      case Family::Lagrange:
        out.values(i, q) = mono;
        if (with_derivs)
          out.derivs.block<1, 3>(i, 3 * q) = grad.transpose();
        break;
      case Family::Nedelec:
      {
        const int a = s.sigma[0], b = s.sigma[1];
        const Vec3 w = lambda[a] * G.col(b) - lambda[b] * G.col(a);
        out.values.block<1, 3>(i, 3 * q) = (mono * w).transpose();
        if (with_derivs)
          out.derivs.block<1, 3>(i, 3 * q) = (grad.cross(w) + 2.0 * mono * cross[a][b]).transpose();
        break;
      }
      case Family::RaviartThomas:
      {
        const int a = s.sigma[0], b = s.sigma[1], c = s.sigma[2];
        const Vec3 w =
            2.0 * (lambda[a] * cross[b][c] + lambda[b] * cross[c][a] + lambda[c] * cross[a][b]);
        out.values.block<1, 3>(i, 3 * q) = (mono * w).transpose();
        if (with_derivs)
          out.derivs(i, q) = grad.dot(w) + 6.0 * mono * G.col(a).dot(cross[b][c]);
        break;
      }
      }
    }
  }
}

} // namespace curlcurl
