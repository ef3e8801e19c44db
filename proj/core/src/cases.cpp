#include "curlcurl/cases.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace curlcurl
{

namespace
{

constexpr std::array<std::array<int, 3>, 6> kPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

/// Appends the six Kuhn cells of the subcube with lower corner (i, j, k).
template <class Index>
void kuhn_cells(int i, int j, int k, const Index& index, std::vector<std::array<int, 4>>& tets)
{
  for (const auto& perm : kPermutations)
  {
    std::array<int, 3> c{i, j, k};
    std::array<int, 4> t{};
    t[0] = index(c[0], c[1], c[2]);
    for (int s = 0; s < 3; ++s)
    {
      ++c[perm[s]];
      t[s + 1] = index(c[0], c[1], c[2]);
    }
    tets.push_back(t);
  }
}

/// Faces belonging to exactly one cell, tagged uniformly.
std::vector<BoundaryFace> outer_faces(const std::vector<std::array<int, 4>>& tets, BoundaryTag tag)
{
  std::map<std::array<int, 3>, int> count;
  for (const auto& t : tets)
    for (int f = 0; f < 4; ++f)
    {
      std::array<int, 3> key{};
      int m = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f)
          key[m++] = t[v];
      std::sort(key.begin(), key.end());
      ++count[key];
    }
  std::vector<BoundaryFace> out;
  for (const auto& [key, c] : count)
    if (c == 1)
      out.push_back({key, tag});
  return out;
}

} // namespace

Mesh generate_cube(int n, BoundaryTag boundary)
{
  if (n < 1)
    throw ConfigError("cube subdivision must be at least 1");
  if (boundary == BoundaryTag::None)
    throw ConfigError("cube boundary needs a Dirichlet or Neumann tag");
  const int m = n + 1;
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n,
                              static_cast<double>(k) / n);
  auto index = [m](int i, int j, int k) { return i + m * (j + m * k); };
  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        kuhn_cells(i, j, k, index, tets);
  const auto faces = outer_faces(tets, boundary);
  return build_mesh(std::move(vertices), std::move(tets), faces);
}

Mesh generate_lshape(int n)
{
  if (n < 1)
    throw ConfigError("L-shape subdivision must be at least 1");
  const int m = 2 * n + 1;
  auto inside = [n](int i, int j) { return !(i > n && j < n); };
  std::vector<int> id(static_cast<std::size_t>(m) * m * (n + 1), -1);
  auto slot = [m](int i, int j, int k) { return i + m * (j + m * k); };
  std::vector<Vec3> vertices;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        if (inside(i, j))
        {
          id[slot(i, j, k)] = static_cast<int>(vertices.size());
          vertices.emplace_back(static_cast<double>(i - n) / n, static_cast<double>(j - n) / n,
                                static_cast<double>(k) / n);
        }
  auto index = [&](int i, int j, int k) { return id[slot(i, j, k)]; };
  std::vector<std::array<int, 4>> tets;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < 2 * n; ++j)
      for (int i = 0; i < 2 * n; ++i)
        if (!(i >= n && j < n))
          kuhn_cells(i, j, k, index, tets);
  const auto faces = outer_faces(tets, BoundaryTag::Dirichlet);
  return build_mesh(std::move(vertices), std::move(tets), faces);
}

ManufacturedSolution cube_smooth_solution()
{
  using std::numbers::pi;
  ManufacturedSolution s;
  s.name = "cube-smooth";
  s.a = [](const Vec3& x) {
    return Vec3(std::sin(pi * x[0]) * std::cos(pi * x[1]) * std::cos(pi * x[2]),
                -std::cos(pi * x[0]) * std::sin(pi * x[1]) * std::cos(pi * x[2]), 0.0);
  };
  s.curl_a = [](const Vec3& x) {
    const double s1 = std::sin(pi * x[0]), c1 = std::cos(pi * x[0]);
    const double s2 = std::sin(pi * x[1]), c2 = std::cos(pi * x[1]);
    const double s3 = std::sin(pi * x[2]), c3 = std::cos(pi * x[2]);
    return Vec3(-pi * c1 * s2 * s3, -pi * s1 * c2 * s3, 2.0 * pi * s1 * s2 * c3);
  };
  s.source = [a = s.a](const Vec3& x) { return Vec3(3.0 * pi * pi * a(x)); };
  return s;
}

ManufacturedSolution cube_polynomial_solution()
{
  ManufacturedSolution s;
  s.name = "cube-polynomial";
  s.a = [](const Vec3& x) { return Vec3(0.0, 0.0, x[0] * (1 - x[0]) * x[1] * (1 - x[1])); };
  s.curl_a = [](const Vec3& x) {
    return Vec3(x[0] * (1 - x[0]) * (1 - 2 * x[1]), -(1 - 2 * x[0]) * x[1] * (1 - x[1]), 0.0);
  };
  s.source = [](const Vec3& x) {
    return Vec3(0.0, 0.0, 2.0 * x[1] * (1 - x[1]) + 2.0 * x[0] * (1 - x[0]));
  };
  return s;
}

void lshape_cutoff(double r, double& chi, double& dchi, double& ddchi)
{
  constexpr double r0 = 0.25, r1 = 0.75;
  if (r <= r0)
  {
    chi = 1.0;
    dchi = ddchi = 0.0;
    return;
  }
  if (r >= r1)
  {
    chi = dchi = ddchi = 0.0;
    return;
  }
  const double l = r1 - r0;
  const double s = (r - r0) / l;
  chi = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  dchi = -30.0 * s * s * (1.0 - s) * (1.0 - s) / l;
  ddchi = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (l * l);
}

namespace
{

double lshape_angle(const Vec3& x)
{
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0)
    theta += 2.0 * std::numbers::pi;
  return theta;
}

} // namespace

ManufacturedSolution lshape_solution(double alpha)
{
  if (!(alpha > 0.0))
    throw ConfigError("singular exponent must be positive");
  ManufacturedSolution s;
  s.name = "lshape-singular";
  s.a = [alpha](const Vec3& x) {
    const double r = std::hypot(x[0], x[1]);
    double c, dc, ddc;
    lshape_cutoff(r, c, dc, ddc);
    return Vec3(0.0, 0.0, c * std::pow(r, alpha) * std::sin(alpha * lshape_angle(x)));
  };
  s.curl_a = [alpha](const Vec3& x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0)
      return Vec3(0.0, 0.0, 0.0);
    double c, dc, ddc;
    lshape_cutoff(r, c, dc, ddc);
    const double th = lshape_angle(x);
    const double u = std::pow(r, alpha) * std::sin(alpha * th);
    const double du_r = alpha * std::pow(r, alpha - 1) * std::sin(alpha * th);
    const double du_t = alpha * std::pow(r, alpha - 1) * std::cos(alpha * th);
    const Eigen::Vector2d er(std::cos(th), std::sin(th)), et(-std::sin(th), std::cos(th));
    const Eigen::Vector2d grad = (dc * u + c * du_r) * er + c * du_t * et;
    return Vec3(grad[1], -grad[0], 0.0);
  };
  s.source = [alpha](const Vec3& x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0)
      return Vec3(0.0, 0.0, 0.0);
    double c, dc, ddc;
    lshape_cutoff(r, c, dc, ddc);
    const double th = lshape_angle(x);
    const double lap = std::pow(r, alpha - 1) * std::sin(alpha * th) *
                       ((2.0 * alpha + 1.0) * dc + r * ddc);
    return Vec3(0.0, 0.0, -lap);
  };
  return s;
}

} // namespace curlcurl
