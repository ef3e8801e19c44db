#pragma once

#include "curlcurl/mesh.hpp"

#include <string>

namespace curlcurl
{

/// Unit cube split into n^3 subcubes of six Kuhn tetrahedra each, with one tag
/// on the whole boundary. Vertex (i, j, k) has index i + (n+1)(j + (n+1)k).
Mesh generate_cube(int n, BoundaryTag boundary);

/// L-shaped prism L x (0, 1), L = (-1, 1)^2 minus the quadrant x > 0, y < 0,
/// with n Kuhn-split subcubes per unit length and a Dirichlet boundary.
Mesh generate_lshape(int n);

/// Exact solution, its curl and the source curl curl A.
struct ManufacturedSolution
{
  std::string name;
  VectorFunction a;
  VectorFunction curl_a;
  VectorFunction source;
};

/// A = (sin(pi x) cos(pi y) cos(pi z), -cos(pi x) sin(pi y) cos(pi z), 0),
/// source 3 pi^2 A; suited to a Neumann cube.
ManufacturedSolution cube_smooth_solution();

/// A = (0, 0, x(1-x) y(1-y)); polynomial of degree 4 with zero tangential trace
/// on the unit cube.
ManufacturedSolution cube_polynomial_solution();

/// A = (0, 0, chi(r) r^alpha sin(alpha theta)) with theta in [0, 3pi/2] and the
/// quintic cut-off chi = 1 for r <= 1/4, 0 for r >= 3/4.
ManufacturedSolution lshape_solution(double alpha = 2.0 / 3.0);

/// The cut-off and its first two derivatives at r.
void lshape_cutoff(double r, double& chi, double& dchi, double& ddchi);

} // namespace curlcurl
