// Solves a dense-front system with UMFPACK and exits nonzero on a wrong result.
#include <umfpack.h>

#include <cmath>
#include <cstdio>
#include <vector>

int main()
{
  const int n = 160;
  std::vector<int> ap(n + 1), ai;
  std::vector<double> ax;
  unsigned state = 12345u;
  auto next = [&state]() {
    state = state * 1664525u + 1013904223u;
    return static_cast<double>(state >> 8) / 16777216.0 - 0.5;
  };
  for (int j = 0; j < n; ++j)
  {
    ap[j] = static_cast<int>(ai.size());
    for (int i = 0; i < n; ++i)
    {
      ai.push_back(i);
      ax.push_back(next() + (i == j ? 0.1 : 0.0));
    }
  }
  ap[n] = static_cast<int>(ai.size());
  std::vector<double> x_true(n), b(n, 0.0), x(n);
  for (int i = 0; i < n; ++i)
    x_true[i] = next();
  for (int j = 0; j < n; ++j)
    for (int k = ap[j]; k < ap[j + 1]; ++k)
      b[ai[k]] += ax[k] * x_true[j];
  void* symbolic = nullptr;
  void* numeric = nullptr;
  if (umfpack_di_symbolic(n, n, ap.data(), ai.data(), ax.data(), &symbolic, nullptr, nullptr) != UMFPACK_OK)
    return 2;
  if (umfpack_di_numeric(ap.data(), ai.data(), ax.data(), symbolic, &numeric, nullptr, nullptr) != UMFPACK_OK)
    return 2;
  if (umfpack_di_solve(UMFPACK_A, ap.data(), ai.data(), ax.data(), x.data(), b.data(), numeric, nullptr,
                       nullptr) != UMFPACK_OK)
    return 2;
  umfpack_di_free_symbolic(&symbolic);
  umfpack_di_free_numeric(&numeric);
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < n; ++i)
  {
    err += (x[i] - x_true[i]) * (x[i] - x_true[i]);
    ref += x_true[i] * x_true[i];
  }
  const double rel = std::sqrt(err / ref);
  std::printf("%g\n", rel);
  return rel < 1e-6 ? 0 : 1;
}
