#include "curlcurl/edge_patch.hpp"

#include <algorithm>
#include <numeric>

namespace curlcurl
{

std::vector<int> dorfler_mark(const std::vector<double>& indicators, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw ConfigError("marking fraction must lie in (0, 1]");
  for (double v : indicators)
    if (!(v >= 0.0))
      throw ConfigError("marking indicators must be nonnegative");

  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  double total = 0.0;
  for (int i : order)
    total += indicators[i] * indicators[i];

  std::vector<int> marked;
  double sum = 0.0;
  for (int i : order)
  {
    if (sum >= theta * total || indicators[i] == 0.0)
      break;
    marked.push_back(i);
    sum += indicators[i] * indicators[i];
  }
  return marked;
}

} // namespace curlcurl
