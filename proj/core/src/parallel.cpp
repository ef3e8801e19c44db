#include "curlcurl/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace curlcurl
{

int default_threads()
{
  if (const char* env = std::getenv("CURLCURL_THREADS"))
  {
    try
    {
      const int n = std::stoi(env);
      if (n >= 1)
        return n;
    }
    catch (const std::exception&)
    {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int threads, const std::function<void(int)>& body)
{
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1)
  {
    for (int i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mutex;
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w)
  {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    pool.emplace_back([&, begin, end] {
      try
      {
        for (int i = begin; i < end; ++i)
          body(i);
      }
      catch (...)
      {
        std::lock_guard lock(mutex);
        if (!error)
          error = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace curlcurl
