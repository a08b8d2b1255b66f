#include "stratlasso/threading.hpp"

#include <algorithm>
#include <atomic>

#ifdef STRATLASSO_HAVE_OPENMP
#include <omp.h>
#endif

namespace stratlasso {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() { return g_max_threads.load(); }

int threads_for(std::size_t work) {
#ifdef STRATLASSO_HAVE_OPENMP
  int hw = omp_get_max_threads();
  int cap = g_max_threads.load();
  if (cap > 0) hw = std::min(hw, cap);
  if (work < 2048) return 1;  // below this the fork overhead dominates
  return std::max(1, std::min<int>(hw, static_cast<int>(work / 1024)));
#else
  (void)work;
  return 1;
#endif
}

}  // namespace stratlasso
