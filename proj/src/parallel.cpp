#include "htlab/parallel.hpp"

#include <omp.h>

namespace htlab {

namespace {
int g_default_threads = 0;

template <class T>
T cascade(const T* p, std::size_t n) {
  if (n <= 16) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return cascade(p, h) + cascade(p + h, n - h);
}
}  // namespace

void set_thread_cap(int threads) {
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : g_default_threads);
}

int thread_cap() { return omp_get_max_threads(); }

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double pairwise_sum(std::span<const double> v) { return cascade(v.data(), v.size()); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
  return cascade(v.data(), v.size());
}

}  // namespace htlab
