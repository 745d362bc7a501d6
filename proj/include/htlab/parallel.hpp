#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>

namespace htlab {

/// Caps the OpenMP team size used by library loops; 0 restores the default.
void set_thread_cap(int threads);
int thread_cap();

/// Serializes FFTW planner calls (plan creation and destruction are not thread-safe).
std::mutex& fftw_planner_mutex();

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> v);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v);

}  // namespace htlab
