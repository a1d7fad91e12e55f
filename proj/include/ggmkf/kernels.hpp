#pragma once

#include <cstddef>
#include <string>

// Dense vector kernels used by the coordinate-descent inner loop.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant is compiled in a separate translation unit and selected once at
// runtime via cpuid. Both variants are exposed so tests can check equivalence.

namespace ggmkf::kernels {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);

#ifdef GGMKF_BUILD_AVX2
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
#endif

// Dispatched entry points (resolved on first use).
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);

// "avx2" or "scalar"; for diagnostics.
const std::string& active_backend();

} // namespace ggmkf::kernels
