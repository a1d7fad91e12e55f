#include "ggmkf/kernels.hpp"

namespace ggmkf::kernels {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    // Four independent accumulators: fixes the summation order so results do
    // not depend on the dispatch decision any more than necessary, and lets
    // the compiler pipeline the adds.
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

struct Dispatch {
    DotFn dot = dot_scalar;
    AxpyFn axpy = axpy_scalar;
    std::string name = "scalar";
    Dispatch() {
#ifdef GGMKF_BUILD_AVX2
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
            dot = dot_avx2;
            axpy = axpy_avx2;
            name = "avx2";
        }
#endif
    }
};

const Dispatch& dispatch() {
    static const Dispatch d;
    return d;
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) {
    return dispatch().dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    dispatch().axpy(a, x, y, n);
}

const std::string& active_backend() {
    return dispatch().name;
}

} // namespace ggmkf::kernels
