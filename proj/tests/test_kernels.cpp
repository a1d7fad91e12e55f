#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ggmkf/kernels.hpp"

using namespace ggmkf;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

} // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
    std::mt19937_64 rng(12345);
    // Lengths around the SIMD width boundaries plus a long one.
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 1000}) {
        const std::vector<double> x = random_vec(n, rng);
        std::vector<double> y = random_vec(n, rng);

        const double ref = kernels::dot_scalar(x.data(), y.data(), n);
        const double got = kernels::dot(x.data(), y.data(), n);
        CHECK(std::abs(got - ref) <= 1e-12 * (1.0 + std::abs(ref)));

        std::vector<double> y_ref = y;
        kernels::axpy_scalar(0.75, x.data(), y_ref.data(), n);
        kernels::axpy(0.75, x.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(y[i] - y_ref[i]) <= 1e-12 * (1.0 + std::abs(y_ref[i])));
    }
}

TEST_CASE("active backend reports a known name") {
    const std::string& name = kernels::active_backend();
    CHECK((name == "avx2" || name == "scalar"));
}

#ifdef GGMKF_BUILD_AVX2
TEST_CASE("avx2 variants agree with scalar when compiled in") {
    if (kernels::active_backend() != "avx2") return;  // CPU lacks AVX2 at runtime
    std::mt19937_64 rng(777);
    for (std::size_t n : {5, 16, 129, 2048}) {
        const std::vector<double> x = random_vec(n, rng);
        std::vector<double> y = random_vec(n, rng);
        CHECK(std::abs(kernels::dot_avx2(x.data(), y.data(), n) -
                       kernels::dot_scalar(x.data(), y.data(), n)) <= 1e-10);
        std::vector<double> y2 = y;
        kernels::axpy_avx2(-1.25, x.data(), y.data(), n);
        kernels::axpy_scalar(-1.25, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(y2[i]).epsilon(1e-12));
    }
}
#endif
