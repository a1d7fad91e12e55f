#include <doctest.h>

#include <cmath>
#include <random>

#include "ggmkf/design.hpp"
#include "ggmkf/errors.hpp"

using namespace ggmkf;

TEST_CASE("two-point column centers and scales to unit norm") {
    Eigen::MatrixXd raw(2, 1);
    raw << 3, 4;
    const DesignMatrix d = standardize(raw);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(d.values(0, 0) == doctest::Approx(-inv_sqrt2).epsilon(1e-14));
    CHECK(d.values(1, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
    CHECK(d.centers[0] == doctest::Approx(3.5));
    CHECK(d.scales[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(d.standardized);
}

TEST_CASE("standardization is idempotent") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd raw(30, 4);
    for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 4; ++c) raw(r, c) = normal(rng);
    const DesignMatrix once = standardize(raw);
    const DesignMatrix twice = standardize(once.values);
    CHECK((twice.values - once.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("every standardized column has unit Euclidean norm") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd raw(50, 7);
    for (int r = 0; r < 50; ++r)
        for (int c = 0; c < 7; ++c) raw(r, c) = 5.0 * normal(rng) + 2.0;
    const DesignMatrix d = standardize(raw);
    for (int c = 0; c < d.cols(); ++c) {
        CHECK(std::abs(d.values.col(c).norm() - 1.0) <= 1e-10);
        CHECK(std::abs(d.values.col(c).sum()) <= 1e-10);
    }
}

TEST_CASE("constant column is rejected with its index") {
    Eigen::MatrixXd raw(5, 2);
    raw.col(0) = Eigen::VectorXd::LinSpaced(5, 0, 4);
    raw.col(1).setOnes();
    CHECK_THROWS_AS(standardize(raw), ConstantColumnError);
    try {
        standardize(raw);
    } catch (const ConstantColumnError& e) {
        CHECK(e.column == 1);
    }
}
