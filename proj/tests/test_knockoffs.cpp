#include <doctest.h>

#include <random>

#include "ggmkf/design.hpp"
#include "ggmkf/errors.hpp"
#include "ggmkf/knockoffs.hpp"

using namespace ggmkf;

namespace {

Eigen::MatrixXd random_raw(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd raw(n, p);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < p; ++c) raw(r, c) = normal(rng);
    return raw;
}

// Random correlation matrix: Gram of a standardized tall matrix.
Eigen::MatrixXd random_correlation(int p, std::uint64_t seed) {
    const DesignMatrix d = standardize(random_raw(4 * p, p, seed));
    return d.values.transpose() * d.values;
}

double feasibility_margin(const Eigen::MatrixXd& gram, const Eigen::VectorXd& s) {
    Eigen::MatrixXd slack = 2.0 * gram;
    slack.diagonal() -= s;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(slack, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

} // namespace

TEST_CASE("equicorrelated s follows min(2 lambda_min, 1)") {
    CHECK((compute_s_equi(Eigen::MatrixXd::Identity(3, 3)).s.array() == 1.0).all());

    Eigen::MatrixXd g(2, 2);
    g << 1, 0.5, 0.5, 1;
    CHECK(compute_s_equi(g).s[0] == doctest::Approx(1.0).epsilon(1e-12));

    g << 1, 0.9, 0.9, 1;
    const SVector s = compute_s_equi(g);
    CHECK(s.s[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s.s[1] == doctest::Approx(0.2).epsilon(1e-12));

    g << 1, 1, 1, 1;  // singular
    CHECK_THROWS_AS(compute_s_equi(g), NotPositiveDefiniteError);
}

TEST_CASE("sdp s is feasible and never worse than equicorrelated") {
    CHECK((compute_s_sdp(Eigen::MatrixXd::Identity(4, 4)).s.array() > 1.0 - 1e-8).all());

    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const int p = 2 + static_cast<int>(trial % 7);
        const Eigen::MatrixXd gram = random_correlation(p, 100 + trial);
        const Eigen::VectorXd s_equi = compute_s_equi(gram).s;
        const Eigen::VectorXd s_sdp = compute_s_sdp(gram).s;
        CHECK(s_sdp.minCoeff() >= -1e-10);
        CHECK(s_sdp.maxCoeff() <= 1.0 + 1e-8);
        CHECK(feasibility_margin(gram, s_sdp) >= -1e-8);
        // objective sum(1 - s_i): smaller is better
        CHECK((1.0 - s_sdp.array()).sum() <= (1.0 - s_equi.array()).sum() + 1e-8);
    }
}

TEST_CASE("knockoffs satisfy the defining Gram identities") {
    const DesignMatrix d = standardize(random_raw(40, 10, 5));
    const Eigen::MatrixXd gram = d.values.transpose() * d.values;
    for (SStrategy strategy : {SStrategy::equi, SStrategy::sdp}) {
        Rng rng(99);
        const KnockoffSet k = construct_knockoffs(d, compute_s(gram, strategy), rng);
        CHECK(knockoff_gram_error(k) <= 1e-8);
    }
}

TEST_CASE("zero s yields knockoffs identical to the originals") {
    const DesignMatrix d = standardize(random_raw(30, 6, 17));
    SVector s;
    s.s = Eigen::VectorXd::Zero(6);
    Rng rng(1);
    const KnockoffSet k = construct_knockoffs(d, s, rng);
    CHECK((k.knockoff - d.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("identity Gram with s = 1 gives orthogonal knockoffs") {
    // Orthonormal columns via QR; the raw overload takes them as-is.
    const Eigen::MatrixXd a = random_raw(40, 8, 23);
    const Eigen::MatrixXd x =
        Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(40, 8);
    SVector s;
    s.s = Eigen::VectorXd::Ones(8);
    Rng rng(2);
    const KnockoffSet k = construct_knockoffs(x, s, rng);
    CHECK((x.transpose() * k.knockoff).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(knockoff_gram_error(k) <= 1e-8);
}

TEST_CASE("construction is deterministic under a fixed seed") {
    const DesignMatrix d = standardize(random_raw(30, 5, 31));
    const SVector s = compute_s(d.values.transpose() * d.values, SStrategy::equi);
    Rng r1(42), r2(42);
    const KnockoffSet k1 = construct_knockoffs(d, s, r1);
    const KnockoffSet k2 = construct_knockoffs(d, s, r2);
    CHECK((k1.knockoff - k2.knockoff).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("recycled knockoffs reuse part1 rows verbatim") {
    const DesignMatrix stacked = standardize(random_raw(80, 10, 47));
    const Eigen::MatrixXd part1 = stacked.values.topRows(40);
    const Eigen::MatrixXd part2 = stacked.values.bottomRows(40);
    const SVector s = compute_s_scaled(part2.transpose() * part2, SStrategy::equi);
    Rng rng(7);
    const KnockoffSet k = construct_recycled_knockoffs(part1, part2, s, rng);

    CHECK((k.knockoff.topRows(40).array() == part1.array()).all());
    CHECK(knockoff_gram_error(k) <= 1e-8);
}

TEST_CASE("empty part1 reduces the recycled construction to the plain one") {
    const DesignMatrix d = standardize(random_raw(30, 5, 53));
    const SVector s = compute_s_scaled(d.values.transpose() * d.values, SStrategy::equi);
    Rng r1(11), r2(11);
    const KnockoffSet plain = construct_knockoffs(d.values, s, r1);
    const KnockoffSet recycled =
        construct_recycled_knockoffs(Eigen::MatrixXd(0, 5), d.values, s, r2);
    CHECK((plain.knockoff - recycled.knockoff.bottomRows(30)).cwiseAbs().maxCoeff() == 0.0);
}
