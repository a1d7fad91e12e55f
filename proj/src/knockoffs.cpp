#include "ggmkf/knockoffs.hpp"

#include <algorithm>

#include "ggmkf/errors.hpp"

namespace ggmkf {

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) g(i, j) = normal(rng);
    return g;
}

} // namespace

SVector compute_s_equi(const Eigen::MatrixXd& gram) {
    const double lam = min_eigenvalue(gram);
    if (lam <= 1e-12) throw NotPositiveDefiniteError("gram matrix is not positive definite");
    SVector out;
    out.strategy = SStrategy::equi;
    out.s = Eigen::VectorXd::Constant(gram.rows(), std::min(2.0 * lam, 1.0));
    return out;
}

SVector compute_s_sdp(const Eigen::MatrixXd& gram, double tol) {
    const int p = static_cast<int>(gram.rows());
    const SVector equi = compute_s_equi(gram);

    // Start from the box maximum and walk back into {diag(s) ⪯ 2Σ} by
    // shifting mass off the directions that violate it: each negative
    // eigenpair (λ, v) of 2Σ − diag(s) asks for a diagonal increase of
    // roughly (−λ)v_i² spread over the coordinates it loads on.
    Eigen::VectorXd s = Eigen::VectorXd::Ones(p);
    const int cap = 5000;
    bool feasible = false;
    for (int it = 0; it < cap; ++it) {
        Eigen::MatrixXd m = 2.0 * gram;
        m.diagonal() -= s;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        const Eigen::VectorXd& ev = es.eigenvalues();
        if (ev.minCoeff() >= -0.5 * tol) {
            feasible = true;
            break;
        }
        for (int k = 0; k < p && ev[k] < 0; ++k) {
            const double deficit = -ev[k] * 1.05;  // slight over-shoot to converge
            s.array() -= deficit * es.eigenvectors().col(k).array().square();
        }
        s = s.cwiseMax(0.0).cwiseMin(1.0);
    }
    if (!feasible) {
        // Shrink toward 0 (strictly interior) until feasible.
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            Eigen::MatrixXd m = 2.0 * gram;
            m.diagonal() -= mid * s;
            (min_eigenvalue(m) >= -0.5 * tol ? lo : hi) = mid;
        }
        s *= lo;
        if (lo == 0.0) throw SolverDivergedError("s-vector projection failed to reach feasibility");
    }
    // Never worse than the closed-form point, which is itself feasible.
    if (s.sum() < equi.s.sum()) s = equi.s;
    return SVector{s, SStrategy::sdp};
}

SVector compute_s(const Eigen::MatrixXd& gram, SStrategy strategy, double tol) {
    return strategy == SStrategy::equi ? compute_s_equi(gram) : compute_s_sdp(gram, tol);
}

SVector compute_s_scaled(const Eigen::MatrixXd& gram, SStrategy strategy, double tol) {
    const Eigen::VectorXd d = gram.diagonal();
    if (d.minCoeff() <= 0.0) throw NotPositiveDefiniteError("gram has a non-positive diagonal entry");
    const Eigen::VectorXd root = d.cwiseSqrt();
    const Eigen::MatrixXd corr =
        root.cwiseInverse().asDiagonal() * gram * root.cwiseInverse().asDiagonal();
    SVector out = compute_s(corr, strategy, tol);
    out.s = out.s.cwiseProduct(d);
    return out;
}

KnockoffSet construct_knockoffs(const Eigen::MatrixXd& x, const SVector& sv, Rng& rng) {
    const int n = static_cast<int>(x.rows());
    const int m = static_cast<int>(x.cols());
    if (n < 2 * m)
        throw InsufficientSamplesError("knockoff construction needs at least twice as many rows as columns");

    const Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("gram matrix factorization failed");

    // Target for CᵀC; clip small negative eigenvalues (fp drift), refuse
    // genuinely infeasible s.
    const Eigen::VectorXd& s = sv.s;
    Eigen::MatrixXd target = -(s.asDiagonal() * ldlt.solve(Eigen::MatrixXd(s.asDiagonal())));
    target.diagonal() += 2.0 * s;
    target = 0.5 * (target + target.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(target);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-6)
        throw FactorizationFailedError("s-vector is infeasible for this gram matrix");
    ev = ev.cwiseMax(0.0);
    const Eigen::MatrixXd c = ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

    // Random orthonormal basis of the complement of col(X): project Gaussian
    // columns off col(X), then orthonormalize.
    Eigen::HouseholderQR<Eigen::MatrixXd> xqr(x);
    const Eigen::MatrixXd qx = xqr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    Eigen::MatrixXd g = gaussian_matrix(n, m, rng);
    g -= qx * (qx.transpose() * g);
    Eigen::HouseholderQR<Eigen::MatrixXd> gqr(g);
    const Eigen::MatrixXd u = gqr.householderQ() * Eigen::MatrixXd::Identity(n, m);

    KnockoffSet out;
    out.original = x;
    out.s = sv;
    out.knockoff = x - x * ldlt.solve(Eigen::MatrixXd(s.asDiagonal())) + u * c;
    return out;
}

KnockoffSet construct_knockoffs(const DesignMatrix& design, const SVector& s, Rng& rng) {
    return construct_knockoffs(design.values, s, rng);
}

KnockoffSet construct_recycled_knockoffs(const Eigen::MatrixXd& part1,
                                         const Eigen::MatrixXd& part2,
                                         const SVector& s, Rng& rng) {
    const KnockoffSet lower = construct_knockoffs(part2, s, rng);
    const int n1 = static_cast<int>(part1.rows());
    const int n2 = static_cast<int>(part2.rows());
    const int m = static_cast<int>(part2.cols());
    KnockoffSet out;
    out.original.resize(n1 + n2, m);
    out.original.topRows(n1) = part1;
    out.original.bottomRows(n2) = part2;
    out.knockoff.resize(n1 + n2, m);
    out.knockoff.topRows(n1) = part1;  // recycled rows, verbatim
    out.knockoff.bottomRows(n2) = lower.knockoff;
    out.s = s;
    return out;
}

double knockoff_gram_error(const KnockoffSet& k) {
    const Eigen::MatrixXd gram = k.original.transpose() * k.original;
    const Eigen::MatrixXd kk = k.knockoff.transpose() * k.knockoff;
    Eigen::MatrixXd xk = k.original.transpose() * k.knockoff;
    xk.diagonal() += k.s.s;
    return std::max((kk - gram).cwiseAbs().maxCoeff(), (xk - gram).cwiseAbs().maxCoeff());
}

} // namespace ggmkf
