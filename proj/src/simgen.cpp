#include "ggmkf/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ggmkf/errors.hpp"

namespace ggmkf {

namespace {

Eigen::MatrixXd base_matrix(const PrecisionSpec& spec, Rng& rng) {
    const int p = spec.p;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto er_fill = [&](int lo, int hi, double edge_prob) {
        std::uniform_real_distribution<double> mag(0.2, 0.6);
        for (int i = lo; i < hi; ++i)
            for (int j = lo; j < i; ++j) {
                // Draw in fixed order so the seed fully determines the graph.
                const double magnitude = mag(rng);
                const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
                const bool present = unit(rng) < edge_prob;
                if (present) m(i, j) = m(j, i) = sign * magnitude;
            }
    };
    switch (spec.kind) {
        case GraphKind::band: {
            const double sign = spec.b < 0 ? -1.0 : 1.0;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < i; ++j)
                    if (i - j <= 10) m(i, j) = m(j, i) = sign * std::pow(std::abs(spec.b), (i - j) / 10.0);
            break;
        }
        case GraphKind::block: {
            if (p % 10 != 0) throw InvalidSpecError("block graph needs p divisible by 10");
            const int size = p / 10;
            for (int blockStart = 0; blockStart < p; blockStart += size)
                for (int i = blockStart; i < blockStart + size; ++i)
                    for (int j = blockStart; j < i; ++j) m(i, j) = m(j, i) = spec.b;
            break;
        }
        case GraphKind::erdos_renyi:
            er_fill(0, p, 0.1);
            break;
        case GraphKind::cluster: {
            if (p % 5 != 0) throw InvalidSpecError("cluster graph needs p divisible by 5");
            const int size = p / 5;
            for (int blockStart = 0; blockStart < p; blockStart += size)
                er_fill(blockStart, blockStart + size, 0.5);
            break;
        }
    }
    return m;
}

} // namespace

bool TrueGraph::has(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

std::pair<Eigen::MatrixXd, TrueGraph> generate_precision(const PrecisionSpec& spec) {
    Rng rng(mix_seed(spec.seed));
    Eigen::MatrixXd base = base_matrix(spec, rng);
    const int p = spec.p;

    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) permuted(perm[i], perm[j]) = base(i, j);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(permuted, Eigen::EigenvaluesOnly);
    permuted.diagonal().array() += std::abs(es.eigenvalues().minCoeff()) + 0.5;

    TrueGraph truth;
    truth.p = p;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (std::abs(permuted(i, j)) > 1e-12) truth.edges.emplace_back(i, j);
    return {permuted, truth};
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& omega, int n, Rng& rng) {
    const int p = static_cast<int>(omega.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefiniteError("precision matrix is not positive definite");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd z(p);
    for (int r = 0; r < n; ++r) {
        for (int j = 0; j < p; ++j) z[j] = normal(rng);
        // Lᵀ x = z gives cov(x) = (LLᵀ)⁻¹ = Ω⁻¹.
        x.row(r) = llt.matrixU().solve(z).transpose();
    }
    return x;
}

std::pair<double, double> fdp_tpp(const GraphEstimate& estimate, const TrueGraph& truth) {
    int false_edges = 0, true_edges = 0;
    for (const auto& e : estimate.edges)
        (truth.has(e.first, e.second) ? true_edges : false_edges)++;
    const double fdp = static_cast<double>(false_edges) / std::max(estimate.edge_count(), 1);
    const double tpp = static_cast<double>(true_edges) / std::max(truth.edge_count(), 1);
    return {fdp, tpp};
}

GraphEstimate baseline_bh_by(const Eigen::MatrixXd& data, double q, PvalMethod method) {
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    if (n <= p + 3)
        throw InsufficientSamplesError("partial-correlation tests need n > p + 3");

    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularCovarianceError("sample covariance is singular");
    const Eigen::MatrixXd kappa = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    if (!kappa.allFinite()) throw SingularCovarianceError("sample covariance is singular");

    struct Test {
        int i, j;
        double pval;
    };
    std::vector<Test> tests;
    tests.reserve(p * (p - 1) / 2);
    const double scale = std::sqrt(static_cast<double>(n - p - 1));
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            double rho = -kappa(i, j) / std::sqrt(kappa(i, i) * kappa(j, j));
            rho = std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15);
            const double z = std::atanh(rho) * scale;
            tests.push_back({i, j, std::erfc(std::abs(z) / std::sqrt(2.0))});
        }

    const std::size_t m = tests.size();
    double level = q;
    if (method == PvalMethod::BY) {
        double harmonic = 0.0;
        for (std::size_t k = 1; k <= m; ++k) harmonic += 1.0 / static_cast<double>(k);
        level = q / harmonic;
    }
    std::vector<double> sorted;
    sorted.reserve(m);
    for (const Test& t : tests) sorted.push_back(t.pval);
    std::sort(sorted.begin(), sorted.end());
    double cutoff = -1.0;
    for (std::size_t k = m; k >= 1; --k)
        if (sorted[k - 1] <= level * static_cast<double>(k) / static_cast<double>(m)) {
            cutoff = sorted[k - 1];
            break;
        }

    GraphEstimate out;
    out.p = p;
    out.neighborhoods.resize(p);
    for (const Test& t : tests)
        if (t.pval <= cutoff) {
            out.edges.emplace_back(t.i, t.j);
            out.neighborhoods[t.i].push_back(t.j);
            out.neighborhoods[t.j].push_back(t.i);
        }
    return out;
}

} // namespace ggmkf
