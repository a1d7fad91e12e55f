#include "ggmkf/feature_stats.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "ggmkf/elastic_net.hpp"
#include "ggmkf/errors.hpp"
#include "ggmkf/parallel.hpp"
#include "ggmkf/rng.hpp"

namespace ggmkf {

void StatRecipe::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidSpecError("recipe alpha must be in (0, 1]");
    if ((z_kind == ZKind::coef_magnitude) != lambda_quantile.has_value())
        throw InvalidSpecError("lambda_quantile must be given exactly for coefficient-magnitude recipes");
    if (lambda_quantile && !(*lambda_quantile > 0.0 && *lambda_quantile <= 1.0))
        throw InvalidSpecError("lambda_quantile must be in (0, 1]");
}

std::string StatRecipe::name() const {
    std::string out = z_kind == ZKind::entry_lambda ? "entry" : "coef";
    out += combiner == Combiner::difference ? "-diff" : "-max";
    out += "-a" + std::to_string(alpha).substr(0, 4);
    if (lambda_quantile) out += "-q" + std::to_string(*lambda_quantile).substr(0, 4);
    return out;
}

std::vector<StatRecipe> default_recipes() {
    std::vector<StatRecipe> out;
    const double alphas[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    for (Combiner c : {Combiner::difference, Combiner::signed_max})
        for (double a : alphas) out.push_back({ZKind::entry_lambda, c, a, std::nullopt});
    for (Combiner c : {Combiner::difference, Combiner::signed_max})
        for (double a : alphas)
            for (int t = 1; t <= 10; ++t)
                out.push_back({ZKind::coef_magnitude, c, a, t / 10.0});
    return out;  // 10 + 100 = 110
}

namespace {

Eigen::VectorXd combine(const Eigen::VectorXd& z, const Eigen::VectorXd& zt, Combiner combiner) {
    const int m = static_cast<int>(z.size());
    Eigen::VectorXd w(m);
    for (int j = 0; j < m; ++j) {
        const double d = z[j] - zt[j];
        if (combiner == Combiner::difference) {
            w[j] = d;
        } else {
            w[j] = d == 0.0 ? 0.0 : (d > 0 ? 1.0 : -1.0) * std::max(z[j], zt[j]);
        }
    }
    return w;
}

Eigen::VectorXd coef_at_quantile(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                                 const EnetPath& path, double alpha, double gamma, double tol) {
    const double lam = quantile(path.lambdas, gamma);
    int nearest = 0;
    for (int k = 1; k < path.lambdas.size(); ++k)
        if (std::abs(path.lambdas[k] - lam) < std::abs(path.lambdas[nearest] - lam)) nearest = k;
    EnetCovSolver solver(gram, xty);
    solver.reset(path.coefficients.row(nearest).transpose());
    solver.solve(alpha, lam, tol);
    return solver.beta().cwiseAbs();
}

Eigen::VectorXd statistics_from_path(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                                     const EnetPath& path, const StatRecipe& recipe, double tol) {
    const int m = static_cast<int>(xty.size()) / 2;
    Eigen::VectorXd z, zt;
    if (recipe.z_kind == ZKind::entry_lambda) {
        z = path.entry_lambda.head(m);
        zt = path.entry_lambda.tail(m);
    } else {
        const Eigen::VectorXd mag =
            coef_at_quantile(gram, xty, path, recipe.alpha, *recipe.lambda_quantile, tol);
        z = mag.head(m);
        zt = mag.tail(m);
    }
    return combine(z, zt, recipe.combiner);
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& x, int col) {
    Eigen::MatrixXd out(x.rows(), x.cols() - 1);
    out.leftCols(col) = x.leftCols(col);
    out.rightCols(x.cols() - 1 - col) = x.rightCols(x.cols() - 1 - col);
    return out;
}

constexpr double kStatTol = 1e-7;

using KnockoffFactory = std::function<KnockoffSet(int node, SStrategy, Rng&)>;

std::vector<FeatureStatMatrix> build_w_common(const Eigen::MatrixXd& x,
                                              const std::vector<WRequest>& requests,
                                              std::uint64_t seed, const KnockoffFactory& factory) {
    const int p = static_cast<int>(x.cols());
    for (const WRequest& r : requests) r.recipe.validate();

    std::set<SStrategy> strategies;
    for (const WRequest& r : requests) strategies.insert(r.strategy);
    // (strategy, alpha) -> whether any request needs path coefficients
    std::map<std::pair<SStrategy, double>, bool> path_jobs;
    for (const WRequest& r : requests) {
        auto key = std::make_pair(r.strategy, r.recipe.alpha);
        path_jobs[key] = path_jobs[key] || r.recipe.z_kind == ZKind::coef_magnitude;
    }

    std::vector<FeatureStatMatrix> results(requests.size());
    for (auto& r : results) r.w = Eigen::MatrixXd::Zero(p, p);

    parallel_for(p, [&](int i) {
        const Eigen::VectorXd y = x.col(i);
        for (SStrategy strategy : strategies) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(strategy)));
            const KnockoffSet kn = factory(i, strategy, rng);
            const int m = static_cast<int>(kn.original.cols());
            Eigen::MatrixXd aug(x.rows(), 2 * m);
            aug.leftCols(m) = kn.original;
            aug.rightCols(m) = kn.knockoff;
            const Eigen::MatrixXd gram = aug.transpose() * aug;
            const Eigen::VectorXd aty = aug.transpose() * y;
            for (const auto& [key, keep_coefs] : path_jobs) {
                if (key.first != strategy) continue;
                const double alpha = key.second;
                const EnetPath path =
                    enet_path_cov(gram, aty, alpha, 100, 1e-4, kStatTol, keep_coefs);
                for (std::size_t r = 0; r < requests.size(); ++r) {
                    if (requests[r].strategy != strategy || requests[r].recipe.alpha != alpha)
                        continue;
                    const Eigen::VectorXd w =
                        statistics_from_path(gram, aty, path, requests[r].recipe, kStatTol);
                    for (int j = 0; j < m; ++j) results[r].w(j < i ? j : j + 1, i) = w[j];
                }
            }
        }
    });
    return results;
}

} // namespace

Eigen::VectorXd node_statistics_cov(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                                    const StatRecipe& recipe, double tol) {
    recipe.validate();
    const bool keep = recipe.z_kind == ZKind::coef_magnitude;
    const EnetPath path = enet_path_cov(gram, xty, recipe.alpha, 100, 1e-4, tol, keep);
    return statistics_from_path(gram, xty, path, recipe, tol);
}

Eigen::VectorXd node_statistics(int node, const DesignMatrix& data, const KnockoffSet& knockoffs,
                                const StatRecipe& recipe, double tol) {
    const int p = data.cols();
    const int m = static_cast<int>(knockoffs.original.cols());
    Eigen::MatrixXd aug(data.rows(), 2 * m);
    aug.leftCols(m) = knockoffs.original;
    aug.rightCols(m) = knockoffs.knockoff;
    const Eigen::VectorXd y = data.values.col(node);
    const Eigen::VectorXd w = node_statistics_cov(aug.transpose() * aug, aug.transpose() * y,
                                                  recipe, tol);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < m; ++j) out[j < node ? j : j + 1] = w[j];
    return out;
}

std::vector<FeatureStatMatrix> build_w_matrices(const DesignMatrix& data,
                                                const std::vector<WRequest>& requests,
                                                std::uint64_t seed) {
    const Eigen::MatrixXd gram_full = data.values.transpose() * data.values;
    KnockoffFactory factory = [&](int node, SStrategy strategy, Rng& rng) {
        const Eigen::MatrixXd sub = drop_column(data.values, node);
        const Eigen::MatrixXd gram_sub = drop_column(drop_column(gram_full, node).transpose(), node);
        return construct_knockoffs(sub, compute_s(gram_sub, strategy), rng);
    };
    return build_w_common(data.values, requests, seed, factory);
}

std::vector<FeatureStatMatrix> build_w_matrices_recycled(const Eigen::MatrixXd& part1,
                                                         const Eigen::MatrixXd& part2,
                                                         const std::vector<WRequest>& requests,
                                                         std::uint64_t seed) {
    Eigen::MatrixXd stacked(part1.rows() + part2.rows(), part1.cols());
    stacked.topRows(part1.rows()) = part1;
    stacked.bottomRows(part2.rows()) = part2;
    KnockoffFactory factory = [&](int node, SStrategy strategy, Rng& rng) {
        const Eigen::MatrixXd sub1 = drop_column(part1, node);
        const Eigen::MatrixXd sub2 = drop_column(part2, node);
        const SVector s = compute_s_scaled(sub2.transpose() * sub2, strategy);
        return construct_recycled_knockoffs(sub1, sub2, s, rng);
    };
    return build_w_common(stacked, requests, seed, factory);
}

FeatureStatMatrix build_w_matrix(const DesignMatrix& data, const StatRecipe& recipe,
                                 SStrategy strategy, std::uint64_t seed) {
    return std::move(build_w_matrices(data, {{strategy, recipe}}, seed).front());
}

} // namespace ggmkf
