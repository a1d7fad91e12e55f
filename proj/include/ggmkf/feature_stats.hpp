#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ggmkf/design.hpp"
#include "ggmkf/knockoffs.hpp"

namespace ggmkf {

enum class ZKind { entry_lambda, coef_magnitude };
enum class Combiner { difference, signed_max };

// How to turn one node-wise regression into a column of statistics:
// variable importances Z (activation λ along the regularization path, or
// |coefficient| at a fixed λ-grid quantile), compared between each variable
// and its knockoff.
struct StatRecipe {
    ZKind z_kind = ZKind::entry_lambda;
    Combiner combiner = Combiner::difference;
    double alpha = 1.0;                          // elastic-net mixing, (0,1]
    std::optional<double> lambda_quantile;       // required iff coef_magnitude

    void validate() const;  // throws InvalidSpec
    std::string name() const;
};

// The 110 recipes used by the default hyperparameter grid.
std::vector<StatRecipe> default_recipes();

struct FeatureStatMatrix {
    Eigen::MatrixXd w;  // p × p, zero diagonal; column i holds node i's statistics
};

// Statistics for one augmented problem given only its covariance summaries:
// gram = [X K]ᵀ[X K] (2m × 2m) and xty = [X K]ᵀy. Returns the m combined
// statistics W_j. Exposed so the sufficiency property is testable directly.
Eigen::VectorXd node_statistics_cov(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                                    const StatRecipe& recipe, double tol = 1e-7);

// Column of statistics for one node: response = column `node` of data,
// design = the remaining columns alongside their knockoffs. Entry `node` is 0.
Eigen::VectorXd node_statistics(int node, const DesignMatrix& data, const KnockoffSet& knockoffs,
                                const StatRecipe& recipe, double tol = 1e-7);

struct WRequest {
    SStrategy strategy = SStrategy::equi;
    StatRecipe recipe;
};

// Batch builder: one W matrix per request, sharing per-node knockoffs across
// requests with the same strategy and regularization paths across requests
// with the same (strategy, alpha). Deterministic given seed; parallel over
// nodes with derived per-node seeds.
std::vector<FeatureStatMatrix> build_w_matrices(const DesignMatrix& data,
                                                const std::vector<WRequest>& requests,
                                                std::uint64_t seed);

// Same, but with recycled knockoffs: part1/part2 are the two halves of a
// jointly standardized matrix; part1 rows are reused verbatim in each
// knockoff block and part2 gets fresh knockoffs built from part2 alone.
std::vector<FeatureStatMatrix> build_w_matrices_recycled(const Eigen::MatrixXd& part1,
                                                         const Eigen::MatrixXd& part2,
                                                         const std::vector<WRequest>& requests,
                                                         std::uint64_t seed);

FeatureStatMatrix build_w_matrix(const DesignMatrix& data, const StatRecipe& recipe,
                                 SStrategy strategy, std::uint64_t seed);

} // namespace ggmkf
