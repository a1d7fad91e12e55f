#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ggmkf/filter.hpp"
#include "ggmkf/rng.hpp"

namespace ggmkf {

enum class GraphKind { band, block, erdos_renyi, cluster };

struct PrecisionSpec {
    GraphKind kind = GraphKind::band;
    int p = 200;
    double b = -0.6;          // edge parameter (band/block)
    std::uint64_t seed = 0;
};

struct TrueGraph {
    int p = 0;
    std::vector<std::pair<int, int>> edges;  // i < j
    bool has(int i, int j) const;
    int edge_count() const { return static_cast<int>(edges.size()); }
};

// Builds the base matrix for the requested kind (band decay profile, fully
// connected blocks, Erdős–Rényi draws, or Erdős–Rényi clusters), applies a
// random symmetric permutation to break the ordering pattern, then shifts the
// diagonal by |λ_min| + 0.5 so the result is positive definite.
std::pair<Eigen::MatrixXd, TrueGraph> generate_precision(const PrecisionSpec& spec);

// n i.i.d. rows from N(0, Ω⁻¹).
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& omega, int n, Rng& rng);

// (|Ê \ E| / (|Ê| ∨ 1), |Ê ∩ E| / (|E| ∨ 1))
std::pair<double, double> fdp_tpp(const GraphEstimate& estimate, const TrueGraph& truth);

enum class PvalMethod { BH, BY };

// Two-sided Fisher-z tests for zero partial correlations from the inverse
// sample covariance, followed by BH or BY step-up at level q.
GraphEstimate baseline_bh_by(const Eigen::MatrixXd& data, double q, PvalMethod method);

} // namespace ggmkf
