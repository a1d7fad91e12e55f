#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ggmkf/feature_stats.hpp"

namespace ggmkf {

enum class Rule { AND, OR };

struct FilterConfig {
    double q = 0.2;     // nominal FDR level
    int delta = 1;      // 1 = FDR, 0 = modified FDR
    double a = 1.0;     // numerator offset
    double c_a = 1.93;  // calibrated bound for a
    Rule rule = Rule::AND;
};

// Per-node cutoffs on the columns of W; +∞ means "select nothing".
struct ThresholdVector {
    Eigen::VectorXd t;
    FilterConfig config;
};

struct GraphEstimate {
    int p = 0;
    std::vector<std::pair<int, int>> edges;            // i < j
    std::vector<std::vector<int>> neighborhoods;       // per-node selected sets
    bool has_edge(int i, int j) const;
    int edge_count() const { return static_cast<int>(edges.size()); }
};

// Single-response knockoff threshold: smallest T among the nonzero |W_i| with
// (delta + #{W_i ≤ −T}) / (#{W_i ≥ T} ∨ 1) ≤ q; +∞ if none qualifies.
double linear_threshold(const Eigen::VectorXd& w, double q, int delta);
std::vector<int> linear_selection(const Eigen::VectorXd& w, double q, int delta);

// Threshold vector maximizing the estimated edge count subject to the
// per-node constraint of the active problem (FDR or mFDR form, AND or OR
// rule). Scans the negative-count budget m from its largest admissible value
// downward; the first feasible vector is optimal.
ThresholdVector solve_thresholds(const FeatureStatMatrix& w, const FilterConfig& config);

GraphEstimate assemble_graph(const FeatureStatMatrix& w, const ThresholdVector& t);

// Threshold + assembly for a precomputed W (used when many configs share W).
GraphEstimate filter_from_w(const FeatureStatMatrix& w, const FilterConfig& config);

// End to end: standardize, build W node-wise with fresh knockoffs, solve
// thresholds, assemble. Requires n ≥ 2p.
GraphEstimate ggm_knockoff_filter(const Eigen::MatrixXd& raw, const FilterConfig& config,
                                  const StatRecipe& recipe, SStrategy strategy,
                                  std::uint64_t seed);

// The single-response (linear-model) filter: returns selected column indices.
std::vector<int> linear_knockoff_filter(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                                        double q, int delta, SStrategy strategy,
                                        const StatRecipe& recipe, std::uint64_t seed);

} // namespace ggmkf
