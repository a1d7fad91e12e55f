#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ggmkf/filter.hpp"

namespace ggmkf {

struct HyperCombo {
    double a = 1.0;
    double c_a = 1.93;
    SStrategy strategy = SStrategy::equi;
    StatRecipe recipe;
    Rule rule = Rule::AND;
};

// Candidate hyperparameter space for data-driven selection.
struct HyperGrid {
    std::vector<std::pair<double, double>> a_ca_set;
    std::vector<SStrategy> strategy_set;
    std::vector<StatRecipe> recipe_set;
    std::vector<Rule> rule_set;

    // Full grid: 2 (a,c_a) pairs × 2 strategies × 110 recipes × 2 rules = 880.
    static HyperGrid full();
    // Desk-scale grid: 4 alpha-1 recipes, equicorrelated only (16 combos).
    static HyperGrid reduced();

    // Fixed lexicographic order so random tie-breaking is reproducible.
    std::vector<HyperCombo> combos() const;
};

struct SplitPlan {
    std::vector<int> part1_rows;  // ⌊n/2⌋ rows
    std::vector<int> part2_rows;  // the rest
    static SplitPlan make(int n, Rng& rng);
};

// Run the filter on part1 for every grid combination and return the one with
// the most discoveries; ties are broken uniformly at random via tie_rng.
// W matrices are shared across combinations that only differ in (a,c_a)/rule.
HyperCombo select_hyperparams(const Eigen::MatrixXd& part1_raw, double q, int delta,
                              const HyperGrid& grid, std::uint64_t w_seed, Rng& tie_rng);

// Split, select hyperparameters on part1, then estimate on the full sample
// with recycled knockoffs (part1 rows reused verbatim). Requires n ≥ 4p.
// The chosen combination is reported through `selected` when given.
GraphEstimate recycled_filter(const Eigen::MatrixXd& raw, double q, int delta,
                              const HyperGrid& grid, std::uint64_t seed,
                              HyperCombo* selected = nullptr);

// Same split and selection, but the final estimate uses part2 only
// (no recycling). The baseline for the paired power comparison.
GraphEstimate split_filter_plain(const Eigen::MatrixXd& raw, double q, int delta,
                                 const HyperGrid& grid, std::uint64_t seed);

// Both estimates from one shared split-and-selection stage. Equivalent to
// calling recycled_filter and split_filter_plain with the same seed, at half
// the cost.
struct SplitFilterPair {
    GraphEstimate recycled;
    GraphEstimate plain;
};
SplitFilterPair split_filter_pair(const Eigen::MatrixXd& raw, double q, int delta,
                                  const HyperGrid& grid, std::uint64_t seed);

// Repeat recycled_filter over independent splits and keep edges found in
// strictly more than half of them. No FDR guarantee is claimed.
GraphEstimate aggregate_splits(const Eigen::MatrixXd& raw, double q, int delta,
                               const HyperGrid& grid, int num_splits, std::uint64_t seed);

} // namespace ggmkf
