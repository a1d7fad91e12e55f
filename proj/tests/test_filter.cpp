#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "ggmkf/errors.hpp"
#include "ggmkf/filter.hpp"

using namespace ggmkf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd random_w(int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd w(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) w(i, j) = i == j ? 0.0 : normal(rng);
    return w;
}

// Independent re-derivation of the per-node constraint system: for threshold
// vector t, every node must satisfy
//   delta*a + #{j : W(j,i) <= -t_i} <= rhs * max(|edges|, 1),
// with rhs = 2q/(c_a p) under AND and q/(c_a p) under OR.
int count_neg(const Eigen::MatrixXd& w, int col, double t) {
    if (std::isinf(t)) return 0;
    int c = 0;
    for (int j = 0; j < w.rows(); ++j)
        if (j != col && w(j, col) <= -t) ++c;
    return c;
}

int edge_count_for(const Eigen::MatrixXd& w, const std::vector<double>& t, Rule rule) {
    const int p = static_cast<int>(w.cols());
    int edges = 0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const bool ij = !std::isinf(t[i]) && w(j, i) >= t[i];
            const bool ji = !std::isinf(t[j]) && w(i, j) >= t[j];
            if (rule == Rule::AND ? (ij && ji) : (ij || ji)) ++edges;
        }
    return edges;
}

bool feasible_for(const Eigen::MatrixXd& w, const std::vector<double>& t,
                  const FilterConfig& cfg) {
    const int p = static_cast<int>(w.cols());
    // The empty estimate (every threshold infinite) is always allowed.
    if (std::all_of(t.begin(), t.end(), [](double x) { return std::isinf(x); })) return true;
    const double rhs = (cfg.rule == Rule::AND ? 2.0 : 1.0) * cfg.q / (cfg.c_a * p);
    const int denom = std::max(edge_count_for(w, t, cfg.rule), 1);
    for (int i = 0; i < p; ++i)
        if (cfg.delta * cfg.a + count_neg(w, i, t[i]) > rhs * denom + 1e-12) return false;
    return true;
}

// Exhaustive search over every candidate tuple (each column's nonzero
// magnitudes plus +inf); returns the maximal feasible edge count.
int brute_force_best(const Eigen::MatrixXd& w, const FilterConfig& cfg) {
    const int p = static_cast<int>(w.cols());
    std::vector<std::vector<double>> cand(p);
    for (int i = 0; i < p; ++i) {
        std::set<double> mags;
        for (int j = 0; j < p; ++j)
            if (j != i && std::abs(w(j, i)) > 1e-12) mags.insert(std::abs(w(j, i)));
        cand[i].assign(mags.begin(), mags.end());
        cand[i].push_back(kInf);
    }
    std::vector<std::size_t> idx(p, 0);
    std::vector<double> t(p);
    int best = 0;
    while (true) {
        for (int i = 0; i < p; ++i) t[i] = cand[i][idx[i]];
        if (feasible_for(w, t, cfg)) best = std::max(best, edge_count_for(w, t, cfg.rule));
        int carry = 0;
        while (carry < p && ++idx[carry] == cand[carry].size()) idx[carry++] = 0;
        if (carry == p) break;
    }
    return best;
}

} // namespace

TEST_CASE("single-response threshold matches brute-force candidates") {
    Eigen::VectorXd w(8);
    w << 3, -1, 2, 4, 5, 6, -2, 7;
    const double t = linear_threshold(w, 0.5, 1);
    // Both T = 1 and T = 2 satisfy (1 + #below)/#above <= 0.5 and select the
    // same 6 variables; the solver returns the smallest feasible candidate.
    CHECK(t == doctest::Approx(1.0));
    const std::vector<int> sel = linear_selection(w, 0.5, 1);
    CHECK(sel == std::vector<int>{0, 2, 3, 4, 5, 7});
}

TEST_CASE("infeasible single-response problems return +inf") {
    Eigen::VectorXd w(5);
    w << 3, -1, 2, -2, 5;
    CHECK(std::isinf(linear_threshold(w, 0.4, 1)));
    CHECK(linear_selection(w, 0.4, 1).empty());
}

TEST_CASE("all-positive statistics with delta 0 select everything") {
    Eigen::VectorXd w(4);
    w << 0.5, 2, 1.5, 3;
    CHECK(linear_threshold(w, 0.1, 0) == doctest::Approx(0.5));
    CHECK(linear_selection(w, 0.1, 0).size() == 4);
}

TEST_CASE("negative budget ceiling yields the empty graph") {
    // q(p-1)/c_a - a < 0 for q=0.1, p=5, (a,c_a)=(1,1.93)
    FeatureStatMatrix w{random_w(5, 1)};
    const ThresholdVector t = solve_thresholds(w, {0.1, 1, 1.0, 1.93, Rule::AND});
    CHECK((t.t.array() == kInf).all());
    CHECK(assemble_graph(w, t).edges.empty());
}

TEST_CASE("threshold solver matches exhaustive enumeration on small problems") {
    const FilterConfig bases[] = {
        {0.7, 1, 1.0, 1.93, Rule::AND},
        {0.7, 0, 1.0, 1.93, Rule::AND},
        {0.7, 1, 1.0, 1.93, Rule::OR},
        {0.7, 0, 1.0, 1.93, Rule::OR},
    };
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const int p = 3 + static_cast<int>(trial % 4);
        FeatureStatMatrix w{random_w(p, 1000 + trial)};
        for (FilterConfig cfg : bases) {
            const ThresholdVector t = solve_thresholds(w, cfg);
            std::vector<double> tv(t.t.data(), t.t.data() + p);
            CHECK(feasible_for(w.w, tv, cfg));
            CHECK(edge_count_for(w.w, tv, cfg.rule) == brute_force_best(w.w, cfg));
        }
    }
}

TEST_CASE("assembly follows the AND and OR rules") {
    FeatureStatMatrix w{Eigen::MatrixXd::Zero(3, 3)};
    // column i holds node i's statistics: W(2,1) strong, W(1,2) weak.
    w.w(1, 0) = 2.0;
    w.w(0, 1) = 0.1;
    ThresholdVector t;
    t.t = Eigen::VectorXd::Ones(3);

    t.config.rule = Rule::OR;
    GraphEstimate e = assemble_graph(w, t);
    CHECK(e.has_edge(0, 1));

    t.config.rule = Rule::AND;
    e = assemble_graph(w, t);
    CHECK_FALSE(e.has_edge(0, 1));
}

TEST_CASE("AND estimates are contained in OR estimates at a fixed threshold") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        FeatureStatMatrix w{random_w(6, 40 + trial)};
        ThresholdVector t;
        t.t = Eigen::VectorXd::Constant(6, 0.8);
        t.config.rule = Rule::AND;
        const GraphEstimate e_and = assemble_graph(w, t);
        t.config.rule = Rule::OR;
        const GraphEstimate e_or = assemble_graph(w, t);
        for (const auto& e : e_and.edges) CHECK(e_or.has_edge(e.first, e.second));
    }
}

TEST_CASE("mFDR relaxation never shrinks the estimate") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        FeatureStatMatrix w{random_w(8, 7000 + trial)};
        for (Rule rule : {Rule::AND, Rule::OR}) {
            const int strict = filter_from_w(w, {0.5, 1, 1.0, 1.93, rule}).edge_count();
            const int relaxed = filter_from_w(w, {0.5, 0, 1.0, 1.93, rule}).edge_count();
            CHECK(relaxed >= strict);
        }
    }
}

TEST_CASE("the end-to-end filter rejects undersized samples") {
    Eigen::MatrixXd raw = Eigen::MatrixXd::Random(15, 8);
    StatRecipe recipe{ZKind::entry_lambda, Combiner::difference, 1.0, std::nullopt};
    CHECK_THROWS_AS(ggm_knockoff_filter(raw, FilterConfig{}, recipe, SStrategy::equi, 1),
                    InsufficientSamplesError);
}
