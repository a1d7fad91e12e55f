#include "ggmkf/recycling.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ggmkf/errors.hpp"

namespace ggmkf {

HyperGrid HyperGrid::full() {
    HyperGrid g;
    g.a_ca_set = {{1.0, 1.93}, {0.01, 102.0}};
    g.strategy_set = {SStrategy::equi, SStrategy::sdp};
    g.recipe_set = default_recipes();
    g.rule_set = {Rule::AND, Rule::OR};
    return g;
}

HyperGrid HyperGrid::reduced() {
    // All four recipes share a single lasso path per node, so the whole grid
    // costs one regularization path plus cheap re-combinations.
    HyperGrid g = full();
    g.strategy_set = {SStrategy::equi};
    g.recipe_set = {{ZKind::entry_lambda, Combiner::difference, 1.0, std::nullopt},
                    {ZKind::entry_lambda, Combiner::signed_max, 1.0, std::nullopt},
                    {ZKind::coef_magnitude, Combiner::difference, 1.0, 0.5},
                    {ZKind::coef_magnitude, Combiner::signed_max, 1.0, 0.5}};
    return g;
}

std::vector<HyperCombo> HyperGrid::combos() const {
    std::vector<HyperCombo> out;
    for (const auto& [a, ca] : a_ca_set)
        for (SStrategy s : strategy_set)
            for (const StatRecipe& r : recipe_set)
                for (Rule rule : rule_set) out.push_back({a, ca, s, r, rule});
    return out;
}

SplitPlan SplitPlan::make(int n, Rng& rng) {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    SplitPlan plan;
    const int n1 = n / 2;
    plan.part1_rows.assign(rows.begin(), rows.begin() + n1);
    plan.part2_rows.assign(rows.begin() + n1, rows.end());
    return plan;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& rows) {
    Eigen::MatrixXd out(rows.size(), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = x.row(rows[r]);
    return out;
}

// Deduplicated W requests plus a map from combo index to request index.
struct RequestPlan {
    std::vector<WRequest> requests;
    std::vector<std::size_t> combo_to_request;
};

RequestPlan plan_requests(const std::vector<HyperCombo>& combos) {
    RequestPlan plan;
    std::map<std::pair<int, std::string>, std::size_t> seen;
    for (const HyperCombo& c : combos) {
        const auto key = std::make_pair(static_cast<int>(c.strategy), c.recipe.name());
        auto it = seen.find(key);
        if (it == seen.end()) {
            it = seen.emplace(key, plan.requests.size()).first;
            plan.requests.push_back({c.strategy, c.recipe});
        }
        plan.combo_to_request.push_back(it->second);
    }
    return plan;
}

FilterConfig config_for(const HyperCombo& c, double q, int delta) {
    return FilterConfig{q, delta, c.a, c.c_a, c.rule};
}

struct Selection {
    HyperCombo combo;
    std::size_t request_index;
};

Selection select_internal(const Eigen::MatrixXd& part1_raw, double q, int delta,
                          const HyperGrid& grid, std::uint64_t w_seed, Rng& tie_rng) {
    const std::vector<HyperCombo> combos = grid.combos();
    if (combos.empty()) throw InvalidSpecError("hyperparameter grid is empty");
    const RequestPlan plan = plan_requests(combos);
    const DesignMatrix part1 = standardize(part1_raw);
    const std::vector<FeatureStatMatrix> ws = build_w_matrices(part1, plan.requests, w_seed);

    std::vector<int> counts(combos.size());
    int best = -1;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        counts[c] = filter_from_w(ws[plan.combo_to_request[c]], config_for(combos[c], q, delta))
                        .edge_count();
        best = std::max(best, counts[c]);
    }
    std::vector<std::size_t> ties;
    for (std::size_t c = 0; c < combos.size(); ++c)
        if (counts[c] == best) ties.push_back(c);
    std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
    const std::size_t chosen = ties[pick(tie_rng)];
    return {combos[chosen], plan.combo_to_request[chosen]};
}

struct Stage {
    SplitPlan plan;
    Selection selection;
};

Stage run_stages(const Eigen::MatrixXd& raw, double q, int delta, const HyperGrid& grid,
                 std::uint64_t seed) {
    const int n = static_cast<int>(raw.rows());
    const int p = static_cast<int>(raw.cols());
    if (n < 4 * p)
        throw InsufficientSamplesError("sample-splitting selection needs at least 4p samples");
    Rng split_rng(derive_seed(seed, 1));
    Stage st;
    st.plan = SplitPlan::make(n, split_rng);
    Rng tie_rng(derive_seed(seed, 3));
    st.selection = select_internal(take_rows(raw, st.plan.part1_rows), q, delta, grid,
                                   derive_seed(seed, 2), tie_rng);
    return st;
}

} // namespace

HyperCombo select_hyperparams(const Eigen::MatrixXd& part1_raw, double q, int delta,
                              const HyperGrid& grid, std::uint64_t w_seed, Rng& tie_rng) {
    if (part1_raw.rows() < 2 * part1_raw.cols())
        throw InsufficientSamplesError("selection sample needs at least 2p rows");
    return select_internal(part1_raw, q, delta, grid, w_seed, tie_rng).combo;
}

namespace {

GraphEstimate finish_recycled(const Eigen::MatrixXd& raw, double q, int delta, const Stage& st,
                              std::uint64_t seed) {
    const HyperCombo& c = st.selection.combo;

    // Standardize the reordered stack as a whole, then split it back so the
    // recycled rows are the standardized part1.
    Eigen::MatrixXd stacked(raw.rows(), raw.cols());
    const int n1 = static_cast<int>(st.plan.part1_rows.size());
    stacked.topRows(n1) = take_rows(raw, st.plan.part1_rows);
    stacked.bottomRows(raw.rows() - n1) = take_rows(raw, st.plan.part2_rows);
    const DesignMatrix std_stack = standardize(stacked);

    const std::vector<FeatureStatMatrix> ws = build_w_matrices_recycled(
        std_stack.values.topRows(n1), std_stack.values.bottomRows(raw.rows() - n1),
        {{c.strategy, c.recipe}}, derive_seed(seed, 4));
    return filter_from_w(ws.front(), config_for(c, q, delta));
}

GraphEstimate finish_plain(const Eigen::MatrixXd& raw, double q, int delta, const Stage& st,
                           std::uint64_t seed) {
    const HyperCombo& c = st.selection.combo;
    return ggm_knockoff_filter(take_rows(raw, st.plan.part2_rows), config_for(c, q, delta),
                               c.recipe, c.strategy, derive_seed(seed, 4));
}

} // namespace

GraphEstimate recycled_filter(const Eigen::MatrixXd& raw, double q, int delta,
                              const HyperGrid& grid, std::uint64_t seed, HyperCombo* selected) {
    const Stage st = run_stages(raw, q, delta, grid, seed);
    if (selected) *selected = st.selection.combo;
    return finish_recycled(raw, q, delta, st, seed);
}

GraphEstimate split_filter_plain(const Eigen::MatrixXd& raw, double q, int delta,
                                 const HyperGrid& grid, std::uint64_t seed) {
    return finish_plain(raw, q, delta, run_stages(raw, q, delta, grid, seed), seed);
}

SplitFilterPair split_filter_pair(const Eigen::MatrixXd& raw, double q, int delta,
                                  const HyperGrid& grid, std::uint64_t seed) {
    const Stage st = run_stages(raw, q, delta, grid, seed);
    return {finish_recycled(raw, q, delta, st, seed), finish_plain(raw, q, delta, st, seed)};
}

GraphEstimate aggregate_splits(const Eigen::MatrixXd& raw, double q, int delta,
                               const HyperGrid& grid, int num_splits, std::uint64_t seed) {
    if (num_splits < 1) throw InvalidSpecError("need at least one split");
    const int p = static_cast<int>(raw.cols());
    std::map<std::pair<int, int>, int> votes;
    for (int s = 0; s < num_splits; ++s) {
        const GraphEstimate est = recycled_filter(raw, q, delta, grid, derive_seed(seed, 10 + s));
        for (const auto& e : est.edges) ++votes[e];
    }
    GraphEstimate out;
    out.p = p;
    out.neighborhoods.resize(p);
    for (const auto& [edge, count] : votes)
        if (2 * count > num_splits) {
            out.edges.push_back(edge);
            out.neighborhoods[edge.first].push_back(edge.second);
            out.neighborhoods[edge.second].push_back(edge.first);
        }
    return out;
}

} // namespace ggmkf
