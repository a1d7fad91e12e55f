#include "ggmkf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ggmkf/errors.hpp"

namespace ggmkf {

namespace {

constexpr double kZeroTol = 1e-12;  // statistics this small count as exact ties
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> selected_above(const Eigen::MatrixXd& w, int col, double t) {
    std::vector<int> out;
    if (std::isinf(t)) return out;
    for (int j = 0; j < w.rows(); ++j)
        if (j != col && w(j, col) >= t) out.push_back(j);
    return out;
}

int count_below(const Eigen::MatrixXd& w, int col, double t) {
    if (std::isinf(t)) return 0;
    int c = 0;
    for (int j = 0; j < w.rows(); ++j)
        if (j != col && w(j, col) <= -t) ++c;
    return c;
}

std::vector<std::vector<int>> neighborhoods_for(const Eigen::MatrixXd& w,
                                                const Eigen::VectorXd& t) {
    std::vector<std::vector<int>> out(w.cols());
    for (int i = 0; i < w.cols(); ++i) out[i] = selected_above(w, i, t[i]);
    return out;
}

std::vector<std::pair<int, int>> edges_for(const std::vector<std::vector<int>>& nbh, Rule rule) {
    const int p = static_cast<int>(nbh.size());
    std::vector<std::vector<char>> in(p, std::vector<char>(p, 0));
    for (int i = 0; i < p; ++i)
        for (int j : nbh[i]) in[i][j] = 1;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const bool both = in[i][j] && in[j][i];
            const bool any = in[i][j] || in[j][i];
            if (rule == Rule::AND ? both : any) edges.emplace_back(i, j);
        }
    return edges;
}

} // namespace

bool GraphEstimate::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::find(edges.begin(), edges.end(), std::make_pair(i, j)) != edges.end();
}

double linear_threshold(const Eigen::VectorXd& w, double q, int delta) {
    std::vector<double> candidates;
    for (int i = 0; i < w.size(); ++i)
        if (std::abs(w[i]) > kZeroTol) candidates.push_back(std::abs(w[i]));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (double t : candidates) {
        int above = 0, below = 0;
        for (int i = 0; i < w.size(); ++i) {
            if (w[i] >= t) ++above;
            if (w[i] <= -t) ++below;
        }
        if (delta + below <= q * std::max(above, 1) + 1e-12) return t;
    }
    return kInf;
}

std::vector<int> linear_selection(const Eigen::VectorXd& w, double q, int delta) {
    const double t = linear_threshold(w, q, delta);
    std::vector<int> out;
    if (std::isinf(t)) return out;
    for (int i = 0; i < w.size(); ++i)
        if (w[i] >= t) out.push_back(i);
    return out;
}

ThresholdVector solve_thresholds(const FeatureStatMatrix& wm, const FilterConfig& config) {
    const Eigen::MatrixXd& w = wm.w;
    const int p = static_cast<int>(w.cols());
    ThresholdVector out;
    out.config = config;
    out.t = Eigen::VectorXd::Constant(p, kInf);

    const double scale = config.rule == Rule::AND ? 1.0 : 2.0;
    const int m_max = static_cast<int>(
        std::floor(config.q * (p - 1) / (scale * config.c_a) - config.a * config.delta + 1e-9));
    if (m_max < 0) return out;

    // Per column: ascending candidate magnitudes and, per candidate, the
    // count of entries ≤ −candidate. Both are monotone, so the minimal
    // threshold for a given negative budget is a single scan.
    std::vector<std::vector<double>> cand(p);
    std::vector<std::vector<int>> negcount(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j)
            if (j != i && std::abs(w(j, i)) > kZeroTol) cand[i].push_back(std::abs(w(j, i)));
        std::sort(cand[i].begin(), cand[i].end());
        cand[i].erase(std::unique(cand[i].begin(), cand[i].end()), cand[i].end());
        negcount[i].resize(cand[i].size());
        for (std::size_t k = 0; k < cand[i].size(); ++k)
            negcount[i][k] = count_below(w, i, cand[i][k]);
    }

    const double rhs = scale == 1.0 ? 2.0 * config.q / (config.c_a * p)
                                    : config.q / (config.c_a * p);
    for (int m = m_max; m >= 0; --m) {
        Eigen::VectorXd t = Eigen::VectorXd::Constant(p, kInf);
        for (int i = 0; i < p; ++i)
            for (std::size_t k = 0; k < cand[i].size(); ++k)
                if (negcount[i][k] <= m) {
                    t[i] = cand[i][k];
                    break;
                }
        const auto nbh = neighborhoods_for(w, t);
        const int ecount = static_cast<int>(edges_for(nbh, config.rule).size());
        const int denom = std::max(ecount, 1);
        bool feasible = true;
        for (int i = 0; i < p && feasible; ++i) {
            const double numer = config.delta * config.a + count_below(w, i, t[i]);
            if (numer > rhs * denom + 1e-12) feasible = false;
        }
        if (feasible) {
            out.t = t;
            return out;
        }
    }
    return out;
}

GraphEstimate assemble_graph(const FeatureStatMatrix& wm, const ThresholdVector& tv) {
    GraphEstimate out;
    out.p = static_cast<int>(wm.w.cols());
    out.neighborhoods = neighborhoods_for(wm.w, tv.t);
    out.edges = edges_for(out.neighborhoods, tv.config.rule);
    return out;
}

GraphEstimate filter_from_w(const FeatureStatMatrix& w, const FilterConfig& config) {
    return assemble_graph(w, solve_thresholds(w, config));
}

GraphEstimate ggm_knockoff_filter(const Eigen::MatrixXd& raw, const FilterConfig& config,
                                  const StatRecipe& recipe, SStrategy strategy,
                                  std::uint64_t seed) {
    if (raw.rows() < 2 * raw.cols())
        throw InsufficientSamplesError("need at least 2p samples for the knockoff filter");
    const DesignMatrix data = standardize(raw);
    const FeatureStatMatrix w = build_w_matrix(data, recipe, strategy, seed);
    return filter_from_w(w, config);
}

std::vector<int> linear_knockoff_filter(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                                        double q, int delta, SStrategy strategy,
                                        const StatRecipe& recipe, std::uint64_t seed) {
    if (x_raw.rows() < 2 * x_raw.cols())
        throw InsufficientSamplesError("need at least 2p samples for the knockoff filter");
    const DesignMatrix x = standardize(x_raw);
    const Eigen::MatrixXd gram = x.values.transpose() * x.values;
    Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(strategy)));
    const KnockoffSet kn = construct_knockoffs(x, compute_s(gram, strategy), rng);
    const Eigen::VectorXd yc = y.array() - y.mean();
    const int m = x.cols();
    Eigen::MatrixXd aug(x.rows(), 2 * m);
    aug.leftCols(m) = kn.original;
    aug.rightCols(m) = kn.knockoff;
    const Eigen::VectorXd w =
        node_statistics_cov(aug.transpose() * aug, aug.transpose() * yc, recipe);
    return linear_selection(w, q, delta);
}

} // namespace ggmkf
