#include "ggmkf/elastic_net.hpp"

#include <algorithm>
#include <cmath>

#include "ggmkf/errors.hpp"
#include "ggmkf/kernels.hpp"

namespace ggmkf {

namespace {

// Coordinate updates per solve call. Equicorrelated knockoffs make the
// augmented Gram exactly singular along one direction, and sweeps near the
// unregularized end of the path can creep for a long time before the change
// criterion triggers, so the budget is generous.
constexpr long kUpdateCap = 2000000;
constexpr double kAlphaFloor = 1e-3;

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

} // namespace

EnetCovSolver::EnetCovSolver(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty)
    : gram_(gram), xty_(xty), beta_(Eigen::VectorXd::Zero(xty.size())), grad_(xty),
      sub_gram_(xty.size(), xty.size()), sub_rhs_(xty.size()), candidate_(xty.size()),
      candidate_grad_(xty.size()) {
    // Sweep coordinates in decreasing |xty| order rather than index order.
    // Besides converging a bit faster, this makes every arithmetic step
    // invariant under relabeling of the columns (all other operations are
    // elementwise), so statistics computed from a column-swapped problem are
    // exact mirror images rather than merely close ones.
    const int m = static_cast<int>(xty.size());
    order_.resize(m);
    for (int j = 0; j < m; ++j) order_[j] = j;
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
        const double fa = std::abs(xty[a]), fb = std::abs(xty[b]);
        return fa != fb ? fa > fb : a < b;
    });
}

void EnetCovSolver::reset(const Eigen::VectorXd& beta) {
    beta_ = beta;
    grad_ = xty_ - gram_ * beta_;
}

void EnetCovSolver::reset_zero() {
    beta_.setZero();
    grad_ = xty_;
}

double EnetCovSolver::sweep_all(double alpha, double lambda, long& updates) {
    const int m = static_cast<int>(beta_.size());
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    double max_change = 0.0;
    for (int j : order_) {
        const double gjj = gram_(j, j);
        const double z = grad_[j] + gjj * beta_[j];
        const double next = soft_threshold(z, l1) / (gjj + l2);
        const double delta = next - beta_[j];
        if (delta != 0.0) {
            kernels::axpy(-delta, gram_.col(j).data(), grad_.data(), m);
            beta_[j] = next;
            max_change = std::max(max_change, std::abs(delta));
        }
        ++updates;
    }
    return max_change;
}

double EnetCovSolver::sweep_active(double alpha, double lambda, long& updates) {
    const int m = static_cast<int>(beta_.size());
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    double max_change = 0.0;
    for (int j : active_) {
        const double gjj = gram_(j, j);
        const double z = grad_[j] + gjj * beta_[j];
        const double next = soft_threshold(z, l1) / (gjj + l2);
        const double delta = next - beta_[j];
        if (delta != 0.0) {
            kernels::axpy(-delta, gram_.col(j).data(), grad_.data(), m);
            beta_[j] = next;
            max_change = std::max(max_change, std::abs(delta));
        }
        ++updates;
    }
    return max_change;
}

double EnetCovSolver::objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& grad,
                                double l1, double l2) const {
    // ½βᵀGβ − xtyᵀβ + (l2/2)‖β‖² + l1‖β‖₁, using βᵀGβ = βᵀ(xty − grad).
    double f = 0.0;
    for (int j : order_) {
        if (beta[j] == 0.0) continue;
        f += -0.5 * beta[j] * (xty_[j] + grad[j]) + 0.5 * l2 * beta[j] * beta[j] +
             l1 * std::abs(beta[j]);
    }
    return f;
}

bool EnetCovSolver::direct_step(double alpha, double lambda, long& updates) {
    // On the current support with its sign pattern the problem is an
    // unconstrained quadratic; solve it directly and step toward that
    // minimizer, stopping at the first sign boundary (the crossing variable
    // lands exactly on zero). Each step is only accepted when the objective
    // does not increase, so the surrounding sweeps certify optimality as
    // usual. The support Gram can be exactly singular (the knockoff
    // construction saturates eigenvalue constraints), so the system is
    // solved in proximal form: ρ on the diagonal and ρ·β on the right-hand
    // side, which selects the minimizer nearest the current iterate.
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    const int m = static_cast<int>(beta_.size());
    bool moved = false;
    for (int pass = 0; pass < 12; ++pass) {
        support_.clear();
        for (int j : order_)
            if (beta_[j] != 0.0) support_.push_back(j);
        if (support_.empty()) return moved;
        const int k = static_cast<int>(support_.size());
        bool factored = false;
        for (double ridge : {1e-9, 1e-6}) {
            for (int r = 0; r < k; ++r) {
                sub_rhs_[r] = xty_[support_[r]] - l1 * (beta_[support_[r]] > 0 ? 1.0 : -1.0) +
                              ridge * beta_[support_[r]];
                for (int c = 0; c < k; ++c) sub_gram_(r, c) = gram_(support_[r], support_[c]);
                sub_gram_(r, r) += l2 + ridge;
            }
            Eigen::Ref<Eigen::MatrixXd> block = sub_gram_.topLeftCorner(k, k);
            Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(block);
            if (llt.info() != Eigen::Success) continue;
            llt.solveInPlace(sub_rhs_.head(k));
            factored = true;
            break;
        }
        if (!factored) return moved;
        double tau = 1.0;
        int crossing = -1;
        for (int r = 0; r < k; ++r) {
            if (sub_rhs_[r] * (beta_[support_[r]] > 0 ? 1.0 : -1.0) <= 0.0) {
                const double t = beta_[support_[r]] / (beta_[support_[r]] - sub_rhs_[r]);
                if (t < tau) {
                    tau = t;
                    crossing = r;
                }
            }
        }
        candidate_ = beta_;
        for (int r = 0; r < k; ++r)
            candidate_[support_[r]] = beta_[support_[r]] + tau * (sub_rhs_[r] - beta_[support_[r]]);
        if (crossing >= 0) candidate_[support_[crossing]] = 0.0;
        candidate_grad_ = xty_;
        for (int j : order_) {
            if (candidate_[j] == 0.0) continue;
            kernels::axpy(-candidate_[j], gram_.col(j).data(), candidate_grad_.data(), m);
            ++updates;
        }
        if (objective(candidate_, candidate_grad_, l1, l2) > objective(beta_, grad_, l1, l2))
            return moved;
        beta_.swap(candidate_);
        grad_.swap(candidate_grad_);
        moved = true;
        if (crossing < 0) return true;
    }
    return moved;
}

void EnetCovSolver::solve(double alpha, double lambda, double tol) {
    long updates = 0;
    int direct_fails = 0;
    while (true) {
        const double full_change = sweep_all(alpha, lambda, updates);
        if (full_change <= tol) return;
        if (direct_fails < 16) {
            if (direct_step(alpha, lambda, updates)) continue;
            ++direct_fails;
        }
        active_.clear();
        for (int j : order_)
            if (beta_[j] != 0.0) active_.push_back(j);
        while (!active_.empty()) {
            if (sweep_active(alpha, lambda, updates) <= tol) break;
            if (updates > kUpdateCap)
                throw NoConvergenceError("coordinate descent exceeded the update cap");
        }
        if (updates > kUpdateCap)
            throw NoConvergenceError("coordinate descent exceeded the update cap");
    }
}

Eigen::VectorXd enet_solve(const EnetProblem& problem,
                           const std::optional<Eigen::VectorXd>& warm_start, double tol) {
    const Eigen::MatrixXd gram = problem.design.transpose() * problem.design;
    const Eigen::VectorXd xty = problem.design.transpose() * problem.response;
    EnetCovSolver solver(gram, xty);
    if (warm_start) solver.reset(*warm_start);
    solver.solve(problem.alpha, problem.lambda, tol);
    return solver.beta();
}

EnetPath enet_path_cov(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double alpha,
                       int grid_size, double ratio, double tol, bool keep_coefficients) {
    const int m = static_cast<int>(xty.size());
    double lambda_max = xty.cwiseAbs().maxCoeff() / std::max(alpha, kAlphaFloor);
    if (lambda_max <= 0.0) lambda_max = 1.0;  // degenerate orthogonal response

    EnetPath path;
    path.lambdas.resize(grid_size);
    for (int k = 0; k < grid_size; ++k)
        path.lambdas[k] = lambda_max * std::pow(ratio, static_cast<double>(k) / (grid_size - 1));
    if (keep_coefficients) path.coefficients = Eigen::MatrixXd::Zero(grid_size, m);
    path.entry_lambda = Eigen::VectorXd::Zero(m);

    EnetCovSolver solver(gram, xty);
    std::vector<int> entry_index(m, -1);
    std::vector<Eigen::VectorXd> snapshots(grid_size);
    for (int k = 0; k < grid_size; ++k) {
        solver.solve(alpha, path.lambdas[k], tol);
        snapshots[k] = solver.beta();
        if (keep_coefficients) path.coefficients.row(k) = solver.beta().transpose();
        for (int j = 0; j < m; ++j)
            if (entry_index[j] < 0 && solver.beta()[j] != 0.0) entry_index[j] = k;
    }

    // Refine each activation point between its bracketing grid values,
    // sharing warm-start state among variables with the same bracket.
    std::vector<int> order(m);
    for (int j = 0; j < m; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return entry_index[a] < entry_index[b]; });
    int loaded = -1;
    for (int j : order) {
        const int k = entry_index[j];
        if (k < 0) continue;  // never active
        if (k == 0) {
            path.entry_lambda[j] = path.lambdas[0];
            continue;
        }
        if (loaded != k) {
            solver.reset(snapshots[k]);
            loaded = k;
        }
        double lo = path.lambdas[k];      // active here
        double hi = path.lambdas[k - 1];  // inactive here
        for (int step = 0; step < 20; ++step) {
            const double mid = 0.5 * (lo + hi);
            solver.solve(alpha, mid, tol);
            (solver.beta()[j] != 0.0 ? lo : hi) = mid;
        }
        path.entry_lambda[j] = 0.5 * (lo + hi);
    }
    return path;
}

EnetPath enet_path(const Eigen::VectorXd& response, const Eigen::MatrixXd& design, double alpha,
                   int grid_size, double ratio, double tol) {
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd xty = design.transpose() * response;
    return enet_path_cov(gram, xty, alpha, grid_size, ratio, tol, true);
}

double kkt_residual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                    const Eigen::VectorXd& beta, double alpha, double lambda) {
    const Eigen::VectorXd g = xty - gram * beta;
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    double worst = 0.0;
    for (int j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) {
            const double sign = beta[j] > 0 ? 1.0 : -1.0;
            worst = std::max(worst, std::abs(g[j] - l2 * beta[j] - l1 * sign));
        } else {
            worst = std::max(worst, std::abs(g[j]) - l1);
        }
    }
    return worst;
}

double quantile(Eigen::VectorXd values, double gamma) {
    std::sort(values.data(), values.data() + values.size());
    const double pos = gamma * (values.size() - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min<int>(lo + 1, static_cast<int>(values.size()) - 1);
    const double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

} // namespace ggmkf
