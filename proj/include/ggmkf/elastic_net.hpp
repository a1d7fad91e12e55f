#pragma once

#include <Eigen/Dense>
#include <optional>

namespace ggmkf {

// min_b (1/2)‖y − Xb‖² + λ[(1−α)‖b‖²/2 + α‖b‖₁]
struct EnetProblem {
    Eigen::VectorXd response;
    Eigen::MatrixXd design;
    double alpha = 1.0;   // in [0,1]
    double lambda = 0.0;  // ≥ 0
};

struct EnetPath {
    Eigen::VectorXd lambdas;       // strictly decreasing
    Eigen::MatrixXd coefficients;  // grid_size × m
    Eigen::VectorXd entry_lambda;  // per-variable activation point, 0 if never active
};

// Coordinate-descent state in covariance form: the solver only ever touches
// the Gram matrix and the feature–response inner products. grad is kept equal
// to xty − gram·beta throughout.
class EnetCovSolver {
public:
    EnetCovSolver(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty);

    // Solve at (alpha, lambda) warm-starting from the current state.
    // Throws NoConvergence if the per-call coordinate-update cap is exceeded.
    void solve(double alpha, double lambda, double tol = 1e-7);

    const Eigen::VectorXd& beta() const { return beta_; }
    void reset(const Eigen::VectorXd& beta);  // re-derives grad from scratch
    void reset_zero();

private:
    const Eigen::MatrixXd& gram_;
    const Eigen::VectorXd& xty_;
    Eigen::VectorXd beta_;
    Eigen::VectorXd grad_;  // xty − gram·beta
    std::vector<int> order_;  // canonical sweep order, see .cpp
    std::vector<int> active_;
    std::vector<int> support_;     // scratch for the direct step
    Eigen::MatrixXd sub_gram_;     // scratch, m × m
    Eigen::VectorXd sub_rhs_, candidate_, candidate_grad_;

    // Returns max |coefficient change| of one full sweep.
    double sweep_all(double alpha, double lambda, long& updates);
    double sweep_active(double alpha, double lambda, long& updates);
    // Equality-constrained solve on the current support and sign pattern;
    // returns false (leaving the state untouched) when it cannot certify an
    // objective decrease.
    bool direct_step(double alpha, double lambda, long& updates);
    double objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& grad, double l1,
                     double l2) const;
};

// One-shot solve of an explicit problem (builds the covariance summaries).
Eigen::VectorXd enet_solve(const EnetProblem& problem,
                           const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                           double tol = 1e-7);

// λ grid: log-uniform, grid_size points, from λ_max = max_j|x_jᵀy|/max(α,1e-3)
// down to ratio·λ_max. entry_lambda is located on the grid and then refined by
// up to 20 bisection steps between the bracketing grid points.
EnetPath enet_path(const Eigen::VectorXd& response, const Eigen::MatrixXd& design, double alpha,
                   int grid_size = 100, double ratio = 1e-4, double tol = 1e-7);
EnetPath enet_path_cov(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double alpha,
                       int grid_size = 100, double ratio = 1e-4, double tol = 1e-7,
                       bool keep_coefficients = true);

// Max KKT violation; the optimality certificate used by tests.
double kkt_residual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                    const Eigen::VectorXd& beta, double alpha, double lambda);

// Empirical quantile (linear interpolation) of a set of values; used to pick
// λ from a path grid.
double quantile(Eigen::VectorXd values, double gamma);

} // namespace ggmkf
