#pragma once

#include <Eigen/Dense>

#include "ggmkf/design.hpp"
#include "ggmkf/rng.hpp"

namespace ggmkf {

enum class SStrategy { equi, sdp };

// Per-variable decorrelation amounts between originals and knockoffs.
struct SVector {
    Eigen::VectorXd s;
    SStrategy strategy = SStrategy::equi;
};

// Original/knockoff design pair. Both blocks share the Gram matrix of the
// original, and cross inner products drop by s on the diagonal:
//   Kᵀ K = Xᵀ X,   Xᵀ K = Xᵀ X − diag(s).
struct KnockoffSet {
    Eigen::MatrixXd original;
    Eigen::MatrixXd knockoff;
    SVector s;
};

// Closed form: every entry min(2·λ_min(gram), 1). Gram must be symmetric PD
// with unit diagonal; throws NotPositiveDefinite if λ_min ≤ 1e-12.
SVector compute_s_equi(const Eigen::MatrixXd& gram);

// Maximize Σ s_i subject to diag(s) ⪯ 2·gram and 0 ≤ s ≤ 1, by eigenvalue
// projection steps with a feasibility-restoring scale search. The result is
// always feasible within tol and never worse than the equicorrelated point.
SVector compute_s_sdp(const Eigen::MatrixXd& gram, double tol = 1e-8);

SVector compute_s(const Eigen::MatrixXd& gram, SStrategy strategy, double tol = 1e-8);

// As compute_s, but for a PD gram with arbitrary positive diagonal d_i:
// the gram is normalized to unit diagonal first and the result rescaled,
// so s_i ∈ [0, d_i] and diag(s) ⪯ 2·gram. Used for sub-sample grams whose
// columns are not unit-norm.
SVector compute_s_scaled(const Eigen::MatrixXd& gram, SStrategy strategy, double tol = 1e-8);

// Fixed-X construction: K = X(I − Σ⁻¹ diag(s)) + U C with U an orthonormal
// basis of the complement of col(X) (randomized by rng) and
// CᵀC = 2 diag(s) − diag(s) Σ⁻¹ diag(s), factored with PSD clipping.
// Requires rows ≥ 2 × cols. Works for any PD Gram (columns need not be
// unit-norm) as long as s is feasible for it.
KnockoffSet construct_knockoffs(const DesignMatrix& design, const SVector& s, Rng& rng);
KnockoffSet construct_knockoffs(const Eigen::MatrixXd& x, const SVector& s, Rng& rng);

// Knockoffs for a stacked matrix [part1; part2]: part1 rows are reused
// verbatim and only part2 gets fresh knockoffs (built from part2 alone).
// s must be feasible for part2's Gram in part2's own scale
// (compute_s_scaled on that Gram). The stacked pair satisfies the Gram
// identities for the stacked Gram.
KnockoffSet construct_recycled_knockoffs(const Eigen::MatrixXd& part1,
                                         const Eigen::MatrixXd& part2,
                                         const SVector& s, Rng& rng);

// Max-abs deviation of the two defining Gram identities; used by tests.
double knockoff_gram_error(const KnockoffSet& k);

} // namespace ggmkf
