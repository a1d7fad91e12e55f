#pragma once

namespace ggmkf {

struct CaBound {
    double a = 0.0;
    int k0 = 0;
    double value = 0.0;
};

// Unique positive root φ of e^φ + e^{−tφ} = 2 (the scaled form of the
// boundary-crossing root equation); returns 0 in the degenerate t = 1 limit.
// Bracketed bisection to 1e-12.
double theta_root(double t);

// Upper bound c_a on E[sup_k S_k / (a + k − S_k)] for a Rademacher walk S,
// obtained by exact enumeration of the 2^k0 initial sign paths plus a
// per-path integral tail. Memoized by (a, k0). Requires a > 0, 1 ≤ k0 ≤ 20.
CaBound compute_ca(double a, int k0);

} // namespace ggmkf
