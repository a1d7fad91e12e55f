#include "ggmkf/calibration.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "ggmkf/errors.hpp"

namespace ggmkf {

namespace {

// Adaptive Simpson with an evaluation budget.
class Quadrature {
public:
    Quadrature(std::function<double(double)> f, double tol) : f_(std::move(f)), tol_(tol) {}

    double integrate(double a, double b) {
        const double fa = f_(a), fb = f_(b), fm = f_(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return refine(a, b, fa, fm, fb, whole, tol_, 60);
    }

private:
    double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                  int depth) {
        const double m = 0.5 * (a + b);
        const double lm = f_(0.5 * (a + m)), rm = f_(0.5 * (m + b));
        evals_ += 2;
        if (evals_ > 2000000)
            throw QuadratureFailureError("integral refinement budget exhausted");
        const double left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
        const double err = left + right - whole;
        if (depth <= 0 || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
        return refine(a, m, fa, lm, fm, left, 0.5 * tol, depth - 1) +
               refine(m, b, fm, rm, fb, right, 0.5 * tol, depth - 1);
    }

    std::function<double(double)> f_;
    double tol_;
    long evals_ = 0;
};

// ((2−u)ln(2−u) + u ln u) / ln²(2−u), with its analytic limits at both ends.
double bracket_factor(double u) {
    if (u <= 0.0) return 2.0 / std::log(2.0);
    if (u >= 1.0 - 1e-9) return 1.0;
    const double l = std::log(2.0 - u);
    return ((2.0 - u) * l + u * std::log(u)) / (l * l);
}

// ∫₀^{u*} u^{a+k0−P−1} (2−u)^{P−1} · bracket(u) du with u* = e^{−t·θ_t}.
// When the power of u is in (−1, 0) the singularity at 0 is removed by the
// substitution w = u^{γ+1}.
double path_integral(int P, int k0, double a, double t) {
    const double theta = theta_root(t);
    const double ustar = t <= 1.0 + 1e-12 ? 1.0 : std::exp(-t * theta);
    if (ustar <= 0.0) return 0.0;
    const double gamma = a + k0 - P - 1.0;
    const auto smooth = [P](double u) { return std::pow(2.0 - u, P - 1.0) * bracket_factor(u); };
    if (gamma > -1.0 && gamma < 0.0) {
        const double e = gamma + 1.0;
        Quadrature q([&](double w) { return smooth(std::pow(w, 1.0 / e)) / e; }, 1e-8);
        return q.integrate(0.0, std::pow(ustar, e));
    }
    Quadrature q([&](double u) { return std::pow(u, gamma) * smooth(u); }, 1e-8);
    return q.integrate(0.0, ustar);
}

} // namespace

double theta_root(double t) {
    if (t <= 0.0) throw BracketFailureError("root equation requires t > 0");
    if (t <= 1.0 + 1e-12) return 0.0;  // degenerate limit: the root collapses to 0
    const auto f = [t](double phi) { return std::expm1(phi) + std::expm1(-t * phi); };
    double lo = 0.0, hi = std::log(2.0);
    // f(hi) = 2^{−t} in exact arithmetic; it may underflow to 0, which is
    // still a valid upper bracket for the bisection below.
    if (f(hi) < 0.0) throw BracketFailureError("no sign change for the root equation bracket");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CaBound compute_ca(double a, int k0) {
    if (!(a > 0.0)) throw InvalidSpecError("a must be positive");
    if (k0 < 1 || k0 > 20) throw InvalidSpecError("k0 must be in [1, 20]");

    static std::map<std::pair<double, int>, double> memo;
    static std::mutex memo_mutex;
    {
        std::lock_guard<std::mutex> lock(memo_mutex);
        auto it = memo.find({a, k0});
        if (it != memo.end()) return CaBound{a, k0, it->second};
    }

    // Exact average over all 2^k0 sign paths of the walk's first k0 steps:
    // the supremum ratio observed on the path, plus an integral accounting
    // for the tail beyond step k0. Integrals repeat across paths sharing
    // (final positive count, sup ratio), so cache them.
    std::map<std::pair<int, long long>, double> integral_cache;
    double total = 0.0;
    const long paths = 1L << k0;
    for (long mask = 0; mask < paths; ++mask) {
        int s = 0;
        double r = 0.0;
        for (int k = 1; k <= k0; ++k) {
            s += (mask >> (k - 1)) & 1;
            r = std::max(r, s / (a + k - s));
        }
        const double t = std::max(r, 1.0);
        const auto key = std::make_pair(s, static_cast<long long>(std::llround(t * 1e12)));
        auto it = integral_cache.find(key);
        if (it == integral_cache.end())
            it = integral_cache.emplace(key, path_integral(s, k0, a, t)).first;
        total += t + it->second;
    }
    const double value = total / static_cast<double>(paths);

    std::lock_guard<std::mutex> lock(memo_mutex);
    memo[{a, k0}] = value;
    return CaBound{a, k0, value};
}

} // namespace ggmkf
