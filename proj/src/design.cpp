#include "ggmkf/design.hpp"

namespace ggmkf {

DesignMatrix standardize(const Eigen::MatrixXd& raw) {
    const int n = static_cast<int>(raw.rows());
    const int p = static_cast<int>(raw.cols());
    DesignMatrix out;
    out.values.resize(n, p);
    out.centers.resize(p);
    out.scales.resize(p);
    for (int j = 0; j < p; ++j) {
        const double mean = raw.col(j).mean();
        Eigen::VectorXd c = raw.col(j).array() - mean;
        const double norm = c.norm();
        if (norm <= 1e-12 * std::max(1.0, raw.col(j).norm())) throw ConstantColumnError(j);
        out.values.col(j) = c / norm;
        out.centers[j] = mean;
        out.scales[j] = norm;
    }
    out.standardized = true;
    return out;
}

} // namespace ggmkf
