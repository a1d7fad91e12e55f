#pragma once

#include <Eigen/Dense>

#include "ggmkf/errors.hpp"

namespace ggmkf {

// n x p sample matrix with its standardization state. After standardize(),
// every column is mean-centered and has unit Euclidean norm.
struct DesignMatrix {
    Eigen::MatrixXd values;
    bool standardized = false;
    Eigen::VectorXd centers;  // per-column means removed
    Eigen::VectorXd scales;   // per-column norms divided out

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
};

// Center each column, then scale to unit Euclidean norm.
// Throws ConstantColumnError if a column has zero variance.
DesignMatrix standardize(const Eigen::MatrixXd& raw);

} // namespace ggmkf
