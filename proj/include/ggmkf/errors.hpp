#pragma once

#include <stdexcept>
#include <string>

namespace ggmkf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstantColumnError : Error {
    int column;
    explicit ConstantColumnError(int col)
        : Error("column " + std::to_string(col) + " is constant (zero variance)"), column(col) {}
};

struct NotPositiveDefiniteError : Error {
    using Error::Error;
};

struct SolverDivergedError : Error {
    using Error::Error;
};

struct FactorizationFailedError : Error {
    using Error::Error;
};

struct NoConvergenceError : Error {
    using Error::Error;
};

struct InsufficientSamplesError : Error {
    using Error::Error;
};

struct BracketFailureError : Error {
    using Error::Error;
};

struct QuadratureFailureError : Error {
    using Error::Error;
};

struct SingularCovarianceError : Error {
    using Error::Error;
};

struct InvalidSpecError : Error {
    using Error::Error;
};

struct CsvParseError : Error {
    int row;     // 1-based; 0 if not tied to a cell
    int column;
    CsvParseError(int r, int c, const std::string& what)
        : Error("row " + std::to_string(r) + ", column " + std::to_string(c) + ": " + what),
          row(r), column(c) {}
};

} // namespace ggmkf
