#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace faultforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV cell that failed to parse; row/column are 1-based file coordinates.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t row, std::size_t col)
        : Error(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row),
          col(col) {}
    std::size_t row;
    std::size_t col;
};

struct SchemaError : Error {
    using Error::Error;
};

struct UnimputableFeatureError : Error {
    using Error::Error;
};

struct StratificationError : Error {
    using Error::Error;
};

struct EmptySelectionError : Error {
    using Error::Error;
};

struct GridInfeasibleError : Error {
    using Error::Error;
};

// Iterative solver ran out of budget; carries where it stopped.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, long iterations, double residual)
        : Error(msg + " (iterations=" + std::to_string(iterations) +
                ", residual=" + std::to_string(residual) + ")"),
          iterations(iterations),
          residual(residual) {}
    long iterations;
    double residual;
};

}  // namespace faultforge
