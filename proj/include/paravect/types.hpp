#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace paravect {

using Index = Eigen::Index;

/// Dense real matrix, row-major so that serialized payloads map 1:1 onto
/// storage. Rows are the codomain, columns the domain.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Shapes do not conform (message names both shapes).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A materialized product would exceed the configured element budget.
struct BudgetError : std::length_error {
    using std::length_error::length_error;
};

/// Malformed input file or configuration (message names the offending field).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Process-wide cap on the element count of any matrix this library
/// materializes. Deep tensor compositions grow multiplicatively; the budget
/// turns an accidental blowup into a diagnosable error. Default 2^26.
std::size_t elementBudget();
void setElementBudget(std::size_t elements);

/// Throws BudgetError if rows*cols exceeds the budget. `what` names the
/// operation for the error message.
void requireWithinBudget(Index rows, Index cols, const char* what);

inline std::string shapeString(Index rows, Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

/// Outcome of a single verified law: the measured residual against the
/// tolerance it was judged at. Checks report, they do not throw.
struct ResidualReport {
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

} // namespace paravect
