#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace ugw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute tolerance for metric comparisons (symmetry, strong triangle,
/// spectrum deduplication, quotient levels).
inline constexpr double kMetricTol = 1e-9;
/// Absolute tolerance for probability mass comparisons.
inline constexpr double kMassTol = 1e-12;
/// Resolution at which heights and masses enter canonical signatures.
inline constexpr double kQuantum = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double p) { return p == kInf; }

/// Base class of all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input does not satisfy the structural requirements of an operation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed textual input (Newick, JSON, CSV).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(line ? what + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)
                     : what),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// The operation declines to run: infeasible marginals, exponential size
/// caps, or a parameter range where no exact formula exists.
class RefusalError : public Error {
public:
    using Error::Error;
};

}  // namespace ugw
