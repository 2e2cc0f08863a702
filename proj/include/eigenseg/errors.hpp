#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eigenseg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violated precondition or dimension mismatch in a library call.
struct ContractError : Error {
    using Error::Error;
};

/// Malformed input file. Carries the byte offset where parsing failed.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset = 0;
};

/// Iterative solver failed to converge within its budget.
/// `residuals` holds the best per-pair (or per-solve) residuals reached.
struct SolverError : Error {
    explicit SolverError(const std::string& msg, std::vector<double> best = {})
        : Error(msg), residuals(std::move(best)) {}
    std::vector<double> residuals;
};

/// Thresholding failed because the input has no usable class structure.
struct DegenerateThresholdError : Error {
    using Error::Error;
};

}  // namespace eigenseg
