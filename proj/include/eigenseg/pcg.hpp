#pragma once

#include <span>
#include <vector>

#include "eigenseg/operator.hpp"

namespace eigenseg {

struct PcgResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients with a zero-fill incomplete Cholesky
/// preconditioner. Stops at ||b - A x|| / ||b|| <= rtol (true residual,
/// re-checked on exit); throws SolverError if the iteration budget runs out.
/// max_iterations <= 0 picks a budget from the problem size.
PcgResult pcg_solve(const SparseOperator& op, std::span<const double> b,
                    double rtol = 1e-10, int max_iterations = 0);

}  // namespace eigenseg
