#pragma once

#include <vector>

#include "eigenseg/operator.hpp"

namespace eigenseg {

/// Full spectrum of a dense symmetric matrix. vectors is n x n row-major;
/// vectors[i*n + j] is component i of the (unit) eigenvector for values[j].
struct DenseEigenResult {
    int n = 0;
    std::vector<double> values;   // ascending
    std::vector<double> vectors;
};

/// Reference eigensolver: densifies the operator and runs a Householder
/// reduction followed by QL iteration. This is the independent check for
/// the sparse iterative path and shares no code with it. Refuses n > 8192.
DenseEigenResult dense_eigs_oracle(const SparseOperator& op);

/// Same decomposition for an arbitrary symmetric dense matrix (row-major).
DenseEigenResult dense_symmetric_eigen(int n, std::vector<double> matrix);

}  // namespace eigenseg
