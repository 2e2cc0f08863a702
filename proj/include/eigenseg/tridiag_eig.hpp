#pragma once

#include <vector>

namespace eigenseg {

/// Implicit-shift QL for a symmetric tridiagonal matrix. diag holds the
/// diagonal (length m), sub the subdiagonal (length m-1). On return diag
/// holds the eigenvalues in ascending order. If accumulate is non-null it
/// must hold an m x m row-major matrix (typically identity) whose columns
/// are rotated into the eigenvectors: (*accumulate)[i*m + j] ends up as
/// component i of the eigenvector for diag[j].
void tridiag_eigen(std::vector<double>& diag, std::vector<double>& sub,
                   std::vector<double>* accumulate);

}  // namespace eigenseg
