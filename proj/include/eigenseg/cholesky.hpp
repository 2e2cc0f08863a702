#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eigenseg/operator.hpp"

namespace eigenseg {

/// Direct Cholesky factorization A = L L^T exploiting the band structure of
/// the grid operator (bandwidth <= grid width under row-major interior
/// numbering). Used as the exact inverse inside the shift-invert
/// eigensolver. Storage is (bandwidth+1) x n; construction refuses
/// factorizations that would exceed a memory cap.
class BandedCholesky {
public:
    explicit BandedCholesky(const SparseOperator& op);

    int size() const { return n_; }
    int bandwidth() const { return bw_; }

    /// x = A^{-1} b via forward and back substitution.
    void solve(std::span<const double> b, std::span<double> x) const;

private:
    int n_ = 0;
    int bw_ = 0;
    // Column-major band panels: band_[j*(bw+1) + d] = L(j+d, j). Keeps the
    // trailing update and the substitution sweeps on contiguous memory.
    std::vector<double> band_;

    double& entry(int d, int j) {
        return band_[static_cast<std::size_t>(j) * (bw_ + 1) + d];
    }
    double entry(int d, int j) const {
        return band_[static_cast<std::size_t>(j) * (bw_ + 1) + d];
    }
};

}  // namespace eigenseg
