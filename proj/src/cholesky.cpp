#include "eigenseg/cholesky.hpp"

#include <algorithm>
#include <cmath>

#include "eigenseg/errors.hpp"

namespace eigenseg {

namespace {
constexpr std::size_t kMaxBandBytes = std::size_t{3} << 30;  // 3 GiB
}

BandedCholesky::BandedCholesky(const SparseOperator& op) : n_(op.n) {
    if (n_ <= 0) {
        throw ContractError("cannot factorize an empty operator");
    }
    for (std::int64_t i = 0; i < op.n; ++i) {
        for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
            bw_ = std::max(bw_, static_cast<int>(i) - op.col[idx]);
        }
    }
    const std::size_t bytes = static_cast<std::size_t>(bw_ + 1) * n_ * sizeof(double);
    if (bytes > kMaxBandBytes) {
        throw SolverError("band factorization would need " + std::to_string(bytes >> 20) +
                          " MiB; problem too large for the direct solver");
    }
    band_.assign(static_cast<std::size_t>(bw_ + 1) * n_, 0.0);

    // Scatter the lower triangle of A into band storage.
    for (std::int64_t i = 0; i < op.n; ++i) {
        for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
            const int j = op.col[idx];
            if (j <= i) {
                entry(static_cast<int>(i) - j, j) = op.val[idx];
            }
        }
    }

    // Right-looking factorization. After sqrt-and-scale of column j, the
    // rank-1 update touches columns j+1..j+bw only; the k-loop iterations
    // write disjoint columns, so they can run in parallel with bitwise
    // reproducible results.
    for (int j = 0; j < n_; ++j) {
        const double d = entry(0, j);
        if (!(d > 0.0)) {
            throw SolverError("operator is not positive definite (pivot " +
                              std::to_string(j) + ")");
        }
        const double root = std::sqrt(d);
        entry(0, j) = root;
        const int reach = std::min(bw_, n_ - 1 - j);
        const double inv = 1.0 / root;
        for (int i = 1; i <= reach; ++i) {
            entry(i, j) *= inv;
        }
#pragma omp parallel for schedule(static) if (reach > 32)
        for (int k = 1; k <= reach; ++k) {
            const double ljk = entry(k, j);
            if (ljk == 0.0) continue;
            const int colk = j + k;
            for (int i = k; i <= reach; ++i) {
                entry(i - k, colk) -= entry(i, j) * ljk;
            }
        }
    }
}

void BandedCholesky::solve(std::span<const double> b, std::span<double> x) const {
    if (static_cast<int>(b.size()) != n_ || static_cast<int>(x.size()) != n_) {
        throw ContractError("solve: vector length does not match factorization");
    }
    std::copy(b.begin(), b.end(), x.begin());
    // L y = b
    for (int j = 0; j < n_; ++j) {
        const double xj = x[j] / entry(0, j);
        x[j] = xj;
        const int reach = std::min(bw_, n_ - 1 - j);
        for (int i = 1; i <= reach; ++i) {
            x[j + i] -= entry(i, j) * xj;
        }
    }
    // L^T x = y
    for (int j = n_ - 1; j >= 0; --j) {
        double sum = x[j];
        const int reach = std::min(bw_, n_ - 1 - j);
        for (int i = 1; i <= reach; ++i) {
            sum -= entry(i, j) * x[j + i];
        }
        x[j] = sum / entry(0, j);
    }
}

}  // namespace eigenseg
