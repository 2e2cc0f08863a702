#include "eigenseg/pcg.hpp"

#include <algorithm>
#include <cmath>

#include "eigenseg/errors.hpp"
#include "eigenseg/kernels.hpp"

namespace eigenseg {

namespace {

// Zero-fill incomplete Cholesky on the lower-triangle pattern of A. For the
// M-matrices produced by assemble() this exists; a growing diagonal shift
// is retried if rounding ever drives a pivot non-positive.
class IncompleteCholesky {
public:
    explicit IncompleteCholesky(const SparseOperator& op) {
        const double scale = average_diagonal(op);
        for (double shift : {0.0, 1e-10, 1e-6, 1e-3, 1e-1}) {
            if (try_factor(op, shift * scale)) return;
        }
        throw SolverError("incomplete Cholesky broke down");
    }

    // z = (L L^T)^{-1} r
    void apply(std::span<const double> r, std::span<double> z) const {
        const int n = static_cast<int>(row_ptr_.size()) - 1;
        std::copy(r.begin(), r.end(), z.begin());
        for (int i = 0; i < n; ++i) {
            double sum = z[i];
            for (std::int64_t idx = row_ptr_[i]; idx < diag_idx_[i]; ++idx) {
                sum -= val_[idx] * z[col_[idx]];
            }
            z[i] = sum / val_[diag_idx_[i]];
        }
        for (int i = n - 1; i >= 0; --i) {
            const double zi = z[i] / val_[diag_idx_[i]];
            z[i] = zi;
            for (std::int64_t idx = row_ptr_[i]; idx < diag_idx_[i]; ++idx) {
                // scatter the transposed column
                z[col_[idx]] -= val_[idx] * zi;
            }
        }
    }

private:
    std::vector<std::int64_t> row_ptr_;
    std::vector<int> col_;
    std::vector<double> val_;
    std::vector<std::int64_t> diag_idx_;

    static double average_diagonal(const SparseOperator& op) {
        double sum = 0.0;
        for (std::int64_t i = 0; i < op.n; ++i) {
            for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
                if (op.col[idx] == i) sum += op.val[idx];
            }
        }
        return op.n > 0 ? sum / op.n : 1.0;
    }

    bool try_factor(const SparseOperator& op, double shift) {
        const int n = op.n;
        row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
        col_.clear();
        val_.clear();
        diag_idx_.assign(static_cast<std::size_t>(n), 0);
        for (std::int64_t i = 0; i < n; ++i) {
            for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
                if (op.col[idx] <= i) {
                    col_.push_back(op.col[idx]);
                    val_.push_back(op.val[idx] + (op.col[idx] == i ? shift : 0.0));
                }
            }
            row_ptr_[i + 1] = static_cast<std::int64_t>(col_.size());
            diag_idx_[i] = static_cast<std::int64_t>(col_.size()) - 1;
        }
        // Row-oriented IC(0): for each row i, update entries (i,k) from all
        // previously factored rows that share pattern, then the pivot.
        for (int i = 0; i < n; ++i) {
            for (std::int64_t ki = row_ptr_[i]; ki < row_ptr_[i + 1]; ++ki) {
                const int k = col_[ki];
                double sum = val_[ki];
                // dot of rows i and k over columns < k
                std::int64_t pi = row_ptr_[i];
                std::int64_t pk = row_ptr_[k];
                while (pi < diag_idx_[i] && pk < diag_idx_[k] && col_[pi] < k && col_[pk] < k) {
                    if (col_[pi] == col_[pk]) {
                        sum -= val_[pi] * val_[pk];
                        ++pi;
                        ++pk;
                    } else if (col_[pi] < col_[pk]) {
                        ++pi;
                    } else {
                        ++pk;
                    }
                }
                if (k == i) {
                    if (!(sum > 0.0)) return false;
                    val_[ki] = std::sqrt(sum);
                } else {
                    val_[ki] = sum / val_[diag_idx_[k]];
                }
            }
        }
        return true;
    }
};

}  // namespace

PcgResult pcg_solve(const SparseOperator& op, std::span<const double> b, double rtol,
                    int max_iterations) {
    if (static_cast<std::int64_t>(b.size()) != op.n) {
        throw ContractError("pcg_solve: rhs length does not match operator");
    }
    const int n = op.n;
    PcgResult result;
    result.x.assign(static_cast<std::size_t>(n), 0.0);

    const double bnorm = kernels::nrm2(b);
    if (bnorm == 0.0) {
        return result;  // x = 0 solves exactly
    }
    if (max_iterations <= 0) {
        max_iterations = std::max(1000, 20 * n);
    }

    IncompleteCholesky precond(op);
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(static_cast<std::size_t>(n));
    std::vector<double> p(static_cast<std::size_t>(n));
    std::vector<double> ap(static_cast<std::size_t>(n));

    precond.apply(r, z);
    p = z;
    double rz = kernels::dot(r, z);

    for (int it = 1; it <= max_iterations; ++it) {
        kernels::csr_matvec(n, op.row_ptr.data(), op.col.data(), op.val.data(), p.data(),
                            ap.data());
        const double pap = kernels::dot(p, ap);
        if (!(pap > 0.0)) {
            throw SolverError("pcg_solve: operator lost positive definiteness");
        }
        const double alpha = rz / pap;
        kernels::axpy(alpha, p, result.x);
        kernels::axpy(-alpha, ap, r);
        const double rnorm = kernels::nrm2(r);
        if (rnorm / bnorm <= rtol) {
            // confirm with the true residual; recurrence drift can flatter us
            kernels::csr_matvec(n, op.row_ptr.data(), op.col.data(), op.val.data(),
                                result.x.data(), ap.data());
            double true_norm_sq = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = b[i] - ap[i];
                true_norm_sq += d * d;
            }
            const double true_rel = std::sqrt(true_norm_sq) / bnorm;
            if (true_rel <= rtol * 4.0) {
                result.iterations = it;
                result.relative_residual = true_rel;
                return result;
            }
            std::copy(b.begin(), b.end(), r.begin());
            kernels::axpy(-1.0, ap, r);
        }
        precond.apply(r, z);
        const double rz_new = kernels::dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    throw SolverError("pcg_solve: no convergence within " + std::to_string(max_iterations) +
                          " iterations",
                      {kernels::nrm2(r) / bnorm});
}

}  // namespace eigenseg
