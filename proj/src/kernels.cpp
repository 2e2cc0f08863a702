#include "eigenseg/kernels.hpp"

#include <atomic>
#include <cmath>

#include <omp.h>

#include "eigenseg/errors.hpp"

namespace eigenseg::kernels {

namespace {

std::atomic<int> g_threads{0};

int effective_threads() {
    const int n = g_threads.load(std::memory_order_relaxed);
    return n > 0 ? n : omp_get_max_threads();
}

// Reduction block size. Fixed so the summation tree does not depend on the
// thread count.
constexpr std::int64_t kBlock = 4096;

}  // namespace

void set_thread_count(int n) {
    if (n < 0) {
        throw ContractError("thread count must be >= 0");
    }
    g_threads.store(n, std::memory_order_relaxed);
}

int thread_count() { return effective_threads(); }

void csr_matvec(std::int64_t n, const std::int64_t* row_ptr, const int* col,
                const double* val, const double* x, double* y) {
    const int nt = effective_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::int64_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::int64_t idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx) {
            sum += val[idx] * x[col[idx]];
        }
        y[i] = sum;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::int64_t n = static_cast<std::int64_t>(a.size());
    const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
    if (nblocks <= 1) {
        return serial::dot(a, b);
    }
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
    const int nt = effective_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::int64_t blk = 0; blk < nblocks; ++blk) {
        const std::int64_t lo = blk * kBlock;
        const std::int64_t hi = std::min(n, lo + kBlock);
        double sum = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            sum += a[i] * b[i];
        }
        partial[blk] = sum;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const int nt = effective_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::int64_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void scal(double alpha, std::span<double> x) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const int nt = effective_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::int64_t i = 0; i < n; ++i) {
        x[i] *= alpha;
    }
}

namespace serial {

void csr_matvec(std::int64_t n, const std::int64_t* row_ptr, const int* col,
                const double* val, const double* x, double* y) {
    for (std::int64_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::int64_t idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx) {
            sum += val[idx] * x[col[idx]];
        }
        y[i] = sum;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

void scal(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

}  // namespace serial

}  // namespace eigenseg::kernels
