#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Data-parallel inner loops shared by the assembly, solver, and pipeline
// code. Each kernel has an OpenMP implementation and a plain serial
// reference in kernels::serial; tests compare the two and the benchmark
// tool times them against each other.
//
// Determinism contract: results are bitwise identical for any thread
// count. Matvec assigns whole rows to threads (each row is summed in
// index order), and reductions sum fixed-size blocks whose partials are
// combined in block order.

namespace eigenseg::kernels {

/// Number of threads the parallel kernels use. 0 restores the OpenMP
/// default. Thread-safe to read; set once at startup.
void set_thread_count(int n);
int thread_count();

void csr_matvec(std::int64_t n, const std::int64_t* row_ptr, const int* col,
                const double* val, const double* x, double* y);

double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

namespace serial {

void csr_matvec(std::int64_t n, const std::int64_t* row_ptr, const int* col,
                const double* val, const double* x, double* y);
double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

}  // namespace serial

}  // namespace eigenseg::kernels
