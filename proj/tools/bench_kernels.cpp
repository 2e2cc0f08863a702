// Benchmark of the OpenMP kernels against their serial reference
// implementations on operators assembled from a two-disk phantom at
// growing resolutions. Reports per-kernel timings, parallel speedup, and
// the matvec time growth across size doublings.

#include <chrono>
#include <functional>
#include <cstdio>
#include <string>
#include <vector>

#include "eigenseg/field.hpp"
#include "eigenseg/kernels.hpp"
#include "eigenseg/operator.hpp"
#include "eigenseg/synth.hpp"
#include "eigenseg/weight.hpp"

using namespace eigenseg;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int trial = 0; trial < 5; ++trial) {
        const auto start = Clock::now();
        for (int r = 0; r < reps; ++r) fn();
        const double ms =
            std::chrono::duration<double, std::milli>(Clock::now() - start).count() / reps;
        best = std::min(best, ms);
    }
    return best;
}

SparseOperator build_operator(int n) {
    PhantomSpec spec;
    spec.kind = PhantomKind::two_disks;
    spec.resolution = n;
    const Phantom ph = make_phantom(spec);
    const DomainMask mask = DomainMask::full(n, n);
    const ScalarField grad_sq = gradient(ph.image, mask).magnitude_squared();
    const GammaResult gamma = compute_gamma(ph.image, mask);
    return assemble(lorentzian_weight(grad_sq, gamma.value), mask).op;
}

}  // namespace

int main(int argc, char** argv) {
    int threads = 0;
    if (argc > 1) threads = std::atoi(argv[1]);
    kernels::set_thread_count(threads);
    std::printf("threads: %d\n", kernels::thread_count());
    std::printf("%-8s %10s %12s %12s %8s %12s %12s %8s\n", "size", "n", "matvec-ser",
                "matvec-omp", "speedup", "dot-ser", "dot-omp", "speedup");

    std::vector<double> matvec_omp_ms;
    std::vector<int> sizes = {64, 128, 256};
    for (int s : sizes) {
        const SparseOperator op = build_operator(s);
        std::vector<double> x(op.n, 1.0), y(op.n, 0.0);
        for (int i = 0; i < op.n; ++i) x[i] = 1.0 + 1e-3 * (i % 17);
        const int reps = std::max(4, 2000000 / op.n);

        const double serial_mv = time_ms(reps, [&] {
            kernels::serial::csr_matvec(op.n, op.row_ptr.data(), op.col.data(),
                                        op.val.data(), x.data(), y.data());
        });
        const double omp_mv = time_ms(reps, [&] {
            kernels::csr_matvec(op.n, op.row_ptr.data(), op.col.data(), op.val.data(),
                                x.data(), y.data());
        });
        double sink = 0.0;
        const double serial_dot = time_ms(reps, [&] { sink += kernels::serial::dot(x, y); });
        const double omp_dot = time_ms(reps, [&] { sink += kernels::dot(x, y); });
        if (sink == 12345.6789) std::printf("#");

        matvec_omp_ms.push_back(omp_mv);
        std::printf("%-8s %10d %10.4fms %10.4fms %7.2fx %10.4fms %10.4fms %7.2fx\n",
                    (std::to_string(s) + "^2").c_str(), op.n, serial_mv, omp_mv,
                    serial_mv / omp_mv, serial_dot, omp_dot, serial_dot / omp_dot);
    }

    std::printf("\nmatvec growth per resolution doubling (4x DOF):\n");
    for (std::size_t i = 1; i < matvec_omp_ms.size(); ++i) {
        std::printf("  %d^2 -> %d^2: %.2fx\n", sizes[i - 1], sizes[i],
                    matvec_omp_ms[i] / matvec_omp_ms[i - 1]);
    }
    return 0;
}
