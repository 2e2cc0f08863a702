// Acceptance suite: every release-gating check in one binary, one PASS or
// FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "eigenseg/dense_eigs.hpp"
#include "eigenseg/field.hpp"
#include "eigenseg/kernels.hpp"
#include "eigenseg/operator.hpp"
#include "eigenseg/pipeline.hpp"
#include "eigenseg/rng.hpp"
#include "eigenseg/spectral.hpp"
#include "eigenseg/synth.hpp"
#include "eigenseg/weight.hpp"

using namespace eigenseg;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
double worst_gram_deviation = 0.0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

AssembledOperator lorentzian_operator(const ScalarField& image, const DomainMask& mask) {
    const ScalarField grad_sq = gradient(image, mask).magnitude_squared();
    const GammaResult gamma = compute_gamma(image, mask);
    return assemble(lorentzian_weight(grad_sq, gamma.value), mask);
}

double rmse(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

double best_dice(const SegmentResult& seg, const ScalarField& target, const DomainMask& mask,
                 int* index = nullptr) {
    double best = 0.0;
    for (const auto& m : seg.masks) {
        const double d = dice(m.values, target, mask);
        if (d > best) {
            best = d;
            if (index) *index = m.eigen_index;
        }
    }
    return best;
}

void track_gram(const EigenBasis& basis) {
    double worst = 0.0;
    for (int i = 0; i < basis.count(); ++i) {
        for (int j = i; j < basis.count(); ++j) {
            const double g =
                inner_product(basis.eigenfields[i], basis.eigenfields[j], basis.mask);
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    worst_gram_deviation = std::max(worst_gram_deviation, worst);
}

std::vector<double> closed_form_1d(int n_total, int count) {
    const double h = 1.0 / (n_total - 1);
    std::vector<double> out;
    for (int m = 1; m <= count; ++m) {
        out.push_back(4.0 / (h * h) *
                      std::pow(std::sin(m * M_PI / (2.0 * (n_total - 1))), 2));
    }
    return out;
}

// Sign changes of the eigenvector of a 1-D (tridiagonal) operator,
// evaluated by the three-term recurrence run from both ends toward the
// peak entry; resolves signs far below the roundoff floor of the scattered
// vector.
int recurrence_sign_changes(const SparseOperator& op, double lambda, int twist) {
    std::vector<double> diag(op.n, 0.0), sub(op.n - 1, 0.0);
    for (int i = 0; i < op.n; ++i) {
        for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
            if (op.col[idx] == i) diag[i] = op.val[idx];
            if (op.col[idx] == i + 1) sub[i] = op.val[idx];
        }
    }
    const int n = op.n;
    int changes = 0;
    auto count_step = [&](double prev, double cur) {
        if (prev != 0.0 && cur != 0.0 && std::signbit(prev) != std::signbit(cur)) ++changes;
    };
    double um1 = 0.0, u = 1.0;
    for (int i = 0; i < twist; ++i) {
        double next = -((diag[i] - lambda) * u + (i > 0 ? sub[i - 1] * um1 : 0.0)) / sub[i];
        count_step(u, next);
        um1 = u;
        u = next;
        if (std::abs(u) > 1e250) {
            um1 /= std::abs(u);
            u /= std::abs(u);
        }
    }
    double vp1 = 0.0, v = 1.0;
    for (int i = n - 1; i > twist; --i) {
        double next =
            -((diag[i] - lambda) * v + (i < n - 1 ? sub[i] * vp1 : 0.0)) / sub[i - 1];
        count_step(v, next);
        vp1 = v;
        v = next;
        if (std::abs(v) > 1e250) {
            vp1 /= std::abs(v);
            v /= std::abs(v);
        }
    }
    return changes;
}

void criterion_1_oracle_equivalence() {
    const auto t0 = Clock::now();
    PhantomSpec spec;
    spec.kind = PhantomKind::two_disks;
    spec.resolution = 32;
    Phantom ph = make_phantom(spec);
    DomainMask mask = DomainMask::full(32, 32);
    AssembledOperator a = lorentzian_operator(ph.image, mask);
    EigsOptions opts;
    opts.k = 10;
    EigenBasis basis = smallest_eigenpairs(a.op, mask, opts);
    track_gram(basis);
    DenseEigenResult dense = dense_eigs_oracle(a.op);
    double worst = 0.0;
    for (int m = 0; m < 10; ++m) {
        worst = std::max(worst, std::abs(basis.eigenvalues[m] - dense.values[m]) /
                                    std::abs(dense.values[m]));
    }
    const double elapsed = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max rel deviation %.2e <= 1e-6, %.1fs < 10s",
                  worst, elapsed);
    report(1, "iterative eigenvalues match the dense oracle", worst <= 1e-6 && elapsed < 10.0,
           detail);
}

void criterion_2_analytic_spectrum() {
    bool pass = true;
    double worst_iter = 0.0, worst_dense = 0.0;
    // 1-D n=101, constant image -> gamma fallback 1, plain Laplacian
    {
        const int n = 101;
        DomainMask mask = DomainMask::full(n, 1);
        AssembledOperator a = lorentzian_operator(ScalarField(n, 1, 0.5), mask);
        const std::vector<double> exact = closed_form_1d(n, a.op.n);
        EigsOptions opts;
        opts.k = 10;
        EigenBasis basis = smallest_eigenpairs(a.op, mask, opts);
        track_gram(basis);
        for (int m = 0; m < 10; ++m) {
            worst_iter = std::max(
                worst_iter, std::abs(basis.eigenvalues[m] - exact[m]) / exact[m]);
        }
        DenseEigenResult dense = dense_eigs_oracle(a.op);
        for (int m = 0; m < a.op.n; ++m) {
            worst_dense = std::max(worst_dense,
                                   std::abs(dense.values[m] - exact[m]) / exact[m]);
        }
    }
    // 2-D 33x33: tensor sums of the 1-D values
    {
        const int n = 33;
        DomainMask mask = DomainMask::full(n, n);
        AssembledOperator a = lorentzian_operator(ScalarField(n, n, 0.5), mask);
        const double h = mask.spacing();
        std::vector<double> exact;
        for (int j = 1; j <= n - 2; ++j) {
            for (int l = 1; l <= n - 2; ++l) {
                exact.push_back(4.0 / (h * h) *
                                (std::pow(std::sin(j * M_PI / (2.0 * (n - 1))), 2) +
                                 std::pow(std::sin(l * M_PI / (2.0 * (n - 1))), 2)));
            }
        }
        std::sort(exact.begin(), exact.end());
        EigsOptions opts;
        opts.k = 10;
        EigenBasis basis = smallest_eigenpairs(a.op, mask, opts);
        track_gram(basis);
        for (int m = 0; m < 10; ++m) {
            worst_iter = std::max(
                worst_iter, std::abs(basis.eigenvalues[m] - exact[m]) / exact[m]);
        }
        DenseEigenResult dense = dense_eigs_oracle(a.op);
        for (int m = 0; m < a.op.n; ++m) {
            worst_dense = std::max(worst_dense,
                                   std::abs(dense.values[m] - exact[m]) / exact[m]);
        }
    }
    pass = worst_iter <= 1e-6 && worst_dense <= 1e-10;
    char detail[128];
    std::snprintf(detail, sizeof(detail), "iterative %.2e <= 1e-6, dense %.2e <= 1e-10",
                  worst_iter, worst_dense);
    report(2, "closed-form Dirichlet Laplacian spectrum", pass, detail);
}

void criterion_3_spd_and_maximum_principle() {
    bool pass = true;
    std::string detail;
    double min_lambda = 1e300;

    std::vector<std::pair<AssembledOperator, DomainMask>> cases;
    {
        DomainMask mask = DomainMask::full(101, 1);
        cases.emplace_back(lorentzian_operator(ScalarField(101, 1, 0.2), mask), mask);
        PhantomSpec spec;
        spec.kind = PhantomKind::profile1d;
        spec.resolution = 501;
        cases.emplace_back(lorentzian_operator(make_phantom(spec).image, mask = DomainMask::full(501, 1)),
                           mask);
    }
    {
        PhantomSpec spec;
        spec.kind = PhantomKind::two_disks;
        spec.resolution = 24;
        DomainMask mask = DomainMask::full(24, 24);
        cases.emplace_back(lorentzian_operator(make_phantom(spec).image, mask), mask);
    }
    {
        PhantomSpec spec;
        spec.kind = PhantomKind::blob_with_blur;
        spec.resolution = 48;
        spec.blur_radius = 0.02;
        Phantom ph = make_phantom(spec);
        ScalarField roi(48, 48, 0.0);
        const double h = roi.spacing();
        for (int y = 0; y < 48; ++y) {
            for (int x = 0; x < 48; ++x) {
                const double dx = x * h - 0.5, dy = y * h - 0.5;
                if (dx * dx + dy * dy <= 0.42 * 0.42) roi.at(x, y) = 1.0;
            }
        }
        DomainMask mask = DomainMask::from_foreground(roi);
        cases.emplace_back(lorentzian_operator(ph.image, mask), mask);
    }

    for (auto& [assembled, mask] : cases) {
        EigsOptions opts;
        opts.k = 1;
        EigenBasis basis = smallest_eigenpairs(assembled.op, mask, opts);
        min_lambda = std::min(min_lambda, basis.eigenvalues[0]);
        if (!(basis.eigenvalues[0] > 0.0)) pass = false;

        // boundary data inside [0.2, 0.8] must extend inside [0.2, 0.8];
        // the solve tolerance allows a 1e-9 margin
        ScalarField g(mask.width, mask.height, 0.0);
        std::size_t counter = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask.labels[i] == NodeLabel::boundary) {
                g.values[i] = 0.2 + 0.6 * rng::unit_open(55, counter++);
            }
        }
        ScalarField u = solve_prolongation(assembled.op, assembled.coupling, mask, g, false,
                                           1e-12);
        for (int node : mask.interior_nodes) {
            if (u.values[node] < 0.2 - 1e-9 || u.values[node] > 0.8 + 1e-9) pass = false;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "4 operators, smallest eigenvalue %.2e > 0, extensions within bounds",
                  min_lambda);
    report(3, "positive definiteness and maximum principle", pass, buf);
}

void criterion_4_sturm_oscillation() {
    bool pass = true;
    std::string detail = "sign changes m-1 for m=1..10";
    // constant weight: direct counting on the scattered fields
    {
        const int n = 201;
        DomainMask mask = DomainMask::full(n, 1);
        AssembledOperator a = lorentzian_operator(ScalarField(n, 1, 0.5), mask);
        EigsOptions opts;
        opts.k = 10;
        EigenBasis basis = smallest_eigenpairs(a.op, mask, opts);
        track_gram(basis);
        for (int m = 1; m <= 10; ++m) {
            const ScalarField& phi = basis.eigenfields[m - 1];
            double peak = 0.0;
            for (int node : mask.interior_nodes) {
                peak = std::max(peak, std::abs(phi.values[node]));
            }
            int changes = 0;
            double prev = 0.0;
            for (int node : mask.interior_nodes) {
                const double v = phi.values[node];
                if (std::abs(v) < 1e-12 * peak) continue;
                if (prev != 0.0 && std::signbit(prev) != std::signbit(v)) ++changes;
                prev = v;
            }
            if (changes != m - 1) pass = false;
        }
    }
    // profile phantom weights: recurrence-based counting
    {
        PhantomSpec spec;
        spec.kind = PhantomKind::profile1d;
        spec.resolution = 1001;
        Phantom ph = make_phantom(spec);
        DomainMask mask = DomainMask::full(1001, 1);
        AssembledOperator a = lorentzian_operator(ph.image, mask);
        EigsOptions opts;
        opts.k = 10;
        EigenBasis basis = smallest_eigenpairs(a.op, mask, opts);
        track_gram(basis);
        for (int m = 1; m <= 10; ++m) {
            const ScalarField& phi = basis.eigenfields[m - 1];
            int twist = 0;
            double peak = 0.0;
            for (int r = 0; r < a.op.n; ++r) {
                const double v = std::abs(phi.values[mask.interior_nodes[r]]);
                if (v > peak) {
                    peak = v;
                    twist = r;
                }
            }
            if (recurrence_sign_changes(a.op, basis.eigenvalues[m - 1], twist) != m - 1) {
                pass = false;
            }
        }
    }
    report(4, "Sturm oscillation on constant and phantom weights", pass, detail);
}

void criterion_5_localization() {
    PhantomSpec spec;
    spec.kind = PhantomKind::profile1d;
    spec.resolution = 1001;
    Phantom ph = make_phantom(spec);
    DomainMask mask = DomainMask::full(1001, 1);
    PipelineConfig cfg;
    cfg.k = 8;
    SegmentResult seg = segment(ph.image, mask, cfg);
    track_gram(seg.basis);
    int i1 = 0, i2 = 0;
    const double d1 = best_dice(seg, ph.truth[0], mask, &i1);
    const double d2 = best_dice(seg, ph.truth[1], mask, &i2);
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "object dice %.3f (phi_%d) and %.3f (phi_%d), both >= 0.95", d1, i1, d2, i2);
    report(5, "eigenfunctions localize on the profile objects",
           d1 >= 0.95 && d2 >= 0.95 && i1 != i2, detail);
}

void criterion_6_noise_robustness() {
    bool pass = true;
    double worst = 1.0;
    // 1-D, uniform noise
    {
        PhantomSpec spec;
        spec.kind = PhantomKind::profile1d;
        spec.resolution = 1001;
        Phantom ph = make_phantom(spec);
        DomainMask mask = DomainMask::full(1001, 1);
        PipelineConfig cfg;
        cfg.k = 8;
        SegmentResult clean = segment(ph.image, mask, cfg);
        int i1 = 0, i2 = 0;
        best_dice(clean, ph.truth[0], mask, &i1);
        best_dice(clean, ph.truth[1], mask, &i2);
        NoiseSpec ns;
        ns.delta = 0.2;
        ns.distribution = NoiseDistribution::uniform01;
        ns.seed = 11;
        SegmentResult noisy = segment(add_noise(ph.image, ns), mask, cfg);
        for (int target : {i1, i2}) {
            double best = 0.0;
            for (const auto& m : noisy.masks) {
                best = std::max(best, dice(m.values, clean.masks[target - 1].values, mask));
            }
            worst = std::min(worst, best);
        }
    }
    // 2-D, gaussian noise
    {
        PhantomSpec spec;
        spec.kind = PhantomKind::two_disks;
        spec.resolution = 64;
        Phantom ph = make_phantom(spec);
        DomainMask mask = DomainMask::full(64, 64);
        PipelineConfig cfg;
        cfg.k = 8;
        SegmentResult clean = segment(ph.image, mask, cfg);
        track_gram(clean.basis);
        int i1 = 0, i2 = 0;
        best_dice(clean, ph.truth[0], mask, &i1);
        best_dice(clean, ph.truth[1], mask, &i2);
        NoiseSpec ns;
        ns.delta = 0.2;
        ns.distribution = NoiseDistribution::gaussian01;
        ns.seed = 7;
        SegmentResult noisy = segment(add_noise(ph.image, ns), mask, cfg);
        for (int target : {i1, i2}) {
            double best = 0.0;
            for (const auto& m : noisy.masks) {
                best = std::max(best, dice(m.values, clean.masks[target - 1].values, mask));
            }
            worst = std::min(worst, best);
        }
    }
    pass = worst >= 0.9;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "worst noisy-vs-clean mask dice %.3f >= 0.9", worst);
    report(6, "segmentation is stable under 20% noise", pass, detail);
}

void criterion_7_completeness() {
    const int n = 16;
    DomainMask mask = DomainMask::full(n, n);
    ScalarField image(n, n);
    for (std::size_t i = 0; i < image.size(); ++i) image.values[i] = rng::unit_open(2024, i);
    AssembledOperator a = lorentzian_operator(image, mask);
    EigenBasis basis = eigenbasis_from_dense(a.op, mask, a.op.n);
    track_gram(basis);
    ScalarField i0 = solve_prolongation(a.op, a.coupling, mask, image, false, 1e-12);
    Expansion ex = project(image, basis, i0);
    ScalarField rec = reconstruct(ex, basis, a.op.n);
    const double err = rmse(rec, image);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "full-basis reconstruction RMSE %.2e <= 1e-8", err);
    report(7, "expansion completeness on a random image", err <= 1e-8, detail);
}

void criterion_8_denoising() {
    PhantomSpec spec;
    spec.kind = PhantomKind::blob_with_blur;
    spec.resolution = 128;
    spec.blur_radius = 0.0;
    Phantom ph = make_phantom(spec);
    DomainMask mask = DomainMask::full(128, 128);
    NoiseSpec ns;
    ns.delta = 0.2;
    ns.distribution = NoiseDistribution::gaussian01;
    ns.seed = 21;
    ScalarField noisy = add_noise(ph.image, ns);
    PipelineConfig cfg;
    cfg.k = 50;
    cfg.truncation = 50;
    DenoiseResult den = denoise(noisy, mask, cfg);
    track_gram(den.basis);
    const double r_noisy = rmse(noisy, ph.image);
    const double r_den = rmse(den.output, ph.image);
    // calibrated 0.442 on this configuration; the stated factor 1/2 is the
    // tighter of (1/2, 1.2 * calibration) and stays the gate
    const bool pass = r_den <= 0.5 * r_noisy;
    char detail[128];
    std::snprintf(detail, sizeof(detail), "RMSE %.4f vs noisy %.4f, ratio %.3f <= 0.5", r_den,
                  r_noisy, r_den / r_noisy);
    report(8, "truncated expansion halves delta=0.2 noise", pass, detail);
}

void criterion_9_heavy_noise_pipeline() {
    PhantomSpec spec;
    spec.kind = PhantomKind::blob_with_blur;
    spec.resolution = 128;
    spec.blur_radius = 0.0;
    Phantom ph = make_phantom(spec);
    DomainMask mask = DomainMask::full(128, 128);
    PipelineConfig seg_cfg;
    seg_cfg.k = 8;
    SegmentResult clean = segment(ph.image, mask, seg_cfg);
    int clean_idx = 0;
    best_dice(clean, ph.truth[0], mask, &clean_idx);

    NoiseSpec ns;
    ns.delta = 1.2;
    ns.distribution = NoiseDistribution::gaussian01;
    ns.seed = 77;
    PipelineConfig cfg;
    cfg.k = 150;
    cfg.truncation = 150;
    DenoiseSegmentResult ds = denoise_then_segment(add_noise(ph.image, ns), mask, cfg);
    double best = 0.0;
    for (const auto& m : ds.segmentation.masks) {
        best = std::max(best, dice(m.values, clean.masks[clean_idx - 1].values, mask));
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "dice %.3f >= 0.8 after K=150 filtering", best);
    report(9, "segmentation survives 120% noise via denoising", best >= 0.8, detail);
}

void criterion_10_sparsity() {
    PhantomSpec spec;
    spec.kind = PhantomKind::two_disks;
    spec.resolution = 256;
    Phantom ph = make_phantom(spec);
    DomainMask mask = DomainMask::full(256, 256);
    PipelineConfig cfg;
    cfg.k = 5;
    EigenBasis basis = compute_eigenspace(ph.image, mask, cfg);
    track_gram(basis);
    SparsifyResult sr = sparsify(basis, 1e-3);
    double worst = 1.0;
    for (double f : sr.fraction_zeroed) worst = std::min(worst, f);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "min zeroed fraction over phi_1..5 = %.3f > 0.9",
                  worst);
    report(10, "eigenfunctions are sparse at 256x256", worst > 0.9, detail);
}

void criterion_11_orthonormality() {
    char detail[96];
    std::snprintf(detail, sizeof(detail), "worst Gram deviation %.2e <= 1e-8",
                  worst_gram_deviation);
    report(11, "mesh-orthonormality of every returned basis", worst_gram_deviation <= 1e-8,
           detail);
}

void criterion_12_scaling() {
    std::vector<double> times;
    for (int side : {64, 128, 256}) {
        PhantomSpec spec;
        spec.kind = PhantomKind::two_disks;
        spec.resolution = side;
        Phantom ph = make_phantom(spec);
        DomainMask mask = DomainMask::full(side, side);
        AssembledOperator a = lorentzian_operator(ph.image, mask);
        std::vector<double> x(a.op.n), y(a.op.n);
        for (int i = 0; i < a.op.n; ++i) x[i] = 1.0 + 1e-3 * (i % 13);
        const int reps = std::max(8, 1000000 / a.op.n);
        double best = 1e300;
        for (int trial = 0; trial < 7; ++trial) {
            const auto t0 = Clock::now();
            for (int r = 0; r < reps; ++r) {
                kernels::csr_matvec(a.op.n, a.op.row_ptr.data(), a.op.col.data(),
                                    a.op.val.data(), x.data(), y.data());
            }
            best = std::min(best, seconds_since(t0) / reps);
        }
        times.push_back(best);
    }
    // a side doubling quadruples the DOF count, i.e. two doublings of n:
    // the bound of 2.5x per n-doubling compounds to 6.25x
    const double growth1 = times[1] / times[0];
    const double growth2 = times[2] / times[1];
    const bool pass = growth1 <= 6.25 && growth2 <= 6.25;
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "matvec growth 64->128: %.2fx, 128->256: %.2fx, bound 6.25x per side doubling",
                  growth1, growth2);
    report(12, "near-linear matvec scaling", pass, detail);
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion_1_oracle_equivalence();
    criterion_2_analytic_spectrum();
    criterion_3_spd_and_maximum_principle();
    criterion_4_sturm_oscillation();
    criterion_5_localization();
    criterion_6_noise_robustness();
    criterion_7_completeness();
    criterion_8_denoising();
    criterion_9_heavy_noise_pipeline();
    criterion_10_sparsity();
    criterion_11_orthonormality();
    criterion_12_scaling();
    std::printf("%d of 12 criteria passed in %.1fs\n", 12 - failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
