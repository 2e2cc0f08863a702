// Command-line front end: phantom generation, noise injection, eigenpair
// computation, segmentation, denoising, and the iterative-vs-dense check.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eigenseg/dense_eigs.hpp"
#include "eigenseg/errors.hpp"
#include "eigenseg/image_io.hpp"
#include "eigenseg/kernels.hpp"
#include "eigenseg/manifest.hpp"
#include "eigenseg/pipeline.hpp"
#include "eigenseg/spectral.hpp"
#include "eigenseg/synth.hpp"

namespace fs = std::filesystem;
using namespace eigenseg;

namespace {

constexpr int kExitBadInput = 1;
constexpr int kExitSolver = 2;
constexpr int kExitDegenerate = 3;

struct CommonOptions {
    std::string weight = "lorentzian";
    double epsilon = 0.01;
    double tol = 1e-8;
    std::string averaging = "harmonic";
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--weight", opt.weight, "weight law: lorentzian|tv")
        ->check(CLI::IsMember({"lorentzian", "tv"}));
    cmd->add_option("--epsilon", opt.epsilon, "smoothing of the tv weight")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", opt.tol, "eigensolver residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--avg", opt.averaging, "face averaging: harmonic|arithmetic")
        ->check(CLI::IsMember({"harmonic", "arithmetic"}));
    cmd->add_option("--threads", opt.threads, "matvec thread count (0 = all)")
        ->check(CLI::NonNegativeNumber);
}

void apply_common(const CommonOptions& opt, PipelineConfig& cfg) {
    cfg.law.kind = opt.weight == "tv" ? WeightKind::penalized_tv : WeightKind::lorentzian;
    cfg.law.epsilon = opt.epsilon;
    cfg.tol = opt.tol;
    cfg.face_average = opt.averaging == "arithmetic" ? FaceAverage::arithmetic
                                                     : FaceAverage::harmonic;
    int threads = opt.threads;
    if (threads == 0) {
        if (const char* env = std::getenv("AES_THREADS")) {
            threads = std::atoi(env);
        }
    }
    kernels::set_thread_count(std::max(0, threads));
}

void record_common(nlohmann::json& config, const CommonOptions& opt) {
    config["weight"] = opt.weight;
    config["epsilon"] = opt.epsilon;
    config["tol"] = opt.tol;
    config["avg"] = opt.averaging;
    config["threads"] = kernels::thread_count();
}

DomainMask load_mask(const std::optional<std::string>& mask_path, const ScalarField& image,
                     RunManifest& manifest) {
    if (!mask_path) {
        return DomainMask::full(image.width, image.height);
    }
    const ScalarField fg = read_image(*mask_path);
    if (!fg.same_shape(image)) {
        throw ContractError("mask dimensions do not match the image");
    }
    manifest.add_input(*mask_path);
    return DomainMask::from_foreground(fg);
}

std::string phi_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "phi_%04d.pfm", index);
    return buf;
}

std::string mask_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "mask_%04d.pgm", index);
    return buf;
}

int run_eigs(const std::string& input, const std::optional<std::string>& mask_path, int k,
             const CommonOptions& common, const std::string& out_dir,
             const std::optional<std::string>& dump_matrix) {
    RunManifest manifest("eigs");
    fs::create_directories(out_dir);
    const ScalarField image = read_image(input);
    manifest.add_input(input);
    const DomainMask mask = load_mask(mask_path, image, manifest);

    PipelineConfig cfg;
    apply_common(common, cfg);
    cfg.k = k;
    record_common(manifest.config(), common);
    manifest.config()["k"] = k;

    if (dump_matrix) {
        const ScalarField grad_sq = gradient(image, mask).magnitude_squared();
        const GammaResult gamma = compute_gamma(image, mask);
        const WeightField weight = cfg.law.kind == WeightKind::lorentzian
                                       ? lorentzian_weight(grad_sq, gamma.value)
                                       : tv_weight(grad_sq, cfg.law.epsilon);
        const AssembledOperator assembled = assemble(weight, mask, cfg.face_average);
        std::ofstream out(*dump_matrix);
        write_matrix_market(out, assembled.op);
        manifest.add_output(*dump_matrix);
    }

    const double t0 = manifest.elapsed_ms();
    const EigenBasis basis = compute_eigenspace(image, mask, cfg);
    manifest.add_timing_ms("eigensolve", manifest.elapsed_ms() - t0);
    manifest.set_gamma(basis.gamma, basis.gamma_degenerate);
    manifest.set_weight_law(basis.weight_law);

    for (int m = 1; m <= basis.count(); ++m) {
        const fs::path path = fs::path(out_dir) / phi_name(m);
        write_field(basis.eigenfields[m - 1], path);
        manifest.add_output(path);
    }
    const fs::path spectrum = fs::path(out_dir) / "spectrum.json";
    write_spectrum_json(spectrum, basis);
    manifest.add_output(spectrum);
    manifest.add_timing_ms("total", manifest.elapsed_ms());
    manifest.write(fs::path(out_dir) / "manifest.json");
    return 0;
}

int run_segment(const std::string& input, const std::optional<std::string>& mask_path,
                const std::string& indices_csv, const std::string& threshold_spec, int k,
                const CommonOptions& common, const std::string& out_dir) {
    RunManifest manifest("segment");
    fs::create_directories(out_dir);
    const ScalarField image = read_image(input);
    manifest.add_input(input);
    const DomainMask mask = load_mask(mask_path, image, manifest);

    PipelineConfig cfg;
    apply_common(common, cfg);
    cfg.k = k;
    if (!indices_csv.empty()) {
        for (std::size_t pos = 0; pos < indices_csv.size();) {
            std::size_t next = indices_csv.find(',', pos);
            if (next == std::string::npos) next = indices_csv.size();
            cfg.indices.push_back(std::stoi(indices_csv.substr(pos, next - pos)));
            pos = next + 1;
        }
    }
    if (threshold_spec == "otsu") {
        cfg.threshold.kind = ThresholdKind::otsu;
    } else if (threshold_spec.rfind("fixed:", 0) == 0) {
        cfg.threshold.kind = ThresholdKind::fixed;
        cfg.threshold.value = std::stod(threshold_spec.substr(6));
    } else {
        throw ContractError("threshold must be 'otsu' or 'fixed:T'");
    }
    record_common(manifest.config(), common);
    manifest.config()["k"] = k;
    manifest.config()["indices"] = indices_csv;
    manifest.config()["threshold"] = threshold_spec;

    const SegmentResult result = segment(image, mask, cfg);
    manifest.set_gamma(result.basis.gamma, result.basis.gamma_degenerate);
    manifest.set_weight_law(result.basis.weight_law);
    if (result.degenerate_input) {
        throw DegenerateThresholdError("constant input image has nothing to segment");
    }
    for (const SegmentationMask& m : result.masks) {
        const fs::path path = fs::path(out_dir) / mask_name(m.eigen_index);
        write_image(m.values, path);
        manifest.add_output(path);
    }
    manifest.add_timing_ms("total", manifest.elapsed_ms());
    manifest.write(fs::path(out_dir) / "manifest.json");
    return 0;
}

int run_denoise(const std::string& input, const std::optional<std::string>& mask_path, int k,
                int truncation, bool zero_boundary, const CommonOptions& common,
                const std::string& out) {
    RunManifest manifest("denoise");
    const ScalarField image = read_image(input);
    manifest.add_input(input);
    const DomainMask mask = load_mask(mask_path, image, manifest);

    PipelineConfig cfg;
    apply_common(common, cfg);
    cfg.k = k;
    cfg.truncation = truncation;
    cfg.zero_boundary = zero_boundary;
    record_common(manifest.config(), common);
    manifest.config()["k"] = k;
    manifest.config()["K"] = truncation;
    manifest.config()["zero_boundary"] = zero_boundary;

    const DenoiseResult result = denoise(image, mask, cfg);
    manifest.set_gamma(result.basis.gamma, result.basis.gamma_degenerate);
    manifest.set_weight_law(result.basis.weight_law);

    write_image(result.output, out);
    manifest.add_output(out);
    fs::path pfm = fs::path(out);
    pfm.replace_extension(".pfm");
    write_field(result.output, pfm);
    manifest.add_output(pfm);
    manifest.add_timing_ms("total", manifest.elapsed_ms());
    manifest.write(fs::path(out).string() + ".manifest.json");
    return 0;
}

int run_add_noise(const std::string& input, double delta, const std::string& dist,
                  std::uint64_t seed, const std::string& out) {
    RunManifest manifest("add-noise");
    const ScalarField image = read_image(input);
    manifest.add_input(input);
    NoiseSpec spec;
    spec.delta = delta;
    spec.distribution =
        dist == "uniform" ? NoiseDistribution::uniform01 : NoiseDistribution::gaussian01;
    spec.seed = seed;
    manifest.config()["delta"] = delta;
    manifest.config()["dist"] = dist;
    manifest.config()["seed"] = seed;
    write_image(add_noise(image, spec), out);
    manifest.add_output(out);
    manifest.add_timing_ms("total", manifest.elapsed_ms());
    manifest.write(fs::path(out).string() + ".manifest.json");
    return 0;
}

int run_phantom(const std::string& kind, int n, const std::string& out_dir) {
    RunManifest manifest("phantom");
    fs::create_directories(out_dir);
    PhantomSpec spec;
    spec.resolution = n;
    if (kind == "profile1d") {
        spec.kind = PhantomKind::profile1d;
    } else if (kind == "two_disks") {
        spec.kind = PhantomKind::two_disks;
    } else if (kind == "blob_with_blur") {
        spec.kind = PhantomKind::blob_with_blur;
        spec.blur_radius = 0.02;
    } else {
        throw ContractError("unknown phantom kind " + kind);
    }
    manifest.config()["kind"] = kind;
    manifest.config()["n"] = n;

    const Phantom phantom = make_phantom(spec);
    const fs::path image_path = fs::path(out_dir) / "phantom.pgm";
    write_image(phantom.image, image_path);
    manifest.add_output(image_path);
    const fs::path field_path = fs::path(out_dir) / "phantom.pfm";
    write_field(phantom.image, field_path);
    manifest.add_output(field_path);
    for (std::size_t i = 0; i < phantom.truth.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "truth_%02zu.pgm", i + 1);
        const fs::path path = fs::path(out_dir) / buf;
        write_image(phantom.truth[i], path);
        manifest.add_output(path);
    }
    manifest.add_timing_ms("total", manifest.elapsed_ms());
    manifest.write(fs::path(out_dir) / "manifest.json");
    return 0;
}

int run_oracle_check(const std::string& input, int k, const CommonOptions& common) {
    const ScalarField image = read_image(input);
    const DomainMask mask = DomainMask::full(image.width, image.height);

    PipelineConfig cfg;
    apply_common(common, cfg);
    cfg.k = k;

    const ScalarField grad_sq = gradient(image, mask).magnitude_squared();
    const GammaResult gamma = compute_gamma(image, mask);
    const WeightField weight = cfg.law.kind == WeightKind::lorentzian
                                   ? lorentzian_weight(grad_sq, gamma.value)
                                   : tv_weight(grad_sq, cfg.law.epsilon);
    const AssembledOperator assembled = assemble(weight, mask, cfg.face_average);

    EigsOptions opts;
    opts.k = k;
    opts.tol = cfg.tol;
    const EigenBasis basis = smallest_eigenpairs(assembled.op, mask, opts);
    const DenseEigenResult dense = dense_eigs_oracle(assembled.op);

    double worst = 0.0;
    for (int m = 0; m < k; ++m) {
        const double rel = std::abs(basis.eigenvalues[m] - dense.values[m]) /
                           std::abs(dense.values[m]);
        worst = std::max(worst, rel);
    }
    std::printf("max relative deviation over %d eigenvalues: %.6e\n", k, worst);
    return worst <= 1e-6 ? 0 : kExitSolver;
}

void print_error_json(int code, const std::string& kind, const std::string& message) {
    nlohmann::json j;
    j["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eigenfunction-based image segmentation and denoising"};
    app.require_subcommand(1);

    // eigs
    auto* eigs = app.add_subcommand("eigs", "compute the smallest eigenpairs of an image");
    std::string eigs_input, eigs_out_dir;
    std::optional<std::string> eigs_mask, eigs_dump;
    int eigs_k = 8;
    CommonOptions eigs_common;
    eigs->add_option("--input", eigs_input, "input PGM image")->required();
    eigs->add_option("--mask", eigs_mask, "region-of-interest PGM mask");
    eigs->add_option("--k", eigs_k, "number of eigenpairs")->check(CLI::PositiveNumber);
    eigs->add_option("--out-dir", eigs_out_dir, "output directory")->required();
    eigs->add_option("--dump-matrix", eigs_dump, "write the operator in Matrix Market format");
    add_common(eigs, eigs_common);

    // segment
    auto* seg = app.add_subcommand("segment", "threshold eigenfunctions into binary masks");
    std::string seg_input, seg_out_dir, seg_indices, seg_threshold = "otsu";
    std::optional<std::string> seg_mask;
    int seg_k = 8;
    CommonOptions seg_common;
    seg->add_option("--input", seg_input, "input PGM image")->required();
    seg->add_option("--mask", seg_mask, "region-of-interest PGM mask");
    seg->add_option("--indices", seg_indices, "comma-separated 1-based eigenfunction indices");
    seg->add_option("--threshold", seg_threshold, "otsu or fixed:T");
    seg->add_option("--k", seg_k, "number of eigenpairs")->check(CLI::PositiveNumber);
    seg->add_option("--out-dir", seg_out_dir, "output directory")->required();
    add_common(seg, seg_common);

    // denoise
    auto* den = app.add_subcommand("denoise", "truncated eigen-expansion reconstruction");
    std::string den_input, den_out;
    std::optional<std::string> den_mask;
    int den_k = 8, den_K = -1;
    bool den_zero_boundary = false;
    CommonOptions den_common;
    den->add_option("--input", den_input, "input PGM image")->required();
    den->add_option("--mask", den_mask, "region-of-interest PGM mask");
    den->add_option("--k", den_k, "number of eigenpairs")->check(CLI::PositiveNumber);
    den->add_option("--K", den_K, "truncation: leading coefficients kept, default min(k,150)")
        ->check(CLI::NonNegativeNumber);
    den->add_flag("--zero-boundary", den_zero_boundary, "use zero boundary data");
    den->add_option("--out", den_out, "output PGM path")->required();
    add_common(den, den_common);

    // add-noise
    auto* noise = app.add_subcommand("add-noise", "multiplicative noise injection");
    std::string noise_input, noise_out, noise_dist = "gaussian";
    double noise_delta = 0.2;
    std::uint64_t noise_seed = 0;
    noise->add_option("--input", noise_input, "input PGM image")->required();
    noise->add_option("--delta", noise_delta, "noise level")->required()->check(CLI::NonNegativeNumber);
    noise->add_option("--dist", noise_dist, "uniform|gaussian")
        ->check(CLI::IsMember({"uniform", "gaussian"}));
    noise->add_option("--seed", noise_seed, "reproducibility seed");
    noise->add_option("--out", noise_out, "output PGM path")->required();

    // phantom
    auto* ph = app.add_subcommand("phantom", "generate a synthetic test image");
    std::string ph_kind, ph_out_dir;
    int ph_n = 101;
    ph->add_option("--kind", ph_kind, "profile1d|two_disks|blob_with_blur")
        ->required()
        ->check(CLI::IsMember({"profile1d", "two_disks", "blob_with_blur"}));
    ph->add_option("--n", ph_n, "resolution along the longest axis")->check(CLI::PositiveNumber);
    ph->add_option("--out-dir", ph_out_dir, "output directory")->required();

    // oracle-check
    auto* oc = app.add_subcommand("oracle-check",
                                  "compare iterative and dense eigenvalues");
    std::string oc_input;
    int oc_k = 10;
    CommonOptions oc_common;
    oc->add_option("--input", oc_input, "input PGM image")->required();
    oc->add_option("--k", oc_k, "number of eigenvalues to compare")->check(CLI::PositiveNumber);
    add_common(oc, oc_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        print_error_json(kExitBadInput, "cli", e.what());
        return kExitBadInput;
    }

    try {
        if (eigs->parsed()) {
            return run_eigs(eigs_input, eigs_mask, eigs_k, eigs_common, eigs_out_dir, eigs_dump);
        }
        if (seg->parsed()) {
            return run_segment(seg_input, seg_mask, seg_indices, seg_threshold, seg_k,
                               seg_common, seg_out_dir);
        }
        if (den->parsed()) {
            const int truncation = den_K >= 0 ? den_K : std::min(den_k, 150);
            return run_denoise(den_input, den_mask, den_k, truncation, den_zero_boundary,
                               den_common, den_out);
        }
        if (noise->parsed()) {
            return run_add_noise(noise_input, noise_delta, noise_dist, noise_seed, noise_out);
        }
        if (ph->parsed()) {
            return run_phantom(ph_kind, ph_n, ph_out_dir);
        }
        if (oc->parsed()) {
            return run_oracle_check(oc_input, oc_k, oc_common);
        }
    } catch (const DegenerateThresholdError& e) {
        print_error_json(kExitDegenerate, "degenerate-threshold", e.what());
        return kExitDegenerate;
    } catch (const SolverError& e) {
        print_error_json(kExitSolver, "solver", e.what());
        return kExitSolver;
    } catch (const ParseError& e) {
        print_error_json(kExitBadInput, "parse", e.what());
        return kExitBadInput;
    } catch (const ContractError& e) {
        print_error_json(kExitBadInput, "contract", e.what());
        return kExitBadInput;
    } catch (const std::exception& e) {
        print_error_json(kExitBadInput, "error", e.what());
        return kExitBadInput;
    }
    return kExitBadInput;
}
