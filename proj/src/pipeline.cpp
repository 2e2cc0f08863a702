#include "eigenseg/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace eigenseg {

double otsu_threshold(std::span<const double> values) {
    constexpr int kBins = 256;
    std::array<std::int64_t, kBins> hist{};
    std::int64_t total = 0;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw ContractError("otsu_threshold: values must lie in [0,1]");
        }
        int bin = static_cast<int>(v * kBins);
        bin = std::min(bin, kBins - 1);
        ++hist[bin];
        ++total;
    }
    int populated = 0;
    for (std::int64_t c : hist) populated += c > 0 ? 1 : 0;
    if (total == 0 || populated < 2) {
        throw DegenerateThresholdError("otsu_threshold: input has no class structure");
    }

    double weighted_total = 0.0;
    for (int b = 0; b < kBins; ++b) weighted_total += static_cast<double>(b) * hist[b];

    double best_variance = -1.0;
    int best_split = -1;
    double w0 = 0.0;
    double sum0 = 0.0;
    for (int split = 0; split < kBins - 1; ++split) {
        w0 += static_cast<double>(hist[split]);
        sum0 += static_cast<double>(split) * hist[split];
        const double w1 = static_cast<double>(total) - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mean0 = sum0 / w0;
        const double mean1 = (weighted_total - sum0) / w1;
        const double variance = w0 * w1 * (mean0 - mean1) * (mean0 - mean1);
        if (variance > best_variance) {  // strict: ties keep the smaller split
            best_variance = variance;
            best_split = split;
        }
    }
    if (best_split < 0 || best_variance <= 0.0) {
        throw DegenerateThresholdError("otsu_threshold: no split separates the histogram");
    }
    return static_cast<double>(best_split + 1) / kBins;
}

EigenBasis compute_eigenspace(const ScalarField& image, const DomainMask& mask,
                              const PipelineConfig& config) {
    image.validate();
    if (!mask.same_shape(image)) {
        throw ContractError("compute_eigenspace: image and mask dimensions differ");
    }
    const ScalarField grad_sq = gradient(image, mask).magnitude_squared();
    GammaResult gamma{config.law.gamma, false};
    if (!(config.law.gamma > 0.0)) {
        gamma = compute_gamma(image, mask);
    }
    const WeightField weight = config.law.kind == WeightKind::lorentzian
                                   ? lorentzian_weight(grad_sq, gamma.value)
                                   : tv_weight(grad_sq, config.law.epsilon);
    const AssembledOperator assembled = assemble(weight, mask, config.face_average);

    EigsOptions opts;
    opts.k = config.k;
    opts.tol = config.tol;
    opts.seed = config.seed;
    EigenBasis basis = smallest_eigenpairs(assembled.op, mask, opts);
    basis.gamma = gamma.value;
    basis.gamma_degenerate = gamma.degenerate;
    basis.weight_law = weight_law_name(config.law.kind);
    return basis;
}

namespace {

SegmentationMask threshold_eigenfield(const ScalarField& phi, const DomainMask& mask,
                                      int eigen_index, const ThresholdMethod& method) {
    // min-max normalize |phi| over the non-excluded nodes
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const std::size_t n = phi.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.labels[i] == NodeLabel::excluded) continue;
        const double a = std::abs(phi.values[i]);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (!(hi > lo)) {
        throw DegenerateThresholdError("eigenfunction is constant in magnitude");
    }
    std::vector<double> normalized;
    normalized.reserve(n);
    std::vector<std::size_t> nodes;
    nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.labels[i] == NodeLabel::excluded) continue;
        normalized.push_back((std::abs(phi.values[i]) - lo) / (hi - lo));
        nodes.push_back(i);
    }

    double t = method.value;
    if (method.kind == ThresholdKind::otsu) {
        t = otsu_threshold(normalized);
    } else if (!(t > 0.0) || !(t < 1.0)) {
        throw ContractError("fixed threshold must lie in (0,1)");
    }

    SegmentationMask out;
    out.values = ScalarField(phi.width, phi.height, 0.0);
    out.eigen_index = eigen_index;
    out.threshold = t;
    out.method = method.kind == ThresholdKind::otsu ? "otsu" : "fixed";
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        out.values.values[nodes[j]] = normalized[j] > t ? 1.0 : 0.0;
    }
    return out;
}

std::vector<int> resolve_indices(const PipelineConfig& config) {
    std::vector<int> indices = config.indices;
    if (indices.empty()) {
        for (int m = 1; m <= config.k; ++m) indices.push_back(m);
    }
    for (int m : indices) {
        if (m < 1 || m > config.k) {
            throw ContractError("eigenfunction index " + std::to_string(m) +
                                " outside 1..k");
        }
    }
    return indices;
}

}  // namespace

SegmentResult segment(const ScalarField& image, const DomainMask& mask,
                      const PipelineConfig& config) {
    SegmentResult result;
    result.basis = compute_eigenspace(image, mask, config);
    if (result.basis.gamma_degenerate) {
        // Constant image: the weight carries no edge information, so any
        // threshold of the eigenfunctions is meaningless.
        result.degenerate_input = true;
        return result;
    }
    for (int m : resolve_indices(config)) {
        result.masks.push_back(threshold_eigenfield(result.basis.eigenfields[m - 1], mask,
                                                    m, config.threshold));
    }
    return result;
}

DenoiseResult denoise(const ScalarField& image, const DomainMask& mask,
                      const PipelineConfig& config) {
    if (config.truncation < 0 || config.truncation > config.k) {
        throw ContractError("denoise: need 0 <= K <= k");
    }
    DenoiseResult result;
    result.basis = compute_eigenspace(image, mask, config);

    // Rebuild the operator for the prolongation solve; the basis only keeps
    // eigenpairs.
    const ScalarField grad_sq = gradient(image, mask).magnitude_squared();
    const WeightField weight = config.law.kind == WeightKind::lorentzian
                                   ? lorentzian_weight(grad_sq, result.basis.gamma)
                                   : tv_weight(grad_sq, config.law.epsilon);
    const AssembledOperator assembled = assemble(weight, mask, config.face_average);
    const ScalarField i0 = solve_prolongation(assembled.op, assembled.coupling, mask, image,
                                              config.zero_boundary);
    result.expansion = project(image, result.basis, i0);
    result.output = reconstruct(result.expansion, result.basis, config.truncation);
    return result;
}

DenoiseSegmentResult denoise_then_segment(const ScalarField& image, const DomainMask& mask,
                                          const PipelineConfig& config) {
    DenoiseSegmentResult result;
    result.denoised = denoise(image, mask, config).output;
    result.segmentation = segment(result.denoised, mask, config);
    return result;
}

double dice(const ScalarField& a, const ScalarField& b, const DomainMask& mask) {
    if (!a.same_shape(b) || !mask.same_shape(a)) {
        throw ContractError("dice: dimension mismatch");
    }
    std::int64_t in_a = 0, in_b = 0, in_both = 0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.labels[i] == NodeLabel::excluded) continue;
        const bool pa = a.values[i] != 0.0;
        const bool pb = b.values[i] != 0.0;
        in_a += pa;
        in_b += pb;
        in_both += pa && pb;
    }
    if (in_a + in_b == 0) return 1.0;
    return 2.0 * static_cast<double>(in_both) / static_cast<double>(in_a + in_b);
}

}  // namespace eigenseg
