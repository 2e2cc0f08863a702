#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eigenseg/field.hpp"
#include "eigenseg/operator.hpp"
#include "eigenseg/spectral.hpp"
#include "eigenseg/weight.hpp"

namespace eigenseg {

enum class ThresholdKind { otsu, fixed };

struct ThresholdMethod {
    ThresholdKind kind = ThresholdKind::otsu;
    double value = 0.5;  // used by fixed, must lie in (0,1)
};

/// End-to-end configuration shared by the segmentation and denoising
/// pipelines.
struct PipelineConfig {
    WeightLaw law;
    FaceAverage face_average = FaceAverage::harmonic;
    int k = 8;                  // eigenpairs to compute
    int truncation = 8;         // K, leading terms kept by denoise; <= k
    std::vector<int> indices;   // 1-based eigenfunction picks; empty = 1..k
    ThresholdMethod threshold;
    bool zero_boundary = false;
    double tol = 1e-8;
    std::uint64_t seed = 0x0eac9c84d9f7b2a1ULL;
};

/// Binary mask produced by thresholding one eigenfunction.
struct SegmentationMask {
    ScalarField values;      // exactly 0 or 1; 0 on excluded nodes
    int eigen_index = 0;     // 1-based index into the basis
    double threshold = 0.0;
    std::string method;
};

struct SegmentResult {
    std::vector<SegmentationMask> masks;
    EigenBasis basis;
    bool degenerate_input = false;  // constant image: no masks emitted
};

/// 256-bin histogram Otsu threshold for values in [0,1]. Ties break toward
/// the smaller threshold. Throws DegenerateThresholdError when fewer than
/// two histogram bins are populated.
double otsu_threshold(std::span<const double> values);

/// Weight -> operator -> k smallest eigenpairs, with gamma and the weight
/// law recorded on the returned basis.
EigenBasis compute_eigenspace(const ScalarField& image, const DomainMask& mask,
                              const PipelineConfig& config);

/// Thresholds |phi_m| (min-max normalized over the domain) for each
/// requested index into a binary mask.
SegmentResult segment(const ScalarField& image, const DomainMask& mask,
                      const PipelineConfig& config);

struct DenoiseResult {
    ScalarField output;
    EigenBasis basis;
    Expansion expansion;
};

/// Truncated reconstruction: prolongation of the boundary data (or zero)
/// plus the first K coefficients of the eigen-expansion.
DenoiseResult denoise(const ScalarField& image, const DomainMask& mask,
                      const PipelineConfig& config);

struct DenoiseSegmentResult {
    ScalarField denoised;
    SegmentResult segmentation;
};

/// denoise, then segment the filtered image with a freshly computed
/// eigenspace of the filtered image.
DenoiseSegmentResult denoise_then_segment(const ScalarField& image, const DomainMask& mask,
                                          const PipelineConfig& config);

/// Dice overlap 2|A and B| / (|A| + |B|) of two binary fields over the
/// non-excluded nodes.
double dice(const ScalarField& a, const ScalarField& b, const DomainMask& mask);

}  // namespace eigenseg
