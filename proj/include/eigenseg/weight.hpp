#pragma once

#include <string>

#include "eigenseg/field.hpp"

namespace eigenseg {

enum class WeightKind { lorentzian, penalized_tv };

/// Which diffusivity law turns image gradients into the weight mu, and its
/// parameters. gamma == 0 means "compute gamma from the image".
struct WeightLaw {
    WeightKind kind = WeightKind::lorentzian;
    double gamma = 0.0;    // lorentzian contrast parameter, > 0 when set
    double epsilon = 0.01; // penalized-TV smoothing, > 0
};

std::string weight_law_name(WeightKind kind);

/// Scalar weight field mu(x) > 0. Carries the law it was built with.
struct WeightField {
    ScalarField mu;
    WeightKind kind = WeightKind::lorentzian;
    double gamma = 0.0;
    double epsilon = 0.0;
};

struct GammaResult {
    double value = 1.0;
    bool degenerate = false;  // constant image, fallback gamma = 1
};

/// gamma = max over interior nodes of |grad I|. Constant images (max below
/// 1e-12) fall back to gamma = 1 with the degenerate flag set; the operator
/// then reduces to the plain Laplacian.
GammaResult compute_gamma(const ScalarField& image, const DomainMask& mask);

/// mu = gamma / (1 + gamma*|grad I|^2)^2. Satisfies 0 < mu <= gamma.
WeightField lorentzian_weight(const ScalarField& grad_squared, double gamma);

/// mu = 1 / sqrt(|grad I|^2 + epsilon^2). Satisfies 0 < mu <= 1/epsilon.
WeightField tv_weight(const ScalarField& grad_squared, double epsilon);

}  // namespace eigenseg
