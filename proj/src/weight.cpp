#include "eigenseg/weight.hpp"

#include <cmath>

namespace eigenseg {

std::string weight_law_name(WeightKind kind) {
    return kind == WeightKind::lorentzian ? "lorentzian" : "penalized_tv";
}

GammaResult compute_gamma(const ScalarField& image, const DomainMask& mask) {
    const GradientField g = gradient(image, mask);
    double max_sq = 0.0;
    for (int node : mask.interior_nodes) {
        const double gy = g.gy.empty() ? 0.0 : g.gy[node];
        max_sq = std::max(max_sq, g.gx[node] * g.gx[node] + gy * gy);
    }
    const double gamma = std::sqrt(max_sq);
    if (gamma < 1e-12) {
        return {1.0, true};
    }
    return {gamma, false};
}

namespace {

void check_grad_squared(const ScalarField& grad_squared) {
    for (double v : grad_squared.values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ContractError("|grad|^2 field must be finite and non-negative");
        }
    }
}

}  // namespace

WeightField lorentzian_weight(const ScalarField& grad_squared, double gamma) {
    if (!(gamma > 0.0)) {
        throw ContractError("lorentzian weight requires gamma > 0");
    }
    check_grad_squared(grad_squared);
    WeightField w;
    w.kind = WeightKind::lorentzian;
    w.gamma = gamma;
    w.mu = ScalarField(grad_squared.width, grad_squared.height);
    const std::int64_t n = static_cast<std::int64_t>(w.mu.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = 1.0 + gamma * grad_squared.values[i];
        w.mu.values[i] = gamma / (d * d);
    }
    return w;
}

WeightField tv_weight(const ScalarField& grad_squared, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ContractError("penalized-TV weight requires epsilon > 0");
    }
    check_grad_squared(grad_squared);
    WeightField w;
    w.kind = WeightKind::penalized_tv;
    w.epsilon = epsilon;
    w.mu = ScalarField(grad_squared.width, grad_squared.height);
    const std::int64_t n = static_cast<std::int64_t>(w.mu.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        w.mu.values[i] = 1.0 / std::sqrt(grad_squared.values[i] + epsilon * epsilon);
    }
    return w;
}

}  // namespace eigenseg
