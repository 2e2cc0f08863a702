#pragma once

#include <cstdint>
#include <vector>

#include "eigenseg/field.hpp"

namespace eigenseg {

enum class PhantomKind { profile1d, two_disks, blob_with_blur, step1d };

/// Geometry of a synthetic test image. All coordinates live in [0,1]^d and
/// intensities in [0,1].
struct PhantomSpec {
    PhantomKind kind = PhantomKind::profile1d;
    int resolution = 101;  // nodes along the longest axis

    // two_disks / blob_with_blur geometry (unit coordinates). The radii
    // differ on purpose: equal disks would make the operator's low
    // eigenvalues exactly degenerate and the eigenfunctions arbitrary
    // mixtures across the two objects instead of one object each.
    double disk1_x = 0.33, disk1_y = 0.35, disk1_r = 0.11;
    double disk2_x = 0.67, disk2_y = 0.65, disk2_r = 0.15;
    double blob_x = 0.5, blob_y = 0.5, blob_r = 0.22;
    double blur_radius = 0.0;  // box-blur radius in unit coordinates; 0 = sharp

    // step1d: jump position
    double step_position = 0.5;
};

struct Phantom {
    ScalarField image;
    std::vector<ScalarField> truth;  // one binary (0/1) mask per object
};

/// Deterministic phantom generator. Returns the image together with the
/// ground-truth object masks known by construction.
Phantom make_phantom(const PhantomSpec& spec);

enum class NoiseDistribution { uniform01, gaussian01 };

struct NoiseSpec {
    double delta = 0.0;  // noise level, >= 0
    NoiseDistribution distribution = NoiseDistribution::gaussian01;
    std::uint64_t seed = 0;
};

/// Multiplicative noise out_i = in_i * (1 + delta * xi_i). xi is drawn per
/// node from a counter-based generator, so a fixed seed gives a bitwise
/// identical noise field regardless of threading or platform.
ScalarField add_noise(const ScalarField& image, const NoiseSpec& spec);

}  // namespace eigenseg
