#include "eigenseg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "eigenseg/rng.hpp"

namespace eigenseg {

namespace {

// Ramp intervals of the two-object profile: intensity changes linearly
// inside each interval and is flat outside. Objects sit on [0.2,0.3) and
// [0.9,0.95) at height 1 over a zero baseline.
struct Ramp {
    double lo, hi;
    double from, to;
};
constexpr Ramp kProfileRamps[] = {
    {0.19, 0.20, 0.0, 1.0},
    {0.30, 0.31, 1.0, 0.0},
    {0.89, 0.90, 0.0, 1.0},
    {0.95, 0.96, 1.0, 0.0},
};

double profile_value(double x) {
    double level = 0.0;
    for (const Ramp& r : kProfileRamps) {
        if (x < r.lo) break;
        if (x < r.hi) {
            const double t = (x - r.lo) / (r.hi - r.lo);
            return r.from + t * (r.to - r.from);
        }
        level = r.to;
    }
    return level;
}

Phantom make_profile1d(const PhantomSpec& spec) {
    const int n = spec.resolution;
    Phantom p;
    p.image = ScalarField(n, 1);
    const double h = p.image.spacing();
    for (int i = 0; i < n; ++i) {
        p.image.values[i] = profile_value(i * h);
    }
    // Ground truth per object: nodes at intensity >= 0.5, i.e. the plateau
    // plus the upper half of each ramp.
    const double spans[2][2] = {{0.195, 0.305}, {0.895, 0.955}};
    for (const auto& s : spans) {
        ScalarField mask(n, 1);
        for (int i = 0; i < n; ++i) {
            const double x = i * h;
            mask.values[i] = (x >= s[0] && x <= s[1] && p.image.values[i] >= 0.5) ? 1.0 : 0.0;
        }
        p.truth.push_back(std::move(mask));
    }
    return p;
}

ScalarField disk_mask(int n, double cx, double cy, double r) {
    ScalarField mask(n, n);
    const double h = mask.spacing();
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double dx = x * h - cx;
            const double dy = y * h - cy;
            mask.at(x, y) = (dx * dx + dy * dy <= r * r) ? 1.0 : 0.0;
        }
    }
    return mask;
}

void check_disk(double cx, double cy, double r) {
    if (r <= 0.0 || cx - r < 0.0 || cx + r > 1.0 || cy - r < 0.0 || cy + r > 1.0) {
        throw ContractError("phantom disk leaves the unit square");
    }
}

Phantom make_two_disks(const PhantomSpec& spec) {
    check_disk(spec.disk1_x, spec.disk1_y, spec.disk1_r);
    check_disk(spec.disk2_x, spec.disk2_y, spec.disk2_r);
    const double dx = spec.disk1_x - spec.disk2_x;
    const double dy = spec.disk1_y - spec.disk2_y;
    if (std::sqrt(dx * dx + dy * dy) <= spec.disk1_r + spec.disk2_r) {
        throw ContractError("phantom disks overlap");
    }
    const int n = spec.resolution;
    Phantom p;
    p.truth.push_back(disk_mask(n, spec.disk1_x, spec.disk1_y, spec.disk1_r));
    p.truth.push_back(disk_mask(n, spec.disk2_x, spec.disk2_y, spec.disk2_r));
    p.image = ScalarField(n, n);
    for (std::size_t i = 0; i < p.image.size(); ++i) {
        p.image.values[i] = std::max(p.truth[0].values[i], p.truth[1].values[i]);
    }
    return p;
}

// Separable box blur, edge-clamped, three passes per axis. radius is in
// unit coordinates and converted to whole cells.
ScalarField box_blur(const ScalarField& in, double radius) {
    const int r = static_cast<int>(std::floor(radius / in.spacing() + 0.5));
    if (r <= 0) return in;
    ScalarField a = in;
    ScalarField b(in.width, in.height);
    auto pass = [&](const ScalarField& src, ScalarField& dst, bool horizontal) {
        const double inv = 1.0 / (2 * r + 1);
        for (int y = 0; y < src.height; ++y) {
            for (int x = 0; x < src.width; ++x) {
                double sum = 0.0;
                for (int t = -r; t <= r; ++t) {
                    int xx = horizontal ? x + t : x;
                    int yy = horizontal ? y : y + t;
                    xx = std::clamp(xx, 0, src.width - 1);
                    yy = std::clamp(yy, 0, src.height - 1);
                    sum += src.at(xx, yy);
                }
                dst.at(x, y) = sum * inv;
            }
        }
    };
    for (int i = 0; i < 3; ++i) {
        pass(a, b, true);
        if (in.height > 1) {
            pass(b, a, false);
        } else {
            a = b;
        }
    }
    return a;
}

Phantom make_blob(const PhantomSpec& spec) {
    check_disk(spec.blob_x, spec.blob_y, spec.blob_r);
    const int n = spec.resolution;
    Phantom p;
    p.truth.push_back(disk_mask(n, spec.blob_x, spec.blob_y, spec.blob_r));
    p.image = box_blur(p.truth[0], spec.blur_radius);
    return p;
}

Phantom make_step1d(const PhantomSpec& spec) {
    if (spec.step_position <= 0.0 || spec.step_position >= 1.0) {
        throw ContractError("step position must lie inside (0,1)");
    }
    const int n = spec.resolution;
    Phantom p;
    p.image = ScalarField(n, 1);
    const double h = p.image.spacing();
    for (int i = 0; i < n; ++i) {
        p.image.values[i] = (i * h < spec.step_position) ? 0.0 : 1.0;
    }
    ScalarField mask = p.image;  // the high side is the object
    p.truth.push_back(std::move(mask));
    return p;
}

}  // namespace

Phantom make_phantom(const PhantomSpec& spec) {
    if (spec.resolution < 3) {
        throw ContractError("phantom resolution must be >= 3");
    }
    switch (spec.kind) {
        case PhantomKind::profile1d: return make_profile1d(spec);
        case PhantomKind::two_disks: return make_two_disks(spec);
        case PhantomKind::blob_with_blur: return make_blob(spec);
        case PhantomKind::step1d: return make_step1d(spec);
    }
    throw ContractError("unknown phantom kind");
}

ScalarField add_noise(const ScalarField& image, const NoiseSpec& spec) {
    if (spec.delta < 0.0) {
        throw ContractError("noise level must be >= 0");
    }
    ScalarField out = image;
    if (spec.delta == 0.0) return out;
    const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t c = static_cast<std::uint64_t>(i);
        const double xi = spec.distribution == NoiseDistribution::uniform01
                              ? rng::unit_open(spec.seed, c)
                              : rng::gaussian(spec.seed, c);
        out.values[i] = image.values[i] * (1.0 + spec.delta * xi);
    }
    return out;
}

}  // namespace eigenseg
