#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "eigenseg/rng.hpp"
#include "eigenseg/synth.hpp"

using namespace eigenseg;

TEST_CASE("counter rng is pure and uniform-ish") {
    CHECK(rng::mix(1, 2) == rng::mix(1, 2));
    CHECK(rng::mix(1, 2) != rng::mix(1, 3));
    CHECK(rng::mix(2, 2) != rng::mix(1, 2));
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng::unit_open(42, i);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("profile phantom values") {
    PhantomSpec spec;
    spec.kind = PhantomKind::profile1d;
    spec.resolution = 1001;
    Phantom p = make_phantom(spec);
    const double h = p.image.spacing();
    auto value_at = [&](double x) { return p.image.values[static_cast<int>(std::round(x / h))]; };
    CHECK(value_at(0.25) == 1.0);
    CHECK(value_at(0.5) == 0.0);
    CHECK(value_at(0.92) == 1.0);
    CHECK(value_at(0.0) == 0.0);
    CHECK(value_at(1.0) == 0.0);
    // linear ramp midpoint
    CHECK(value_at(0.195) == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(p.truth.size() == 2);
    // truth masks are where intensity reaches 0.5, split per object
    CHECK(p.truth[0].values[250] == 1.0);
    CHECK(p.truth[0].values[920] == 0.0);
    CHECK(p.truth[1].values[920] == 1.0);
}

TEST_CASE("two disks are disjoint and inside") {
    PhantomSpec spec;
    spec.kind = PhantomKind::two_disks;
    spec.resolution = 64;
    Phantom p = make_phantom(spec);
    REQUIRE(p.truth.size() == 2);
    for (std::size_t i = 0; i < p.image.size(); ++i) {
        CHECK(p.truth[0].values[i] * p.truth[1].values[i] == 0.0);
        CHECK(p.image.values[i] == std::max(p.truth[0].values[i], p.truth[1].values[i]));
    }
    PhantomSpec overlapping = spec;
    overlapping.disk2_x = 0.4;
    overlapping.disk2_y = 0.4;
    CHECK_THROWS_AS(make_phantom(overlapping), ContractError);
    PhantomSpec outside = spec;
    outside.disk1_x = 0.05;
    CHECK_THROWS_AS(make_phantom(outside), ContractError);
}

TEST_CASE("blob blur radius zero is the sharp disk") {
    PhantomSpec spec;
    spec.kind = PhantomKind::blob_with_blur;
    spec.resolution = 64;
    spec.blur_radius = 0.0;
    Phantom sharp = make_phantom(spec);
    for (std::size_t i = 0; i < sharp.image.size(); ++i) {
        CHECK(sharp.image.values[i] == sharp.truth[0].values[i]);
    }
    spec.blur_radius = 0.05;
    Phantom blurred = make_phantom(spec);
    double diff = 0.0;
    for (std::size_t i = 0; i < sharp.image.size(); ++i) {
        diff = std::max(diff, std::abs(blurred.image.values[i] - sharp.image.values[i]));
        CHECK(blurred.image.values[i] >= -1e-12);
        CHECK(blurred.image.values[i] <= 1.0 + 1e-12);
    }
    CHECK(diff > 0.2);  // edges actually softened
}

TEST_CASE("phantoms are resolution-consistent") {
    // coarse nodes at even fine indices; mismatches may only sit within a
    // cell of a transition
    PhantomSpec coarse;
    coarse.kind = PhantomKind::profile1d;
    coarse.resolution = 501;
    PhantomSpec fine = coarse;
    fine.resolution = 1001;
    Phantom pc = make_phantom(coarse);
    Phantom pf = make_phantom(fine);
    const double hc = pc.image.spacing();
    for (int i = 0; i < coarse.resolution; ++i) {
        const double avg = pf.image.values[2 * i];
        if (std::abs(avg - pc.image.values[i]) > 1e-12) {
            const double x = i * hc;
            const bool near_ramp = (x > 0.19 - hc && x < 0.20 + hc) ||
                                   (x > 0.30 - hc && x < 0.31 + hc) ||
                                   (x > 0.89 - hc && x < 0.90 + hc) ||
                                   (x > 0.95 - hc && x < 0.96 + hc);
            CHECK(near_ramp);
        }
    }
}

TEST_CASE("noise determinism and distribution") {
    ScalarField base(400, 250, 0.5);
    NoiseSpec spec;
    spec.delta = 1.2;
    spec.distribution = NoiseDistribution::gaussian01;
    spec.seed = 99;
    ScalarField a = add_noise(base, spec);
    ScalarField b = add_noise(base, spec);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.values[i] == b.values[i]);  // bitwise
    }
    spec.seed = 100;
    ScalarField c = add_noise(base, spec);
    int differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) differing += a.values[i] != c.values[i];
    CHECK(differing > 90000);

    // sample statistics of (out/in - 1): mean 0 +- 0.01, std 1.2 +- 0.02
    double mean = 0.0;
    const double n = static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mean += a.values[i] / 0.5 - 1.0;
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values[i] / 0.5 - 1.0 - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / (n - 1.0));
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sd - 1.2) < 0.02);
}

TEST_CASE("uniform noise bounds and delta zero") {
    ScalarField base(101, 1);
    for (int i = 0; i < 101; ++i) base.values[i] = 0.3 + 0.5 * rng::unit_open(5, i);
    NoiseSpec spec;
    spec.delta = 0.0;
    ScalarField same = add_noise(base, spec);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(same.values[i] == base.values[i]);

    spec.delta = 0.2;
    spec.distribution = NoiseDistribution::uniform01;
    ScalarField noisy = add_noise(base, spec);
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(noisy.values[i] >= base.values[i]);
        CHECK(noisy.values[i] <= 1.2 * base.values[i]);
    }
    spec.delta = -0.1;
    CHECK_THROWS_AS(add_noise(base, spec), ContractError);
}
