#include "oscbath/bath.hpp"

#include "doctest.h"

#include <cstdio>
#include <fstream>

using namespace oscbath;

TEST_SUITE_BEGIN("bath");

TEST_CASE("uniform-flat placement") {
    SpectralModel sm;
    sm.kind = SpectralKind::uniform_flat;
    sm.nu_max = 1.0;
    sm.coupling_scale = 1.0;
    const BathSpec b = generate(sm, 4);
    CHECK(b.nu[0] == 0.25);
    CHECK(b.nu[1] == 0.5);
    CHECK(b.nu[2] == 0.75);
    CHECK(b.nu[3] == 1.0);
    for (Index a = 0; a < 4; ++a) CHECK(b.g[a] == 0.5);
}

TEST_CASE("coupling-strength normalization: sum g^2 = c^2") {
    SpectralModel sm;
    sm.kind = SpectralKind::uniform_flat;
    sm.nu_max = 2.0;
    sm.coupling_scale = 0.7;
    for (Index n : {1, 3, 16, 100}) {
        const BathSpec b = generate(sm, n);
        CHECK(std::abs(b.g.squaredNorm() - 0.49) <= 4e-16);
        CHECK(b.nu.maxCoeff() <= sm.nu_max);
        CHECK(b.nu.minCoeff() > 0.0);
    }
}

TEST_CASE("explicit list passthrough") {
    SpectralModel sm;
    sm.kind = SpectralKind::explicit_list;
    sm.nu_max = 1.0;
    sm.frequencies = Vector::Ones(1);
    sm.couplings = Vector::Constant(1, 0.1);
    const BathSpec b = generate(sm, 1);
    CHECK(b.nu[0] == 1.0);
    CHECK(b.g[0] == 0.1);
    CHECK(b.nu_max == 1.0);
}

TEST_CASE("band-limited placement") {
    SpectralModel sm;
    sm.kind = SpectralKind::band_limited;
    sm.nu_max = 1.0;
    sm.band_lo = 0.2;
    sm.band_hi = 0.8;
    sm.coupling_scale = 1.0;
    const BathSpec b3 = generate(sm, 3);
    CHECK(b3.nu[0] == 0.2);
    CHECK(std::abs(b3.nu[1] - 0.5) <= 1e-15);
    CHECK(b3.nu[2] == 0.8);
    const BathSpec b1 = generate(sm, 1);
    CHECK(b1.nu[0] == 0.5);
}

TEST_CASE("regeneration is bit-identical") {
    SpectralModel sm;
    sm.kind = SpectralKind::uniform_flat;
    sm.nu_max = 1.7;
    sm.coupling_scale = 0.3;
    sm.seed = 99;
    const BathSpec a = generate(sm, 37);
    const BathSpec b = generate(sm, 37);
    CHECK(a.nu == b.nu);
    CHECK(a.g == b.g);
}

TEST_CASE("invalid inputs") {
    SpectralModel sm;
    sm.kind = SpectralKind::uniform_flat;
    sm.nu_max = 1.0;
    sm.coupling_scale = 1.0;
    CHECK_THROWS_AS(generate(sm, 0), std::invalid_argument);

    SpectralModel band = sm;
    band.kind = SpectralKind::band_limited;
    band.band_lo = 0.5;
    band.band_hi = 1.5;  // above nu_max
    CHECK_THROWS_AS(generate(band, 2), std::invalid_argument);

    SpectralModel zero_nu;
    zero_nu.kind = SpectralKind::explicit_list;
    zero_nu.nu_max = 1.0;
    zero_nu.frequencies = Vector::Zero(1);
    zero_nu.couplings = Vector::Ones(1);
    CHECK_THROWS_AS(generate(zero_nu, 1), std::invalid_argument);
}

TEST_CASE("csv round trip") {
    const std::string path = "bath_test_tmp.csv";
    {
        std::ofstream out(path);
        out << "nu,g\n0.5,0.1\n1.5,-0.2\n";
    }
    const BathSpec b = bath_from_csv(path);
    CHECK(b.nu.size() == 2);
    CHECK(b.nu[0] == 0.5);
    CHECK(b.nu[1] == 1.5);
    CHECK(b.g[1] == -0.2);
    CHECK(b.nu_max == 1.5);

    {
        std::ofstream out(path);
        out << "nu,g\nnot,a,number\n";
    }
    CHECK_THROWS_AS(bath_from_csv(path), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_SUITE_END();
