#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hypmass/periodic.hpp"
#include "support/oracles.hpp"

using hypmass::periodic::GridFunction;
using hypmass::periodic::two_pi;
using oracles::pi;

TEST_CASE("grid nodes and sampling", "[periodic]") {
    auto f = GridFunction::sample(8, [](double phi) { return std::cos(phi); });
    REQUIRE(f.size() == 8);
    CHECK(f.node(0) == 0.0);
    CHECK(f.node(2) == Catch::Approx(pi / 2));
    CHECK(f[0] == Catch::Approx(1.0));
    CHECK(f[4] == Catch::Approx(-1.0));
}

TEST_CASE("mean and integral of a trig polynomial are exact", "[periodic]") {
    auto f = GridFunction::sample(16, [](double phi) { return 2.0 + std::cos(phi) - 0.25 * std::sin(3 * phi); });
    CHECK(f.mean() == Catch::Approx(2.0).margin(1e-14));
    CHECK(f.integral() == Catch::Approx(2.0 * two_pi).margin(1e-13));
}

TEST_CASE("periodic trapezoid quadrature is spectrally accurate", "[periodic]") {
    // Modified Bessel identity: the integral of exp(cos phi) over a period is
    // 2 pi I0(1) = 7.95492652101284527...
    auto f = GridFunction::sample(32, [](double phi) { return std::exp(std::cos(phi)); });
    CHECK(f.integral() == Catch::Approx(7.95492652101284527).margin(1e-13));
}

TEST_CASE("min and max", "[periodic]") {
    auto f = GridFunction::sample(64, [](double phi) { return 1.5 + std::sin(phi); });
    CHECK(f.min() == Catch::Approx(0.5).margin(1e-3));
    CHECK(f.max() == Catch::Approx(2.5).margin(1e-3));
}

TEST_CASE("spectral derivative of a smooth function", "[periodic]") {
    auto f = GridFunction::sample(64, [](double phi) { return std::exp(std::sin(phi)); });
    auto d1 = f.derivative(1);
    auto d2 = f.derivative(2);
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double phi = f.node(j);
        const double e = std::exp(std::sin(phi));
        CHECK(d1[j] == Catch::Approx(e * std::cos(phi)).margin(1e-11));
        CHECK(d2[j] == Catch::Approx(e * (std::cos(phi) * std::cos(phi) - std::sin(phi))).margin(1e-9));
    }
}

TEST_CASE("interpolation is exact at nodes and for resolved trig polynomials", "[periodic]") {
    auto poly = [](double phi) { return 0.7 + std::cos(3 * phi + 0.3) - 0.4 * std::sin(5 * phi); };
    for (std::size_t n : {std::size_t(16), std::size_t(15)}) {
        auto f = GridFunction::sample(n, poly);
        for (std::size_t j = 0; j < n; ++j) CHECK(f.interpolate(f.node(j)) == f[j]);
        for (double phi : {0.123, 1.9, 3.7, 6.1}) {
            INFO("n = " << n << ", phi = " << phi);
            CHECK(f.interpolate(phi) == Catch::Approx(poly(phi)).margin(1e-12));
        }
    }
}

TEST_CASE("interpolation of a smooth non-polynomial function converges spectrally", "[periodic]") {
    auto g = [](double phi) { return std::exp(std::cos(phi)); };
    auto f = GridFunction::sample(64, g);
    for (double phi : {0.456, 2.22, 5.0}) {
        CHECK(f.interpolate(phi) == Catch::Approx(g(phi)).margin(1e-12));
    }
}

TEST_CASE("resample round-trips through the interpolant", "[periodic]") {
    auto g = [](double phi) { return 1.0 + 0.3 * std::cos(2 * phi) + 0.1 * std::sin(phi); };
    auto f = GridFunction::sample(16, g);
    auto up = f.resample(64);
    REQUIRE(up.size() == 64);
    for (std::size_t j = 0; j < up.size(); ++j)
        CHECK(up[j] == Catch::Approx(g(up.node(j))).margin(1e-12));
    auto same = f.resample(16);
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(same[j] == f[j]);
}

TEST_CASE("arithmetic and validation", "[periodic]") {
    auto a = GridFunction::constant(8, 2.0);
    auto b = GridFunction::sample(8, [](double phi) { return std::cos(phi); });
    auto sum = a + b;
    CHECK(sum[0] == Catch::Approx(3.0));
    auto scaled = 2.0 * b;
    CHECK(scaled[0] == Catch::Approx(2.0));
    auto diff = sum - b;
    CHECK(diff[3] == Catch::Approx(2.0).margin(1e-14));

    auto c = GridFunction::constant(4, 1.0);
    CHECK_THROWS_AS(a + c, hypmass::input_error);
    CHECK_THROWS_AS(GridFunction(std::vector<double>{}), hypmass::input_error);
}
