#include "doctest.h"

#include <cmath>
#include <random>

#include "nlos/phasor.hpp"
#include "test_support.hpp"

using namespace nlos;
using namespace nlos::phasor;

namespace {

TransientMeasurement one_pair(std::size_t n_bins, double dt, double t0) {
    TransientMeasurement m;
    m.relay = UniformGrid2D{1, 1, 1.0, 1.0, 0.0, 0.0, 0.0};
    m.illuminations = {{0.0, 0.0, 0.0}};
    m.n_bins = n_bins;
    m.dt = dt;
    m.t0 = t0;
    m.histograms.assign(n_bins, 0.0f);
    return m;
}

// Coefficient by a direct sum over bins, with the analysis sign opposite to propagation.
cplx direct(const TransientMeasurement& m, const PhasorKernel& k, std::size_t f) {
    cplx acc{};
    for (std::size_t b = 0; b < m.n_bins; ++b) {
        const double t = m.t0 + static_cast<double>(b) * m.dt;
        acc += static_cast<double>(m.histograms[b]) * std::polar(1.0, -kPropagationSign * k.frequencies[f] * t);
    }
    return acc * k.weights[f];
}

} // namespace

TEST_CASE("kernel weights") {
    const auto k = build_kernel(0.04, 4096, 16e-12);
    CHECK(k.weight(k.omega_c) == 1.0);
    CHECK(k.weight(k.omega_c + k.sigma) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(k.weight(k.omega_c - k.sigma) == doctest::Approx(0.6065306597).epsilon(1e-9));
    CHECK(k.sigma == doctest::Approx(kSpeedOfLight / 0.2));
    for (double w : k.weights) {
        CHECK(w >= k.threshold);
        CHECK(w <= 1.0);
    }
    // symmetry about omega_c on a grid where omega_c is a bin
    const double dt = 1e-11;
    const std::size_t n = 1000;
    const double step = 2.0 * kPi / (static_cast<double>(n) * dt);
    const double lambda = 2.0 * kPi * kSpeedOfLight / (100.0 * step);
    const auto s = build_kernel(lambda, n, dt);
    REQUIRE(s.count() % 2 == 1);
    for (std::size_t i = 0; i < s.count(); ++i)
        CHECK(s.weights[i] == doctest::Approx(s.weights[s.count() - 1 - i]).epsilon(1e-12));
    CHECK(s.weights[s.count() / 2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("retained count follows the bin grid") {
    const auto k = build_kernel(0.04, 4096, 16e-12);
    const double step = 2.0 * kPi / (4096 * 16e-12);
    std::size_t expected = 0;
    for (std::size_t b = 0; b <= 2048; ++b) {
        const double d = static_cast<double>(b) * step - k.omega_c;
        if (std::exp(-d * d / (2 * k.sigma * k.sigma)) >= 0.01) ++expected;
    }
    CHECK(k.count() == expected);
    CHECK(k.count() > 4096 / 100);
    CHECK(k.count() < 4096);
    MESSAGE("retained frequencies: " << k.count() << " of " << 4096 << " bins");
    CHECK(k.shortest_wavelength() == doctest::Approx(2 * kPi * kSpeedOfLight / k.frequencies.back()));
}

TEST_CASE("kernel errors") {
    CHECK_THROWS_AS((void)build_kernel(0.0, 100, 1e-11), ValidationError);
    CHECK_THROWS_AS((void)build_kernel(0.04, 100, 1e-11, 1.0), ValidationError);
    CHECK_THROWS_AS((void)build_kernel(0.04, 4, 1e-12), ValidationError);
}

TEST_CASE("transform of zeros and of a delta") {
    auto m = one_pair(512, 8e-12, 3e-10);
    const auto k = build_kernel(0.1, 512, 8e-12);
    auto f = to_frequency(m, k);
    for (auto c : f.coefficients) CHECK(c == cplx{});

    const std::size_t b = 77;
    m.histograms[b] = 1.0f;
    f = to_frequency(m, k);
    for (std::size_t i = 0; i < k.count(); ++i) {
        const cplx expect = std::polar(k.weights[i], -kPropagationSign * k.frequencies[i] * (m.t0 + b * m.dt));
        CHECK(std::abs(f.coefficients[i] - expect) <= 1e-10);
    }
}

TEST_CASE("two deltas against a direct sum") {
    auto m = one_pair(600, 1e-11, -2e-10);
    m.histograms[40] = 2.5f;
    m.histograms[301] = 0.75f;
    const auto k = build_kernel(0.15, 600, 1e-11);
    const auto f = to_frequency(m, k);
    for (std::size_t i = 0; i < k.count(); ++i) CHECK(std::abs(f.coefficients[i] - direct(m, k, i)) <= 1e-9);
}

TEST_CASE("transform is linear") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<float> u(0.0f, 3.0f);
    auto a = one_pair(256, 1e-11, 0.0), b = a, c = a;
    for (std::size_t i = 0; i < 256; ++i) {
        a.histograms[i] = u(rng);
        b.histograms[i] = u(rng);
        c.histograms[i] = 2.0f * a.histograms[i] + 0.5f * b.histograms[i];
    }
    const auto k = build_kernel(0.1, 256, 1e-11);
    const auto fa = to_frequency(a, k), fb = to_frequency(b, k), fc = to_frequency(c, k);
    std::vector<cplx> mix(fa.coefficients.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0 * fa.coefficients[i] + 0.5 * fb.coefficients[i];
    CHECK(testing::rel_l2(fc.coefficients, mix) <= 1e-6);  // float histograms
    CHECK_THROWS_AS((void)to_frequency(a, build_kernel(0.1, 256, 2e-11)), ValidationError);
}

TEST_CASE("lateral resolution") {
    CHECK(lateral_resolution(0.04, 1.8, 1.8) == doctest::Approx(1.22 * 0.04).epsilon(1e-12));
    CHECK(lateral_resolution(0.04, 1.8, 1.8) == doctest::Approx(0.0488).epsilon(1e-9));
    CHECK(lateral_resolution(0.04, 3.0, 1.8) == doctest::Approx(0.081333333).epsilon(1e-7));
    CHECK(lateral_resolution(0.04, 3.6, 1.8) == doctest::Approx(2.0 * lateral_resolution(0.04, 1.8, 1.8)));
    CHECK_THROWS_AS((void)lateral_resolution(0.04, 0.0, 1.8), ValidationError);
}

TEST_CASE("sampling report") {
    auto r = sampling_report(2.0, 1.0, 0.04, false);
    CHECK(r.ratio == doctest::Approx(1.0));
    CHECK_FALSE(r.admits(1.5));
    CHECK(r.max_integer_factor() == 1);

    r = sampling_report(1.0, 2.5, 0.04, false);
    CHECK(r.ratio == doctest::Approx(5.0));
    CHECK(r.admits(4.0));
    CHECK_FALSE(r.admits(5.0));
    CHECK(r.max_integer_factor() == 4);
    CHECK(r.lambda_sz == doctest::Approx(0.02));
    CHECK(r.lambda_sx == doctest::Approx(0.1));

    const auto c = sampling_report(1.0, 2.5, 0.04, true);
    CHECK(c.ratio == r.ratio);
    CHECK(c.lambda_sz == doctest::Approx(r.lambda_sz / 2.0));

    for (double s : {0.01, 3.0, 250.0}) CHECK(sampling_report(s, 2.5 * s, 0.04, false).ratio == doctest::Approx(5.0));
    CHECK(sampling_report(-1.0, -2.5, 0.04, false).ratio == doctest::Approx(5.0));

    const auto u = sampling_report(0.0, 1.0, 0.04, false);
    CHECK(u.unbounded());
    CHECK(u.admits(1000.0));
    CHECK_THROWS_AS((void)sampling_report(1.0, 1.0, 0.0, false), ValidationError);
}

TEST_CASE("frustum volume") {
    const auto v = frustum_volume(4, 4, 0, 4, 0.5, 0.5);
    CHECK(v.frustum == doctest::Approx(277.33).epsilon(0.5 / 277.33));
    CHECK(v.frustum == doctest::Approx(832.0 / 3.0).epsilon(1e-12));
    CHECK(v.cuboid == 64.0);
    CHECK(v.difference == doctest::Approx(213.33).epsilon(1e-4));
    CHECK(std::round(v.increase_percent) == 333.0);

    // cuboid limit
    const auto big = frustum_volume(3, 2, 1, 4, 1e9, 1e9);
    CHECK(big.frustum == doctest::Approx(18.0).epsilon(1e-8));

    // asymmetric case against a trapezoid rule over 1e4 slabs
    const double x = 2.0, y = 3.0, z0 = 0.5, z1 = 3.5, a = 0.5, b = 1.0;
    const int n = 10000;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double h = (z1 - z0) * i / n;
        const double area = (x + h / a) * (y + h / b);
        sum += (i == 0 || i == n ? 0.5 : 1.0) * area;
    }
    sum *= (z1 - z0) / n;
    CHECK(frustum_volume(x, y, z0, z1, a, b).frustum == doctest::Approx(sum).epsilon(1e-6));

    for (double s : {0.1, 0.5, 1.0}) CHECK(frustum_volume(1, 2, 0, 2, s, s).difference >= 0.0);
    CHECK_THROWS_AS((void)frustum_volume(4, 4, 4, 0, 0.5, 0.5), ValidationError);
    CHECK_THROWS_AS((void)frustum_volume(4, 4, 0, 4, 0.0, 0.5), ValidationError);
}

TEST_CASE("scale bounds") {
    const auto s = scale_bounds(0.01, 0.04, 1.8, 3.0);
    CHECK(s.delta_out_max == doctest::Approx(0.040667).epsilon(1e-4));
    CHECK(s.alpha_min == doctest::Approx(0.2459).epsilon(1e-3));
    const auto e = scale_bounds(s.delta_out_max, 0.04, 1.8, 3.0);
    CHECK(e.alpha_min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(scale_bounds(0.01, 0.04, 1.8, 1.5).delta_out_max == doctest::Approx(s.delta_out_max / 2.0));
}

TEST_CASE("compression factor") {
    CHECK(compression_factor(100, 5, 4000, 400) == 125.0);
    CHECK(compression_factor(64, 1, 1000, 500) == 1.0);
    CHECK(compression_factor(64, 2, 2048, 200) == doctest::Approx(20.48));
    CHECK(compression_factor(12, 5, 100, 10) == doctest::Approx(144.0 * 100.0 / (4.0 * 20.0)));
    CHECK_THROWS_AS((void)compression_factor(4, 5, 100, 10), ValidationError);
}
