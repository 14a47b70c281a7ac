#include "doctest.h"

#include <cmath>
#include <random>

#include "nlos/metrics.hpp"

using namespace nlos;
using namespace nlos::metrics;

namespace {

Image random_image(std::size_t nx, std::size_t ny, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Image im{nx, ny, std::vector<double>(nx * ny)};
    for (auto& p : im.pixels) p = u(rng);
    return im;
}

Image smooth_blob(std::size_t n, double cx, double cy) {
    Image im{n, n, std::vector<double>(n * n)};
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
            im.pixels[y * n + x] = std::exp(-(dx * dx + dy * dy) / 8.0) + 0.3 * std::exp(-(dx + 3) * (dx + 3) / 20.0);
        }
    return im;
}

// Independent windowed SSIM written directly from the definition.
double ssim_reference(const Image& a, const Image& b, double range) {
    const double c1 = std::pow(0.01 * range, 2), c2 = std::pow(0.03 * range, 2);
    double sum = 0.0;
    int n = 0;
    for (std::size_t y0 = 0; y0 + 8 <= a.ny; ++y0)
        for (std::size_t x0 = 0; x0 + 8 <= a.nx; ++x0) {
            std::vector<double> pa, pb;
            for (std::size_t y = y0; y < y0 + 8; ++y)
                for (std::size_t x = x0; x < x0 + 8; ++x) {
                    pa.push_back(a.at(x, y));
                    pb.push_back(b.at(x, y));
                }
            double ma = 0, mb = 0;
            for (int i = 0; i < 64; ++i) {
                ma += pa[i] / 64;
                mb += pb[i] / 64;
            }
            double va = 0, vb = 0, cv = 0;
            for (int i = 0; i < 64; ++i) {
                va += (pa[i] - ma) * (pa[i] - ma) / 64;
                vb += (pb[i] - mb) * (pb[i] - mb) / 64;
                cv += (pa[i] - ma) * (pb[i] - mb) / 64;
            }
            sum += (2 * ma * mb + c1) * (2 * cv + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++n;
        }
    return sum / n;
}

} // namespace

TEST_CASE("alignment recovers shifts") {
    const auto a = smooth_blob(20, 9.0, 10.0);
    CHECK(align_by_correlation(a, a) == Shift{0, 0});
    const auto b = shift_image(a, {3, -2});
    CHECK(align_by_correlation(a, b) == Shift{3, -2});
    const Image flat{6, 6, std::vector<double>(36, 2.0)};
    CHECK(align_by_correlation(flat, flat) == Shift{0, 0});
    CHECK_THROWS_AS((void)align_by_correlation(flat, Image{5, 6, std::vector<double>(30, 1.0)}), ValidationError);
}

TEST_CASE("shift fills with zeros") {
    const Image a{3, 2, {1, 2, 3, 4, 5, 6}};
    const auto s = shift_image(a, {1, 1});
    CHECK(s.pixels == std::vector<double>{0, 0, 0, 0, 1, 2});
}

TEST_CASE("ssim") {
    std::mt19937_64 rng(8);
    const auto a = random_image(16, 16, rng);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-14));

    // zero mean inside every even-sized window
    Image za{16, 16, std::vector<double>(256)}, neg = za;
    for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 16; ++x) {
            za.pixels[y * 16 + x] = ((x + y) % 2 ? -1.0 : 1.0) + 0.5 * (x % 2 ? -1.0 : 1.0);
            neg.pixels[y * 16 + x] = -za.pixels[y * 16 + x];
        }
    CHECK(ssim(za, neg) < 0.0);

    const auto b = random_image(16, 16, rng);
    const auto [lo, hi] = std::minmax_element(a.pixels.begin(), a.pixels.end());
    CHECK(ssim(a, b) == doctest::Approx(ssim_reference(a, b, *hi - *lo)).epsilon(1e-10));
    CHECK(std::abs(ssim(a, b, 1.0) - ssim(b, a, 1.0)) <= 1e-12);

    const Image flat{16, 16, std::vector<double>(256, 0.5)};
    CHECK_THROWS_AS((void)ssim(flat, a), ValidationError);
}

TEST_CASE("ncc") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d;
    std::vector<cplx> a(50), b(50);
    for (auto& x : a) x = {d(rng), d(rng)};
    for (auto& x : b) x = {d(rng), d(rng)};
    CHECK(ncc(a, a) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<cplx> twice(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) twice[i] = 2.0 * a[i];
    CHECK(ncc(a, twice) == doctest::Approx(1.0).epsilon(1e-14));

    // direct Pearson of magnitudes
    std::vector<double> ma, mb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma.push_back(std::abs(a[i]));
        mb.push_back(std::abs(b[i]));
    }
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        sa += ma[i];
        sb += mb[i];
    }
    sa /= 50;
    sb /= 50;
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        num += (ma[i] - sa) * (mb[i] - sb);
        da += (ma[i] - sa) * (ma[i] - sa);
        db += (mb[i] - sb) * (mb[i] - sb);
    }
    CHECK(ncc(a, b) == doctest::Approx(num / std::sqrt(da * db)).epsilon(1e-12));

    // affine invariance on real inputs
    std::vector<double> affine(ma.size());
    for (std::size_t i = 0; i < ma.size(); ++i) affine[i] = 3.0 * ma[i] + 7.0;
    CHECK(pearson(ma, mb) == doctest::Approx(pearson(affine, mb)).epsilon(1e-12));

    CHECK_THROWS_AS((void)ncc(std::vector<cplx>(4, cplx{1, 0}), std::vector<cplx>(4)), ValidationError);
    CHECK_THROWS_AS((void)ncc(a, std::vector<cplx>(3)), ValidationError);
}

TEST_CASE("normalization") {
    const Image a{2, 2, {0.0, -4.0, 2.0, 1.0}};
    CHECK(normalized(a).pixels == std::vector<double>{0.0, -1.0, 0.5, 0.25});
    const Image z{2, 1, {0.0, 0.0}};
    CHECK(normalized(z).pixels == z.pixels);
}
