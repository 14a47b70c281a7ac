#include "nlos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

namespace nlos::metrics {

void Image::validate() const {
    if (nx == 0 || ny == 0) throw ValidationError("image must not be empty");
    if (pixels.size() != nx * ny) throw ValidationError("image pixel count does not match its shape");
    for (double p : pixels)
        if (!std::isfinite(p)) throw ValidationError("image holds a non-finite pixel");
}

namespace {

void check_pair(const Image& a, const Image& b) {
    a.validate();
    b.validate();
    if (a.nx != b.nx || a.ny != b.ny) throw ValidationError("images differ in shape");
}

} // namespace

Image shift_image(const Image& in, Shift s) {
    Image out{in.nx, in.ny, std::vector<double>(in.pixels.size(), 0.0)};
    const long nx = static_cast<long>(in.nx), ny = static_cast<long>(in.ny);
    for (long y = 0; y < ny; ++y) {
        const long sy = y - s.dy;
        if (sy < 0 || sy >= ny) continue;
        for (long x = 0; x < nx; ++x) {
            const long sx = x - s.dx;
            if (sx < 0 || sx >= nx) continue;
            out.pixels[static_cast<std::size_t>(y * nx + x)] = in.pixels[static_cast<std::size_t>(sy * nx + sx)];
        }
    }
    return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw ValidationError("correlation needs equally sized, non-empty inputs");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw ValidationError("correlation of a constant input is undefined");
    return sab / std::sqrt(saa * sbb);
}

double ncc(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw ValidationError("volumes differ in size");
    std::vector<double> ma(a.size()), mb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[i] = std::abs(a[i]);
        mb[i] = std::abs(b[i]);
    }
    return pearson(ma, mb);
}

Shift align_by_correlation(const Image& a, const Image& b) {
    check_pair(a, b);
    const long hx = static_cast<long>(a.nx / 2), hy = static_cast<long>(a.ny / 2);
    Shift best{};
    double best_r = -std::numeric_limits<double>::infinity();
    auto key = [](Shift s) { return std::make_tuple(std::labs(s.dx) + std::labs(s.dy), s.dx, s.dy); };
    for (long dy = -hy; dy <= hy; ++dy)
        for (long dx = -hx; dx <= hx; ++dx) {
            const Shift s{dx, dy};
            const Image sh = shift_image(a, s);
            double r = 0.0;  // undefined correlations count as none
            try {
                r = pearson(sh.pixels, b.pixels);
            } catch (const ValidationError&) {
            }
            const double tol = 1e-12;
            if (r > best_r + tol || (std::abs(r - best_r) <= tol && key(s) < key(best))) {
                best_r = std::max(r, best_r);
                best = s;
            }
        }
    return best;
}

double ssim(const Image& a, const Image& b, double range) {
    check_pair(a, b);
    if (!(range > 0.0) || !std::isfinite(range)) throw ValidationError("SSIM dynamic range must be positive");
    const double c1 = (kSsimK1 * range) * (kSsimK1 * range);
    const double c2 = (kSsimK2 * range) * (kSsimK2 * range);
    const std::size_t wx = std::min(kSsimWindow, a.nx), wy = std::min(kSsimWindow, a.ny);
    const double n = static_cast<double>(wx * wy);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t y0 = 0; y0 + wy <= a.ny; ++y0)
        for (std::size_t x0 = 0; x0 + wx <= a.nx; ++x0) {
            double ma = 0.0, mb = 0.0;
            for (std::size_t y = y0; y < y0 + wy; ++y)
                for (std::size_t x = x0; x < x0 + wx; ++x) {
                    ma += a.at(x, y);
                    mb += b.at(x, y);
                }
            ma /= n;
            mb /= n;
            double va = 0.0, vb = 0.0, cab = 0.0;
            for (std::size_t y = y0; y < y0 + wy; ++y)
                for (std::size_t x = x0; x < x0 + wx; ++x) {
                    const double da = a.at(x, y) - ma, db = b.at(x, y) - mb;
                    va += da * da;
                    vb += db * db;
                    cab += da * db;
                }
            va /= n;
            vb /= n;
            cab /= n;
            total += ((2.0 * ma * mb + c1) * (2.0 * cab + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return total / static_cast<double>(count);
}

double ssim(const Image& reference, const Image& test) {
    reference.validate();
    const auto [lo, hi] = std::minmax_element(reference.pixels.begin(), reference.pixels.end());
    if (*hi == *lo) throw ValidationError("SSIM reference image is constant");
    return ssim(reference, test, *hi - *lo);
}

Image normalized(const Image& im) {
    Image out = im;
    double peak = 0.0;
    for (double p : im.pixels) peak = std::max(peak, std::abs(p));
    if (peak > 0.0)
        for (auto& p : out.pixels) p /= peak;
    return out;
}

} // namespace nlos::metrics
