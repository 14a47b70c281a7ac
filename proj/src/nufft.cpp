#include "nlos/nufft.hpp"

#include <algorithm>
#include <cmath>

#include "nlos/fft.hpp"

namespace nlos::spectral {

namespace {

std::size_t wrap(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    long r = i % m;
    if (r < 0) r += m;
    return static_cast<std::size_t>(r);
}

} // namespace

NufftPlan::NufftPlan(std::vector<std::size_t> modes, double eps) : modes_(std::move(modes)), eps_(eps) {
    if (modes_.empty() || modes_.size() > 3) throw ValidationError("NUFFT supports 1 to 3 dimensions");
    if (!(eps >= 1e-14 && eps <= 1e-1)) throw ValidationError("NUFFT tolerance must lie in [1e-14, 1e-1]");
    for (auto m : modes_)
        if (m == 0) throw ValidationError("NUFFT mode counts must be positive");
    width_ = static_cast<int>(std::ceil(std::log10(1.0 / eps))) + 2;
    for (std::size_t a = 0; a < modes_.size(); ++a) {
        const std::size_t m = modes_[a];
        const std::size_t mr = good_fft_size(std::max<std::size_t>(2 * m, 2 * static_cast<std::size_t>(width_)));
        fine_.push_back(mr);
        const double dm = static_cast<double>(m);
        const double dr = static_cast<double>(mr);
        // balances exp(-pi^2 w^2 / (Mr^2 tau)) against exp(-tau (Mr - M/2)^2)
        const double t = kPi * width_ / (dr * (dr - 0.5 * dm));
        tau_.push_back(t);
        std::vector<double> d(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double k = static_cast<double>(centered_mode(i, m));
            d[i] = std::sqrt(kPi / t) * std::exp(k * k * t) / dr;
        }
        deconv_.push_back(std::move(d));
    }
}

std::size_t NufftPlan::mode_count() const noexcept {
    std::size_t n = 1;
    for (auto m : modes_) n *= m;
    return n;
}

double NufftPlan::deconvolution(std::size_t axis, long k) const noexcept {
    return deconv_[axis][static_cast<std::size_t>(k + static_cast<long>(modes_[axis] / 2))];
}

std::size_t NufftPlan::check_coords(std::span<const std::vector<double>> coords) const {
    if (coords.size() != dims()) throw ValidationError("NUFFT coordinate dimensionality does not match its plan");
    const std::size_t n = coords[0].size();
    for (const auto& c : coords) {
        if (c.size() != n) throw ValidationError("NUFFT coordinate arrays differ in length");
        for (double v : c)
            if (!(v >= -kPi && v < kPi)) throw ValidationError("NUFFT coordinates must lie in [-pi, pi)");
    }
    return n;
}

void NufftPlan::window(std::span<const std::vector<double>> coords, std::size_t l, Window& w) const {
    for (std::size_t a = 0; a < dims(); ++a) {
        const double h = 2.0 * kPi / static_cast<double>(fine_[a]);
        const double s = (coords[a][l] + kPi) / h;
        const long i0 = static_cast<long>(std::floor(s)) - width_ + 1;
        w.first[a] = wrap(i0, fine_[a]);
        const double inv = 1.0 / (4.0 * tau_[a]);
        for (int q = 0; q < 2 * width_; ++q) {
            const double d = (s - static_cast<double>(i0 + q)) * h;
            w.weight[a][q] = std::exp(-d * d * inv);
        }
    }
    for (std::size_t a = dims(); a < 3; ++a) {
        w.first[a] = 0;
        w.weight[a][0] = 1.0;
    }
}

std::vector<cplx> NufftPlan::type1(std::span<const std::vector<double>> coords, std::span<const cplx> weights) const {
    const std::size_t n = check_coords(coords);
    if (weights.size() != n) throw ValidationError("NUFFT weight count does not match the point count");
    const std::size_t fx = fine_[0];
    const std::size_t fy = dims() > 1 ? fine_[1] : 1;
    const std::size_t fz = dims() > 2 ? fine_[2] : 1;
    const int wx = 2 * width_;
    const int wy = dims() > 1 ? 2 * width_ : 1;
    const int wz = dims() > 2 ? 2 * width_ : 1;
    std::vector<cplx> grid(fx * fy * fz);
    Window w{};
    for (std::size_t l = 0; l < n; ++l) {
        window(coords, l, w);
        for (int qz = 0; qz < wz; ++qz) {
            const std::size_t iz = (w.first[2] + static_cast<std::size_t>(qz)) % fz;
            const cplx vz = weights[l] * w.weight[2][qz];
            for (int qy = 0; qy < wy; ++qy) {
                const std::size_t iy = (w.first[1] + static_cast<std::size_t>(qy)) % fy;
                const cplx vy = vz * w.weight[1][qy];
                cplx* row = grid.data() + (iz * fy + iy) * fx;
                std::size_t ix = w.first[0];
                for (int qx = 0; qx < wx; ++qx) {
                    row[ix] += vy * w.weight[0][qx];
                    if (++ix == fx) ix = 0;
                }
            }
        }
    }
    fft_inplace(grid, fine_, Direction::Forward);

    // fine grid starts at -pi, so bin k picks up (-1)^k
    const std::size_t mx = modes_[0];
    const std::size_t my = dims() > 1 ? modes_[1] : 1;
    const std::size_t mz = dims() > 2 ? modes_[2] : 1;
    std::vector<cplx> out(mx * my * mz);
    for (std::size_t kz = 0; kz < mz; ++kz) {
        const long z = dims() > 2 ? centered_mode(kz, mz) : 0;
        const double dz = dims() > 2 ? deconvolution(2, z) : 1.0;
        for (std::size_t ky = 0; ky < my; ++ky) {
            const long y = dims() > 1 ? centered_mode(ky, my) : 0;
            const double dy = dims() > 1 ? deconvolution(1, y) : 1.0;
            for (std::size_t kx = 0; kx < mx; ++kx) {
                const long x = centered_mode(kx, mx);
                const double sign = ((x + y + z) & 1) ? -1.0 : 1.0;
                const cplx g = grid[(wrap(z, fz) * fy + wrap(y, fy)) * fx + wrap(x, fx)];
                out[(kz * my + ky) * mx + kx] = g * (sign * dz * dy * deconvolution(0, x));
            }
        }
    }
    return out;
}

std::vector<cplx> NufftPlan::type2(std::span<const cplx> spectrum, std::span<const std::vector<double>> coords) const {
    const std::size_t n = check_coords(coords);
    if (spectrum.size() != mode_count()) throw ValidationError("NUFFT spectrum size does not match its plan");
    const std::size_t fx = fine_[0];
    const std::size_t fy = dims() > 1 ? fine_[1] : 1;
    const std::size_t fz = dims() > 2 ? fine_[2] : 1;
    const std::size_t mx = modes_[0];
    const std::size_t my = dims() > 1 ? modes_[1] : 1;
    const std::size_t mz = dims() > 2 ? modes_[2] : 1;
    std::vector<cplx> grid(fx * fy * fz);
    for (std::size_t kz = 0; kz < mz; ++kz) {
        const long z = dims() > 2 ? centered_mode(kz, mz) : 0;
        const double dz = dims() > 2 ? deconvolution(2, z) : 1.0;
        for (std::size_t ky = 0; ky < my; ++ky) {
            const long y = dims() > 1 ? centered_mode(ky, my) : 0;
            const double dy = dims() > 1 ? deconvolution(1, y) : 1.0;
            for (std::size_t kx = 0; kx < mx; ++kx) {
                const long x = centered_mode(kx, mx);
                const double sign = ((x + y + z) & 1) ? -1.0 : 1.0;
                grid[(wrap(z, fz) * fy + wrap(y, fy)) * fx + wrap(x, fx)] =
                    spectrum[(kz * my + ky) * mx + kx] * (sign * dz * dy * deconvolution(0, x));
            }
        }
    }
    fft_inplace(grid, fine_, Direction::Inverse);

    const int wx = 2 * width_;
    const int wy = dims() > 1 ? 2 * width_ : 1;
    const int wz = dims() > 2 ? 2 * width_ : 1;
    std::vector<cplx> out(n);
    Window w{};
    for (std::size_t l = 0; l < n; ++l) {
        window(coords, l, w);
        cplx acc{};
        for (int qz = 0; qz < wz; ++qz) {
            const std::size_t iz = (w.first[2] + static_cast<std::size_t>(qz)) % fz;
            for (int qy = 0; qy < wy; ++qy) {
                const std::size_t iy = (w.first[1] + static_cast<std::size_t>(qy)) % fy;
                const cplx* row = grid.data() + (iz * fy + iy) * fx;
                cplx line{};
                std::size_t ix = w.first[0];
                for (int qx = 0; qx < wx; ++qx) {
                    line += row[ix] * w.weight[0][qx];
                    if (++ix == fx) ix = 0;
                }
                acc += line * (w.weight[1][qy] * w.weight[2][qz]);
            }
        }
        out[l] = acc;
    }
    return out;
}

std::vector<cplx> nufft1(std::span<const std::vector<double>> coords, std::span<const cplx> weights,
                         std::vector<std::size_t> modes, double eps) {
    return NufftPlan(std::move(modes), eps).type1(coords, weights);
}

std::vector<cplx> nufft2(std::span<const cplx> spectrum, std::span<const std::vector<double>> coords,
                         std::vector<std::size_t> modes, double eps) {
    return NufftPlan(std::move(modes), eps).type2(spectrum, coords);
}

} // namespace nlos::spectral
