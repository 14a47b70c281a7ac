#include "nlos/sfft.hpp"

#include <cmath>

#include "nlos/fft.hpp"

namespace nlos::spectral {

namespace {

cplx unit_phase(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace

ChirpZ::ChirpZ(std::size_t n_in, std::size_t n_out, double theta, double in_offset, double out_offset)
    : n_in_(n_in), n_out_(n_out), conv_(good_fft_size(n_in + n_out - 1)) {
    if (n_in == 0 || n_out == 0) throw ValidationError("chirp-z lengths must be positive");
    if (!std::isfinite(theta) || !std::isfinite(in_offset) || !std::isfinite(out_offset))
        throw ValidationError("chirp-z parameters must be finite");
    pre_chirp_.resize(n_in);
    for (std::size_t i = 0; i < n_in; ++i) {
        const double p = static_cast<double>(i) + in_offset;
        pre_chirp_[i] = unit_phase(-0.5 * theta * p * p);
    }
    post_chirp_.resize(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const double q = static_cast<double>(k) + out_offset;
        post_chirp_[k] = unit_phase(-0.5 * theta * q * q);
    }
    // lag d = k - i spans [-(n_in - 1), n_out - 1]; negative lags wrap to the top of the buffer
    kernel_spectrum_.assign(conv_, cplx{});
    const double shift = out_offset - in_offset;
    const auto lo = -static_cast<std::ptrdiff_t>(n_in) + 1;
    const auto hi = static_cast<std::ptrdiff_t>(n_out) - 1;
    for (std::ptrdiff_t d = lo; d <= hi; ++d) {
        const double lag = static_cast<double>(d) + shift;
        const std::size_t slot = d >= 0 ? static_cast<std::size_t>(d) : conv_ - static_cast<std::size_t>(-d);
        kernel_spectrum_[slot] = unit_phase(0.5 * theta * lag * lag);
    }
    const std::size_t shape[1] = {conv_};
    fft_inplace(kernel_spectrum_, shape, Direction::Forward);
    const double norm = 1.0 / static_cast<double>(conv_);
    for (auto& v : kernel_spectrum_) v *= norm;
}

void ChirpZ::apply(std::span<const cplx> in, std::span<cplx> out, std::vector<cplx>& work) const {
    work.assign(conv_, cplx{});
    for (std::size_t i = 0; i < n_in_; ++i) work[i] = in[i] * pre_chirp_[i];
    const std::size_t shape[1] = {conv_};
    fft_inplace(work, shape, Direction::Forward);
    for (std::size_t i = 0; i < conv_; ++i) work[i] *= kernel_spectrum_[i];
    fft_inplace(work, shape, Direction::Inverse);
    for (std::size_t k = 0; k < n_out_; ++k) out[k] = work[k] * post_chirp_[k];
}

std::vector<cplx> chirp_z_2d(const ChirpZ& along_x, const ChirpZ& along_y, std::span<const cplx> u) {
    const std::size_t nx = along_x.n_in();
    const std::size_t ny = along_y.n_in();
    const std::size_t kx = along_x.n_out();
    const std::size_t ky = along_y.n_out();
    if (u.size() != nx * ny) throw ValidationError("chirp-z input size does not match its plan");
    std::vector<cplx> rows(kx * ny);
    std::vector<cplx> work;
    for (std::size_t n = 0; n < ny; ++n)
        along_x.apply(u.subspan(n * nx, nx), std::span<cplx>(rows).subspan(n * kx, kx), work);
    std::vector<cplx> out(kx * ky);
    std::vector<cplx> column_in(ny);
    std::vector<cplx> column_out(ky);
    for (std::size_t m = 0; m < kx; ++m) {
        for (std::size_t n = 0; n < ny; ++n) column_in[n] = rows[n * kx + m];
        along_y.apply(column_in, column_out, work);
        for (std::size_t k = 0; k < ky; ++k) out[k * kx + m] = column_out[k];
    }
    return out;
}

SfftPlan::SfftPlan(std::size_t m, std::size_t n, double alpha, double beta)
    : alpha_(alpha),
      beta_(beta),
      along_x_(m, m, 2.0 * kPi * alpha / static_cast<double>(m == 0 ? 1 : m)),
      along_y_(n, n, 2.0 * kPi * beta / static_cast<double>(n == 0 ? 1 : n)) {
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw ValidationError("SFFT scale factors must be finite");
    if (alpha == 0.0 || beta == 0.0) throw ValidationError("SFFT scale factor of zero gives a degenerate grid");
}

std::vector<cplx> SfftPlan::apply(std::span<const cplx> u) const {
    return chirp_z_2d(along_x_, along_y_, u);
}

std::vector<cplx> sfft_2d(std::span<const cplx> u, std::size_t m, std::size_t n, double alpha, double beta) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha == 0.0 || beta == 0.0)
        throw ValidationError("SFFT scale factors must be finite and nonzero");
    return SfftPlan(m, n, alpha, beta).apply(u);
}

} // namespace nlos::spectral
