#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlos/core.hpp"

namespace nlos::spectral {

/// Chirp-z evaluation of
///
///   X[k] = sum_{i < n_in} x[i] * exp(-j * theta * (i + in_offset) * (k + out_offset)),  k < n_out
///
/// via the factorization p*q = (p^2 + q^2 - (q - p)^2) / 2, which turns the sum into a
/// linear convolution with a quadratic-phase kernel evaluated by three FFTs.
class ChirpZ {
public:
    ChirpZ(std::size_t n_in, std::size_t n_out, double theta, double in_offset = 0.0, double out_offset = 0.0);

    [[nodiscard]] std::size_t n_in() const noexcept { return n_in_; }
    [[nodiscard]] std::size_t n_out() const noexcept { return n_out_; }
    [[nodiscard]] std::size_t conv_size() const noexcept { return conv_; }

    /// `in` holds n_in values, `out` receives n_out values. `work` is caller-owned scratch.
    void apply(std::span<const cplx> in, std::span<cplx> out, std::vector<cplx>& work) const;

private:
    std::size_t n_in_;
    std::size_t n_out_;
    std::size_t conv_;
    std::vector<cplx> pre_chirp_;
    std::vector<cplx> post_chirp_;
    std::vector<cplx> kernel_spectrum_;
};

/// Separable 2D chirp-z on an x-fastest array: x-axis transform then y-axis transform.
[[nodiscard]] std::vector<cplx> chirp_z_2d(const ChirpZ& along_x, const ChirpZ& along_y, std::span<const cplx> u);

/// Scaled 2D DFT: U[m', n'] = sum u[m, n] exp(-j 2pi (alpha m m' / M + beta n n' / N)) with all
/// indices in [0, M) x [0, N). Immutable once built; apply() is reentrant.
class SfftPlan {
public:
    SfftPlan(std::size_t m, std::size_t n, double alpha, double beta);

    [[nodiscard]] std::size_t m() const noexcept { return along_x_.n_in(); }
    [[nodiscard]] std::size_t n() const noexcept { return along_y_.n_in(); }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] std::vector<cplx> apply(std::span<const cplx> u) const;

private:
    double alpha_;
    double beta_;
    ChirpZ along_x_;
    ChirpZ along_y_;
};

[[nodiscard]] std::vector<cplx> sfft_2d(std::span<const cplx> u, std::size_t m, std::size_t n, double alpha,
                                        double beta);

} // namespace nlos::spectral
