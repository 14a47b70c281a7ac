#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlos/core.hpp"

namespace nlos::spectral {

inline constexpr double kDefaultEpsilon = 1e-6;

/// Gaussian-gridding plan for type-1 and type-2 non-uniform FFTs in 1 to 3 dimensions.
///
/// Modes are centered: along an axis of M modes, array index i holds frequency
/// k = i - floor(M/2), so k runs over [-floor(M/2), ceil(M/2)). Spectra are stored
/// x fastest. Non-uniform coordinates must already live on [-pi, pi).
///
/// Each point is spread onto a grid oversampled by two (rounded up to an FFT-friendly
/// size) with a truncated Gaussian of half-width w = ceil(log10(1/eps)) + 2 cells; the
/// Gaussian variance is chosen so truncation and aliasing errors decay at the same rate.
class NufftPlan {
public:
    NufftPlan(std::vector<std::size_t> modes, double eps = kDefaultEpsilon);

    [[nodiscard]] std::size_t dims() const noexcept { return modes_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& modes() const noexcept { return modes_; }
    [[nodiscard]] const std::vector<std::size_t>& fine_sizes() const noexcept { return fine_; }
    [[nodiscard]] const std::vector<double>& tau() const noexcept { return tau_; }
    [[nodiscard]] int half_width() const noexcept { return width_; }
    [[nodiscard]] double epsilon() const noexcept { return eps_; }
    [[nodiscard]] std::size_t mode_count() const noexcept;

    /// U[k] = sum_l weights[l] * exp(-j k . x_l). `coords[axis][l]`.
    [[nodiscard]] std::vector<cplx> type1(std::span<const std::vector<double>> coords,
                                          std::span<const cplx> weights) const;

    /// u(x_l) = sum_k spectrum[k] * exp(+j k . x_l).
    [[nodiscard]] std::vector<cplx> type2(std::span<const cplx> spectrum,
                                          std::span<const std::vector<double>> coords) const;

private:
    struct Window {
        std::size_t first[3];
        double weight[3][64];
    };

    std::size_t check_coords(std::span<const std::vector<double>> coords) const;
    void window(std::span<const std::vector<double>> coords, std::size_t l, Window& w) const;
    [[nodiscard]] double deconvolution(std::size_t axis, long k) const noexcept;

    std::vector<std::size_t> modes_;
    std::vector<std::size_t> fine_;
    std::vector<double> tau_;
    std::vector<std::vector<double>> deconv_;  // [axis][mode index]
    int width_;
    double eps_;
};

[[nodiscard]] std::vector<cplx> nufft1(std::span<const std::vector<double>> coords, std::span<const cplx> weights,
                                       std::vector<std::size_t> modes, double eps = kDefaultEpsilon);

[[nodiscard]] std::vector<cplx> nufft2(std::span<const cplx> spectrum, std::span<const std::vector<double>> coords,
                                       std::vector<std::size_t> modes, double eps = kDefaultEpsilon);

/// Frequency held by array index i on an axis of m centered modes.
[[nodiscard]] constexpr long centered_mode(std::size_t i, std::size_t m) noexcept {
    return static_cast<long>(i) - static_cast<long>(m / 2);
}

} // namespace nlos::spectral
