#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "nlos/core.hpp"

namespace nlos::phasor {

inline constexpr double kDefaultThreshold = 0.01;

/// Gaussian band-pass illumination centered on omega_c = 2 pi c / lambda_c with
/// width sigma = c / (5 lambda_c). Only bins of the measurement's DFT time axis
/// (omega_k = 2 pi k / (n_bins dt), 0 <= k <= n_bins / 2) whose weight reaches the
/// threshold are retained.
struct PhasorKernel {
    double lambda_c = 0.0;
    double omega_c = 0.0;
    double sigma = 0.0;
    double threshold = kDefaultThreshold;
    std::size_t n_bins = 0;
    double dt = 0.0;
    std::vector<std::size_t> bins;
    std::vector<double> frequencies;
    std::vector<double> weights;

    [[nodiscard]] std::size_t count() const noexcept { return frequencies.size(); }
    [[nodiscard]] double weight(double omega) const noexcept;
    /// Wavelength of the highest retained frequency.
    [[nodiscard]] double shortest_wavelength() const noexcept;
};

[[nodiscard]] PhasorKernel build_kernel(double lambda_c, std::size_t n_bins, double dt,
                                        double threshold = kDefaultThreshold);

/// Temporal DFT of every histogram evaluated at the kernel's bins and multiplied by
/// the kernel weight. Bin b sits at t0 + b dt; the analysis phase is the conjugate
/// of the propagation phase, exp(-kPropagationSign j omega t).
[[nodiscard]] FrequencySlices to_frequency(const TransientMeasurement& m, const PhasorKernel& k,
                                           unsigned threads = 1);

/// 1.22 lambda_c z / aperture.
[[nodiscard]] double lateral_resolution(double lambda_c, double z, double aperture);

struct SamplingReport {
    double lambda_sz = 0.0;
    double lambda_sx = 0.0;
    double ratio = 0.0;  // lambda_sx / lambda_sz, infinite for zero lateral offset
    bool confocal = false;

    [[nodiscard]] bool unbounded() const noexcept { return ratio == std::numeric_limits<double>::infinity(); }
    /// Any factor up to 1 keeps the full grid; coarser factors need ratio > d.
    [[nodiscard]] bool admits(double d) const noexcept { return d <= 1.0 || ratio > d; }
    /// Largest integer factor strictly below the ratio (at least 1).
    [[nodiscard]] std::size_t max_integer_factor() const noexcept;
};

[[nodiscard]] SamplingReport sampling_report(double x_offset, double z_offset, double lambda_star, bool confocal);

struct FrustumVolume {
    double frustum = 0.0;
    double cuboid = 0.0;
    double difference = 0.0;
    double increase_percent = 0.0;
};

/// Volume of a frustum whose cross-section at height h above z_in is
/// (x_in + h / alpha) by (y_in + h / beta), against the cuboid on the same base.
[[nodiscard]] FrustumVolume frustum_volume(double x_in, double y_in, double z_in, double z_out, double alpha,
                                           double beta);

struct ScaleBounds {
    double delta_out_max = 0.0;
    double alpha_min = 0.0;
};

[[nodiscard]] ScaleBounds scale_bounds(double delta_in, double lambda_c, double aperture, double z);

/// N^2 T / (floor(N / D)^2 2 F).
[[nodiscard]] double compression_factor(std::size_t n, double d, std::size_t t, std::size_t f);

} // namespace nlos::phasor
