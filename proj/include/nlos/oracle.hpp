#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlos/core.hpp"

/// Brute-force references for tests. Slow by design.
namespace nlos::oracle {

/// Literal double sum over illuminations and detections for every voxel:
///   I(v) = sum_w sum_p exp(s j (w/c)|x_p - v|) sum_c P(p, c, w) exp(s j (w/c)|v - x_c|)
/// with s = kPropagationSign and no amplitude falloff. Confocal data use x_p = x_c.
[[nodiscard]] std::vector<cplx> backproject(const FrequencySlices& m, std::span<const Vec3> voxels,
                                            unsigned threads = 1);

/// Same sum with frequency-major loops and per-voxel accumulators; performs the
/// identical sequence of floating-point operations per voxel.
[[nodiscard]] std::vector<cplx> backproject_frequency_major(const FrequencySlices& m, std::span<const Vec3> voxels);

/// U[k] = sum_l w_l exp(-j k . x_l) over centered modes (x fastest).
[[nodiscard]] std::vector<cplx> direct_nudft(std::span<const std::vector<double>> coords, std::span<const cplx> weights,
                                             std::span<const std::size_t> modes);

/// u(x_l) = sum_k U[k] exp(+j k . x_l).
[[nodiscard]] std::vector<cplx> direct_nudft_adjoint(std::span<const cplx> spectrum,
                                                     std::span<const std::vector<double>> coords,
                                                     std::span<const std::size_t> modes);

/// U[m', n'] = sum u[m, n] exp(-j 2pi (alpha m m' / M + beta n n' / N)), indices from zero.
[[nodiscard]] std::vector<cplx> scaled_dft_2d(std::span<const cplx> u, std::size_t m, std::size_t n, double alpha,
                                              double beta);

} // namespace nlos::oracle
