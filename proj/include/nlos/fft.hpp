#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlos/core.hpp"

namespace nlos::spectral {

enum class Direction { Forward, Inverse };

/// Smallest size >= n whose only prime factors are 2, 3, 5 and 7.
[[nodiscard]] std::size_t good_fft_size(std::size_t n);

/// In-place unnormalized transform of a row-major array given x-fastest extents
/// (shape[0] is the fastest axis). Forward uses exp(-j...), inverse exp(+j...).
/// Thread-safe; plans are cached per shape and direction.
void fft_inplace(std::span<cplx> data, std::span<const std::size_t> shape, Direction dir);

/// Forward 2D DFT, unnormalized, of an nx-by-ny array (x fastest).
[[nodiscard]] std::vector<cplx> fft_2d(std::span<const cplx> u, std::size_t nx, std::size_t ny);

/// Inverse 2D DFT carrying the 1/(nx*ny) normalization.
[[nodiscard]] std::vector<cplx> ifft_2d(std::span<const cplx> u, std::size_t nx, std::size_t ny);

/// Direct O(nx^2 ny^2) evaluation of the forward 2D DFT; reference only.
[[nodiscard]] std::vector<cplx> dft_2d(std::span<const cplx> u, std::size_t nx, std::size_t ny);

} // namespace nlos::spectral
