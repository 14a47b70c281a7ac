#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlos/core.hpp"

namespace nlos::metrics {

/// Real image, x fastest.
struct Image {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> pixels;

    [[nodiscard]] double at(std::size_t x, std::size_t y) const { return pixels[y * nx + x]; }
    void validate() const;
};

struct Shift {
    long dx = 0;
    long dy = 0;
    friend bool operator==(const Shift&, const Shift&) = default;
};

/// out(x, y) = in(x - dx, y - dy), zero outside.
[[nodiscard]] Image shift_image(const Image& in, Shift s);

/// Shift s maximizing the Pearson correlation between shift_image(a, s) and b, searched
/// over |dx| <= nx/2, |dy| <= ny/2. Ties go to the smallest |dx| + |dy|, then to the
/// lexicographically smallest (dx, dy).
[[nodiscard]] Shift align_by_correlation(const Image& a, const Image& b);

inline constexpr std::size_t kSsimWindow = 8;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Mean SSIM over every 8x8 box window (clipped to the image size), with stabilizers
/// (K1 L)^2 and (K2 L)^2 where L is the reference's max - min.
[[nodiscard]] double ssim(const Image& reference, const Image& test);
/// Same with an explicit dynamic range.
[[nodiscard]] double ssim(const Image& a, const Image& b, double range);

/// Pearson correlation of two equally sized sequences.
[[nodiscard]] double pearson(std::span<const double> a, std::span<const double> b);
/// Pearson correlation of magnitudes.
[[nodiscard]] double ncc(std::span<const cplx> a, std::span<const cplx> b);

/// Scales by the maximum so the image lies in [0, 1]; an all-zero image is returned as is.
[[nodiscard]] Image normalized(const Image& im);

} // namespace nlos::metrics
