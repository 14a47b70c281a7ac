#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "nlos/errors.hpp"

namespace nlos {

using cplx = std::complex<double>;

/// Speed of light in vacuum, m/s (exact).
inline constexpr double kSpeedOfLight = 299792458.0;

/// Sign of the propagation phase: waves travel as exp(kPropagationSign * j * (omega/c) * r).
/// The temporal analysis transform uses the opposite sign so that backpropagation
/// cancels the phase accumulated in flight. Flipping this one constant flips the
/// whole convention consistently.
inline constexpr double kPropagationSign = -1.0;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

[[nodiscard]] double distance(const Vec3& a, const Vec3& b) noexcept;

/// Resampling scheme shared by measurement interpolation and 3D gridding.
enum class Interpolation { Nearest, Linear };

/// Regular planar lattice, sample (m, n) at (x0 + m*dx, y0 + n*dy, z).
struct UniformGrid2D {
    std::size_t nx = 1;
    std::size_t ny = 1;
    double dx = 1.0;
    double dy = 1.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double z = 0.0;

    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return nx * ny; }
    [[nodiscard]] double x(std::size_t m) const noexcept { return x0 + static_cast<double>(m) * dx; }
    [[nodiscard]] double y(std::size_t n) const noexcept { return y0 + static_cast<double>(n) * dy; }
    [[nodiscard]] double center_x() const noexcept { return x0 + 0.5 * static_cast<double>(nx - 1) * dx; }
    [[nodiscard]] double center_y() const noexcept { return y0 + 0.5 * static_cast<double>(ny - 1) * dy; }
};

/// Ordered list of sample positions. Planar lists (dim == 2) carry z = 0;
/// the owning relay records the plane height.
struct PointList {
    std::vector<Vec3> points;
    int dim = 3;

    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Row-major enumeration (x fastest) of the grid's physical coordinates.
[[nodiscard]] PointList grid_coordinates(const UniformGrid2D& g);

struct NonUniformPlanar {
    PointList points;  // dim == 2
    double z = 0.0;
};

struct NonPlanar {
    PointList points;  // dim == 3
};

using RelaySampling = std::variant<UniformGrid2D, NonUniformPlanar, NonPlanar>;

enum class RelayKind : unsigned char { Uniform = 0, NonUniformPlanar = 1, NonPlanar = 2 };

[[nodiscard]] RelayKind relay_kind(const RelaySampling& r) noexcept;
[[nodiscard]] std::size_t relay_size(const RelaySampling& r) noexcept;
/// Physical 3D positions of every relay sample, in storage order.
[[nodiscard]] std::vector<Vec3> relay_points(const RelaySampling& r);
void validate_relay(const RelaySampling& r);

/// Time-resolved photon histograms, laid out [illumination][detection][bin].
/// Confocal captures hold a single illumination slot; the illumination of each
/// detection sample is the sample itself.
struct TransientMeasurement {
    RelaySampling relay;
    std::vector<Vec3> illuminations;
    bool confocal = false;
    std::size_t n_bins = 1;
    double dt = 1.0;
    double t0 = 0.0;
    std::vector<float> histograms;

    [[nodiscard]] std::size_t n_illum() const noexcept { return confocal ? 1 : illuminations.size(); }
    [[nodiscard]] std::size_t n_detect() const noexcept { return relay_size(relay); }
    [[nodiscard]] std::size_t offset(std::size_t p, std::size_t c) const noexcept {
        return (p * n_detect() + c) * n_bins;
    }
    [[nodiscard]] std::span<const float> histogram(std::size_t p, std::size_t c) const {
        return {histograms.data() + offset(p, c), n_bins};
    }
    [[nodiscard]] std::span<float> histogram(std::size_t p, std::size_t c) {
        return {histograms.data() + offset(p, c), n_bins};
    }
    void validate() const;
};

/// Phasor coefficients laid out [illumination][detection][frequency].
struct FrequencySlices {
    std::vector<double> frequencies;  // rad/s, strictly increasing
    RelaySampling relay;
    std::vector<Vec3> illuminations;
    bool confocal = false;
    std::vector<cplx> coefficients;

    [[nodiscard]] std::size_t n_illum() const noexcept { return confocal ? 1 : illuminations.size(); }
    [[nodiscard]] std::size_t n_detect() const noexcept { return relay_size(relay); }
    [[nodiscard]] std::size_t n_freq() const noexcept { return frequencies.size(); }
    [[nodiscard]] std::size_t index(std::size_t p, std::size_t c, std::size_t f) const noexcept {
        return (p * n_detect() + c) * n_freq() + f;
    }
    /// Relay field of one illumination at one frequency, in relay storage order.
    [[nodiscard]] std::vector<cplx> relay_field(std::size_t p, std::size_t f) const;
    void validate() const;
};

struct CuboidGrid {
    std::size_t nx = 1, ny = 1, nz = 1;
    double dx = 1.0, dy = 1.0, dz = 1.0;
    double x0 = 0.0, y0 = 0.0, z0 = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return nx * ny * nz; }
    [[nodiscard]] double z(std::size_t k) const noexcept { return z0 + static_cast<double>(k) * dz; }
    [[nodiscard]] UniformGrid2D plane(std::size_t k) const { return {nx, ny, dx, dy, x0, y0, z(k)}; }
};

struct FrustumPlane {
    double z = 0.0;
    double alpha = 1.0;
    double beta = 1.0;
};

/// Pyramidal frustum: every plane holds base.nx x base.ny samples centered on the
/// base center, with lateral pitch base.dx / alpha and base.dy / beta.
struct FrustumGrid {
    UniformGrid2D base;
    std::vector<FrustumPlane> planes;

    [[nodiscard]] std::size_t size() const noexcept { return base.size() * planes.size(); }
    [[nodiscard]] UniformGrid2D plane(std::size_t k) const;

    /// Planes z_in + k*dz whose side length grows as x_in + (z - z_in)/alpha0.
    [[nodiscard]] static FrustumGrid linear(const UniformGrid2D& base, std::size_t nz, double dz,
                                            double alpha0, double beta0);
};

struct VoxelGroup {
    double z = 0.0;
    double alpha = 1.0;  // only read by the scaled-grid fusion
    double beta = 1.0;
    std::vector<std::array<double, 2>> xy;
};

/// Arbitrary voxels grouped by depth plane.
struct ExplicitGrid {
    std::vector<VoxelGroup> groups;

    [[nodiscard]] std::size_t size() const noexcept;
};

using VoxelGrid = std::variant<CuboidGrid, FrustumGrid, ExplicitGrid>;

enum class GridKind : unsigned char { Cuboid = 0, Frustum = 1, Explicit = 2 };

[[nodiscard]] GridKind grid_kind(const VoxelGrid& g) noexcept;
[[nodiscard]] std::size_t voxel_count(const VoxelGrid& g) noexcept;
[[nodiscard]] std::size_t plane_count(const VoxelGrid& g) noexcept;
/// All voxel centers, x fastest, then y, then depth plane.
[[nodiscard]] std::vector<Vec3> voxel_positions(const VoxelGrid& g);
void validate_grid(const VoxelGrid& g);

/// Complex field over a voxel grid; with a non-empty time axis the layout is
/// [frame][voxel].
struct ReconstructionVolume {
    VoxelGrid grid;
    std::vector<double> times;
    std::vector<cplx> field;

    [[nodiscard]] std::size_t frames() const noexcept { return times.empty() ? 1 : times.size(); }
    [[nodiscard]] std::span<const cplx> frame(std::size_t t) const {
        const std::size_t n = voxel_count(grid);
        return {field.data() + t * n, n};
    }
    void validate() const;
};

struct AxisBox {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-axis affine map of a half-open box onto [-pi, pi).
class TorusMap {
public:
    explicit TorusMap(std::vector<AxisBox> box);

    [[nodiscard]] std::size_t dims() const noexcept { return box_.size(); }
    [[nodiscard]] double forward(std::size_t axis, double v) const noexcept;
    [[nodiscard]] double inverse(std::size_t axis, double t) const noexcept;
    [[nodiscard]] const std::vector<AxisBox>& box() const noexcept { return box_; }

private:
    std::vector<AxisBox> box_;
};

struct TorusPoints {
    TorusMap map;
    std::vector<std::vector<double>> coords;  // [axis][point]
};

/// Rescales the first box.size() coordinates of every point onto [-pi, pi).
[[nodiscard]] TorusPoints rescale_to_torus(std::span<const Vec3> points, std::vector<AxisBox> box);

} // namespace nlos
