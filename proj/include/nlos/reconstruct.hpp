#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nlos/core.hpp"

namespace nlos::reconstruct {

enum class Algorithm { Rsd, Srsd, Nursd1, Nursd2, Nursd3, Rsd3d, Nursd3d, SrsdNursd2 };

[[nodiscard]] std::string_view algorithm_name(Algorithm a) noexcept;
/// Accepts the names printed by algorithm_name ("rsd", "srsd-nursd2", ...).
[[nodiscard]] Algorithm parse_algorithm(std::string_view name);

/// Human-readable relay/grid compatibility table.
[[nodiscard]] std::string compatibility_table();
/// Throws ValidationError (with the table appended) when the combination is unsupported.
void check_compatibility(Algorithm a, RelayKind relay, GridKind grid);

struct Options {
    double eps = 1e-6;                               // NUFFT tolerance
    Interpolation interp = Interpolation::Linear;    // 3D gridding of non-planar relays
    bool falloff = true;                             // 1/r in the propagation kernel
    bool illumination_mask = true;                   // exp(s j k |x_p - v|) per illumination
    unsigned threads = 1;                            // 0 = all hardware threads
    double pitch = 0.0;   // internal lattice pitch for scattered inputs/outputs, 0 = automatic
    double z_pitch = 0.0; // depth pitch of the 3D stage, 0 = lambda* / 8
};

/// Free-space kernel exp(s j k r) / r (or without 1/r), s = kPropagationSign.
struct PropagationKernel {
    double wavenumber = 0.0;
    bool falloff = true;

    [[nodiscard]] cplx operator()(double x, double y, double z) const noexcept;
};

/// Coherent reconstruction, summed over frequencies and illuminations.
[[nodiscard]] ReconstructionVolume reconstruct(const FrequencySlices& m, const VoxelGrid& grid, Algorithm algo,
                                               const Options& options = {});

/// Time-resolved variant: frame t weights frequency w by exp(s j w t) before the sum.
/// A frame at t = 0 reproduces reconstruct() exactly.
[[nodiscard]] ReconstructionVolume light_transport_video(const FrequencySlices& m, const VoxelGrid& grid,
                                                         Algorithm algo, const std::vector<double>& times,
                                                         const Options& options = {});

[[nodiscard]] ReconstructionVolume rsd(const FrequencySlices& m, const CuboidGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume srsd(const FrequencySlices& m, const FrustumGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume nursd1(const FrequencySlices& m, const CuboidGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume nursd2(const FrequencySlices& m, const ExplicitGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume nursd3(const FrequencySlices& m, const ExplicitGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume rsd3d(const FrequencySlices& m, const VoxelGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume nursd3d(const FrequencySlices& m, const VoxelGrid& g, const Options& o = {});
[[nodiscard]] ReconstructionVolume srsd_nursd2(const FrequencySlices& m, const ExplicitGrid& g, const Options& o = {});

struct DepthProjection {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> image;         // max |I| along depth, x fastest
    std::vector<std::size_t> depth;    // plane index of the maximum
};

/// Maximum magnitude along depth for cuboid and frustum volumes. Magnitudes below the
/// given fraction of the sorted magnitudes (floor(p * n)-th smallest) are zeroed first.
[[nodiscard]] DepthProjection project_max_depth(const ReconstructionVolume& v, double threshold = 0.0,
                                                std::size_t frame = 0);

} // namespace nlos::reconstruct
