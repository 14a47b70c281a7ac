#pragma once

#include <cstdint>
#include <filesystem>

#include "nlos/core.hpp"

namespace nlos {

/// NLS1 container. Little-endian throughout.
///
///   "NLS1" | u32 version | u32 n_illum | u32 n_detect | u32 n_bins | f64 dt | f64 t0 | u8 tag
///   relay block | illumination block | f32 payload [illum][detect][bin]
///
/// Relay tag 0 (uniform): u32 nx, u32 ny, f64 dx, dy, x0, y0, z.
/// Relay tag 1 (planar list): u32 L, f64 z, L x (f64 x, f64 y).
/// Relay tag 2 (non-planar list): u32 L, L x (f64 x, f64 y, f64 z).
/// Bit 0x80 of the tag marks a confocal capture (n_illum == 1, empty illumination block).
/// Illumination block: u32 L, L x (f64 x, f64 y, f64 z).
///
/// Reconstruction volumes reuse the framing with tag 0x10 + grid kind; the count
/// fields hold n_frames, n_voxels and 2 (floats per value), dt and t0 are zero, and
/// the payload is interleaved complex f32 [frame][voxel].
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::uint8_t kConfocalFlag = 0x80;
inline constexpr std::uint8_t kVolumeTagBase = 0x10;

[[nodiscard]] TransientMeasurement read_dataset(const std::filesystem::path& path);

/// Writes the binary container and a `<path>.json` geometry sidecar.
void write_dataset(const TransientMeasurement& m, const std::filesystem::path& path);

[[nodiscard]] ReconstructionVolume read_volume(const std::filesystem::path& path);
void write_volume(const ReconstructionVolume& v, const std::filesystem::path& path);

/// Reads only the tag byte; lets callers tell measurements from volumes.
[[nodiscard]] bool is_volume_file(const std::filesystem::path& path);

} // namespace nlos
