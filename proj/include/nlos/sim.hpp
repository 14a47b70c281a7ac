#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "nlos/core.hpp"

namespace nlos::sim {

struct Scatterer {
    Vec3 pos;
    double albedo = 1.0;
};

struct Scene {
    std::vector<Scatterer> scatterers;
    double ambient = 0.0;  // constant counts added to every bin
};

struct SimOptions {
    double dt = 16e-12;
    std::size_t n_bins = 1024;
    double t0 = 0.0;
    bool confocal = false;
    bool falloff = true;  // albedo / (r1^2 r2^2) when set, albedo otherwise
    unsigned threads = 1;
};

/// Three-bounce point-scatterer transients. Each path of length r1 + r2 deposits
/// its energy at t = (r1 + r2) / c, split linearly between the two nearest bins.
[[nodiscard]] TransientMeasurement simulate(const Scene& scene, const RelaySampling& relay,
                                            const std::vector<Vec3>& illuminations, const SimOptions& options);

/// Replaces every bin by a Poisson draw with mean scale * value.
[[nodiscard]] TransientMeasurement add_poisson_noise(const TransientMeasurement& m, double scale, std::uint64_t seed);

template <class Data>
struct Subsampled {
    Data data;
    double recommended_lambda_c = 0.0;  // 2 * stride * original spacing
};

/// Keeps every n-th relay row and column (plus the last ones), then interpolates the
/// discarded samples back from the kept lattice. Real and imaginary parts are
/// interpolated independently.
[[nodiscard]] Subsampled<FrequencySlices> subsample_interpolate(const FrequencySlices& m, std::size_t n,
                                                                Interpolation scheme);

/// Same resampling applied bin by bin to the histograms; by linearity this commutes
/// with the temporal transform.
[[nodiscard]] Subsampled<TransientMeasurement> subsample_interpolate(const TransientMeasurement& m, std::size_t n,
                                                                     Interpolation scheme);

/// Indices kept along an axis of the given length at stride n.
[[nodiscard]] std::vector<std::size_t> kept_indices(std::size_t length, std::size_t n);

struct SceneDescription {
    Scene scene;
    RelaySampling relay;
    std::vector<Vec3> illuminations;
    SimOptions options;
};

[[nodiscard]] SceneDescription parse_scene(const nlohmann::json& j);
[[nodiscard]] SceneDescription load_scene(const std::filesystem::path& path);

} // namespace nlos::sim
