#include "nlos/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "nlos/parallel.hpp"

namespace nlos::sim {

namespace {

void deposit(std::span<float> hist, double s, double energy) {
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-9) {
        hist[static_cast<std::size_t>(nearest)] += static_cast<float>(energy);
        return;
    }
    const auto b = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(b);
    if (b + 1 >= hist.size()) {
        hist[b] += static_cast<float>(energy);
        return;
    }
    hist[b] += static_cast<float>((1.0 - frac) * energy);
    hist[b + 1] += static_cast<float>(frac * energy);
}

} // namespace

TransientMeasurement simulate(const Scene& scene, const RelaySampling& relay, const std::vector<Vec3>& illuminations,
                              const SimOptions& options) {
    TransientMeasurement m;
    m.relay = relay;
    m.confocal = options.confocal;
    m.illuminations = options.confocal ? std::vector<Vec3>{} : illuminations;
    m.n_bins = options.n_bins;
    m.dt = options.dt;
    m.t0 = options.t0;
    if (!options.confocal && illuminations.empty()) throw ValidationError("simulation needs illumination positions");
    if (!(scene.ambient >= 0.0)) throw ValidationError("ambient rate must be non-negative");
    for (const auto& s : scene.scatterers)
        if (!(s.albedo >= 0.0)) throw ValidationError("scatterer albedo must be non-negative");

    const auto detect = relay_points(relay);
    const std::size_t nd = detect.size();
    const std::size_t ni = m.n_illum();
    m.histograms.assign(ni * nd * m.n_bins, static_cast<float>(scene.ambient));
    m.validate();

    const double window_end = options.t0 + static_cast<double>(options.n_bins) * options.dt;
    for (std::size_t i = 0; i < scene.scatterers.size(); ++i) {
        const Vec3& x = scene.scatterers[i].pos;
        for (std::size_t p = 0; p < ni; ++p)
            for (std::size_t c = 0; c < nd; ++c) {
                const Vec3& src = options.confocal ? detect[c] : illuminations[p];
                const double t = (distance(src, x) + distance(x, detect[c])) / kSpeedOfLight;
                if (t < options.t0 || t >= window_end) {
                    std::ostringstream msg;
                    msg << "scatterer " << i << " at (" << x.x << ", " << x.y << ", " << x.z
                        << ") arrives at " << t << " s, outside the window [" << options.t0 << ", " << window_end
                        << ")";
                    throw ValidationError(msg.str());
                }
            }
    }

    parallel_for(ni * nd, options.threads, [&](std::size_t pair) {
        const std::size_t p = pair / nd;
        const std::size_t c = pair % nd;
        const Vec3& src = options.confocal ? detect[c] : illuminations[p];
        auto hist = m.histogram(p, c);
        for (const auto& s : scene.scatterers) {
            if (s.albedo == 0.0) continue;
            const double r1 = distance(src, s.pos);
            const double r2 = distance(s.pos, detect[c]);
            const double energy = options.falloff ? s.albedo / (r1 * r1 * r2 * r2) : s.albedo;
            deposit(hist, ((r1 + r2) / kSpeedOfLight - options.t0) / options.dt, energy);
        }
    });
    return m;
}

TransientMeasurement add_poisson_noise(const TransientMeasurement& m, double scale, std::uint64_t seed) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("exposure scale must be positive");
    TransientMeasurement out = m;
    std::mt19937_64 rng(seed);
    for (auto& v : out.histograms) {
        const double mean = scale * static_cast<double>(v);
        if (!(mean > 0.0)) {
            v = 0.0f;
            continue;
        }
        std::poisson_distribution<long long> draw(mean);
        v = static_cast<float>(draw(rng));
    }
    return out;
}

std::vector<std::size_t> kept_indices(std::size_t length, std::size_t n) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < length; i += n) kept.push_back(i);
    if (kept.back() != length - 1) kept.push_back(length - 1);
    return kept;
}

namespace {

struct Tap {
    std::size_t lo, hi;
    double w;  // weight of hi
};

// Per-axis interpolation taps from the kept lattice onto every original index.
std::vector<Tap> taps(std::size_t length, std::size_t n, Interpolation scheme) {
    const auto kept = kept_indices(length, n);
    std::vector<Tap> t(length);
    std::size_t j = 0;
    for (std::size_t i = 0; i < length; ++i) {
        while (j + 1 < kept.size() && kept[j + 1] <= i) ++j;
        const std::size_t lo = kept[j];
        if (lo == i || j + 1 == kept.size()) {
            t[i] = {lo, lo, 0.0};
            continue;
        }
        const std::size_t hi = kept[j + 1];
        const double frac = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
        if (scheme == Interpolation::Linear)
            t[i] = {lo, hi, frac};
        else
            t[i] = frac > 0.5 ? Tap{hi, hi, 0.0} : Tap{lo, lo, 0.0};
    }
    return t;
}

struct Plan2D {
    std::size_t nx, ny;
    std::vector<Tap> tx, ty;
    double spacing;
};

Plan2D plan_for(const RelaySampling& relay, std::size_t n, Interpolation scheme) {
    const auto* g = std::get_if<UniformGrid2D>(&relay);
    if (!g) throw ValidationError("subsampling needs a uniform relay grid");
    if (n < 2) throw ValidationError("subsampling stride must be at least 2");
    if (n >= g->nx || n >= g->ny) throw ValidationError("subsampling stride must be smaller than the grid side");
    return {g->nx, g->ny, taps(g->nx, n, scheme), taps(g->ny, n, scheme), std::max(g->dx, g->dy)};
}

// Resamples a field stored as [outer][y][x][inner] in place of the discarded samples.
template <class T>
void resample(std::vector<T>& data, const Plan2D& plan, std::size_t outer, std::size_t inner) {
    const std::size_t plane = plan.nx * plan.ny * inner;
    std::vector<T> src;
    for (std::size_t o = 0; o < outer; ++o) {
        T* base = data.data() + o * plane;
        src.assign(base, base + plane);
        auto at = [&](std::size_t x, std::size_t y, std::size_t k) -> T { return src[(y * plan.nx + x) * inner + k]; };
        for (std::size_t y = 0; y < plan.ny; ++y)
            for (std::size_t x = 0; x < plan.nx; ++x) {
                const Tap& a = plan.tx[x];
                const Tap& b = plan.ty[y];
                for (std::size_t k = 0; k < inner; ++k) {
                    const T top = at(a.lo, b.lo, k) * (1.0 - a.w) + at(a.hi, b.lo, k) * a.w;
                    const T bottom = at(a.lo, b.hi, k) * (1.0 - a.w) + at(a.hi, b.hi, k) * a.w;
                    base[(y * plan.nx + x) * inner + k] = top * (1.0 - b.w) + bottom * b.w;
                }
            }
    }
}

} // namespace

Subsampled<FrequencySlices> subsample_interpolate(const FrequencySlices& m, std::size_t n, Interpolation scheme) {
    m.validate();
    const auto plan = plan_for(m.relay, n, scheme);
    Subsampled<FrequencySlices> out{m, 2.0 * static_cast<double>(n) * plan.spacing};
    resample(out.data.coefficients, plan, m.n_illum(), m.n_freq());
    return out;
}

Subsampled<TransientMeasurement> subsample_interpolate(const TransientMeasurement& m, std::size_t n,
                                                       Interpolation scheme) {
    m.validate();
    const auto plan = plan_for(m.relay, n, scheme);
    Subsampled<TransientMeasurement> out{m, 2.0 * static_cast<double>(n) * plan.spacing};
    std::vector<double> work(m.histograms.begin(), m.histograms.end());
    resample(work, plan, m.n_illum(), m.n_bins);
    std::transform(work.begin(), work.end(), out.data.histograms.begin(),
                   [](double v) { return static_cast<float>(v); });
    return out;
}

namespace {

Vec3 vec_from(const nlohmann::json& a, bool planar) {
    if (!a.is_array() || a.size() != (planar ? 2u : 3u))
        throw ValidationError(planar ? "planar points are [x, y]" : "points are [x, y, z]");
    return {a[0].get<double>(), a[1].get<double>(), planar ? 0.0 : a[2].get<double>()};
}

RelaySampling relay_from(const nlohmann::json& r) {
    const auto kind = r.at("kind").get<std::string>();
    if (kind == "uniform") {
        UniformGrid2D g;
        g.nx = r.at("nx").get<std::size_t>();
        g.ny = r.at("ny").get<std::size_t>();
        g.dx = r.at("dx").get<double>();
        g.dy = r.value("dy", g.dx);
        g.x0 = r.value("x0", 0.0);
        g.y0 = r.value("y0", 0.0);
        g.z = r.value("z", 0.0);
        return g;
    }
    if (kind == "planar") {
        NonUniformPlanar p;
        p.z = r.value("z", 0.0);
        p.points.dim = 2;
        for (const auto& a : r.at("points")) p.points.points.push_back(vec_from(a, true));
        return p;
    }
    if (kind == "nonplanar") {
        NonPlanar p;
        p.points.dim = 3;
        for (const auto& a : r.at("points")) p.points.points.push_back(vec_from(a, false));
        return p;
    }
    throw ValidationError("relay kind must be uniform, planar or nonplanar");
}

} // namespace

SceneDescription parse_scene(const nlohmann::json& j) {
    try {
        SceneDescription d;
        for (const auto& s : j.at("scatterers"))
            d.scene.scatterers.push_back({vec_from(s.at("pos"), false), s.value("albedo", 1.0)});
        d.scene.ambient = j.value("ambient", 0.0);
        d.relay = relay_from(j.at("relay"));
        validate_relay(d.relay);
        if (j.contains("illuminations"))
            for (const auto& a : j.at("illuminations")) d.illuminations.push_back(vec_from(a, false));
        d.options.dt = j.contains("dt") ? j.at("dt").get<double>() : j.at("Δt").get<double>();
        d.options.n_bins = j.at("n_bins").get<std::size_t>();
        d.options.t0 = j.value("t0", 0.0);
        d.options.confocal = j.value("confocal", false);
        d.options.falloff = j.value("falloff", true);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scene description: ") + e.what());
    }
}

SceneDescription load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("scene file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_scene(j);
}

} // namespace nlos::sim
