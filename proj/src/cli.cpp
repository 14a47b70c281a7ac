#include "nlos/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include "nlos/dataset.hpp"
#include "nlos/metrics.hpp"
#include "nlos/phasor.hpp"
#include "nlos/reconstruct.hpp"
#include "nlos/sim.hpp"

namespace nlos::cli {

namespace {

namespace fs = std::filesystem;
namespace rc = nlos::reconstruct;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        parts.push_back(s.substr(start, at - start));
        if (at == std::string::npos) return parts;
        start = at + 1;
    }
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(what + ": '" + s + "' is not a finite number");
}

std::size_t to_count(const std::string& s, const std::string& what) {
    const double v = to_double(s, what);
    if (v < 1.0 || v != std::floor(v) || v > 1e9) throw ValidationError(what + ": '" + s + "' is not a positive integer");
    return static_cast<std::size_t>(v);
}

// --- grid specifications -------------------------------------------------

ExplicitGrid explicit_from_json(const fs::path& path, std::optional<double> alpha, std::optional<double> beta) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grid file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("grid file " + path.string() + " is not valid JSON: " + e.what());
    }
    const double a_default = alpha.value_or(1.0);
    const double b_default = beta.value_or(alpha.value_or(1.0));
    ExplicitGrid g;
    try {
        if (j.contains("groups")) {
            for (const auto& grp : j.at("groups")) {
                VoxelGroup v;
                v.z = grp.at("z").get<double>();
                v.alpha = grp.value("alpha", a_default);
                v.beta = grp.value("beta", grp.contains("alpha") ? v.alpha : b_default);
                for (const auto& p : grp.at("xy")) {
                    if (!p.is_array() || p.size() != 2) throw ValidationError("group points are [x, y]");
                    v.xy.push_back({p[0].get<double>(), p[1].get<double>()});
                }
                g.groups.push_back(std::move(v));
            }
        } else {
            // flat voxel list, grouped by depth in order of first appearance
            std::map<double, std::size_t> slot;
            for (const auto& p : j.at("voxels")) {
                if (!p.is_array() || p.size() != 3) throw ValidationError("voxels are [x, y, z]");
                const double z = p[2].get<double>();
                auto [it, fresh] = slot.try_emplace(z, g.groups.size());
                if (fresh) g.groups.push_back({z, a_default, b_default, {}});
                g.groups[it->second].xy.push_back({p[0].get<double>(), p[1].get<double>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed grid file " + path.string() + ": " + e.what());
    }
    return g;
}

VoxelGrid parse_grid(const std::string& spec, std::optional<double> alpha, std::optional<double> beta) {
    if (!spec.empty() && spec[0] == '@') return explicit_from_json(spec.substr(1), alpha, beta);
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw ValidationError("grid spec must be cuboid:..., frustum:... or @file.json, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const auto f = split(spec.substr(colon + 1), ',');
    if (kind == "cuboid") {
        if (f.size() != 9) throw ValidationError("cuboid grid needs nx,ny,nz,dx,dy,dz,x0,y0,z0");
        CuboidGrid c;
        c.nx = to_count(f[0], "nx");
        c.ny = to_count(f[1], "ny");
        c.nz = to_count(f[2], "nz");
        c.dx = to_double(f[3], "dx");
        c.dy = to_double(f[4], "dy");
        c.dz = to_double(f[5], "dz");
        c.x0 = to_double(f[6], "x0");
        c.y0 = to_double(f[7], "y0");
        c.z0 = to_double(f[8], "z0");
        return c;
    }
    if (kind == "frustum") {
        if (f.size() < 9 || f.size() > 11)
            throw ValidationError("frustum grid needs nx,ny,nz,dx,dy,dz,x0,y0,z0[,alpha0[,beta0]]");
        UniformGrid2D base;
        base.nx = to_count(f[0], "nx");
        base.ny = to_count(f[1], "ny");
        const std::size_t nz = to_count(f[2], "nz");
        base.dx = to_double(f[3], "dx");
        base.dy = to_double(f[4], "dy");
        const double dz = to_double(f[5], "dz");
        base.x0 = to_double(f[6], "x0");
        base.y0 = to_double(f[7], "y0");
        base.z = to_double(f[8], "z0");
        std::optional<double> a0 = f.size() > 9 ? std::optional(to_double(f[9], "alpha0")) : alpha;
        if (!a0) throw ValidationError("frustum grid needs alpha0 in the grid spec or --alpha");
        const double b0 = f.size() > 10 ? to_double(f[10], "beta0") : (f.size() > 9 ? *a0 : beta.value_or(*a0));
        return FrustumGrid::linear(base, nz, dz, *a0, b0);
    }
    throw ValidationError("unknown grid kind '" + kind + "'");
}

std::vector<double> parse_video(const std::string& spec) {
    const auto f = split(spec, ':');
    if (f.size() != 3) throw ValidationError("--video expects t0:t1:steps");
    const double t0 = to_double(f[0], "video start");
    const double t1 = to_double(f[1], "video end");
    const std::size_t steps = to_count(f[2], "video steps");
    std::vector<double> times(steps);
    for (std::size_t i = 0; i < steps; ++i)
        times[i] = steps == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return times;
}

Interpolation parse_interp(const std::string& s) {
    if (s == "nearest") return Interpolation::Nearest;
    if (s == "linear") return Interpolation::Linear;
    throw ValidationError("interpolation must be nearest or linear");
}

// --- output helpers --------------------------------------------------------

const char* relay_label(RelayKind k) {
    switch (k) {
        case RelayKind::Uniform: return "uniform";
        case RelayKind::NonUniformPlanar: return "planar list";
        case RelayKind::NonPlanar: return "non-planar list";
    }
    return "?";
}

const char* grid_label(GridKind k) {
    switch (k) {
        case GridKind::Cuboid: return "cuboid";
        case GridKind::Frustum: return "frustum";
        case GridKind::Explicit: return "explicit";
    }
    return "?";
}

std::string grid_shape(const VoxelGrid& g) {
    if (const auto* c = std::get_if<CuboidGrid>(&g)) return fmt("%zux%zux%zu", c->nx, c->ny, c->nz);
    if (const auto* f = std::get_if<FrustumGrid>(&g)) return fmt("%zux%zux%zu", f->base.nx, f->base.ny, f->planes.size());
    return fmt("%zu groups", std::get<ExplicitGrid>(g).groups.size());
}

void write_pgm(const rc::DepthProjection& p, const fs::path& path) {
    const double peak = p.image.empty() ? 0.0 : *std::max_element(p.image.begin(), p.image.end());
    std::string bytes = fmt("P5\n%zu %zu\n255\n", p.nx, p.ny);
    const std::size_t header = bytes.size();
    bytes.resize(header + p.image.size());
    // top row is the largest y
    for (std::size_t y = 0; y < p.ny; ++y)
        for (std::size_t x = 0; x < p.nx; ++x) {
            const double v = p.image[y * p.nx + x];
            const long g = peak > 0.0 ? std::lround(255.0 * v / peak) : 0;
            bytes[header + (p.ny - 1 - y) * p.nx + x] = static_cast<char>(static_cast<unsigned char>(g));
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

metrics::Image projection_image(const ReconstructionVolume& v, double threshold) {
    const auto p = rc::project_max_depth(v, threshold);
    return {p.nx, p.ny, p.image};
}

struct Extent {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-lo.x, -lo.y, -lo.z};

    void add(const Vec3& p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    [[nodiscard]] std::string str() const {
        return fmt("x [%.4g, %.4g]  y [%.4g, %.4g]  z [%.4g, %.4g] m", lo.x, hi.x, lo.y, hi.y, lo.z, hi.z);
    }
};

void describe_measurement(const TransientMeasurement& m, std::ostream& out) {
    Extent e;
    for (const auto& p : relay_points(m.relay)) e.add(p);
    double total = 0.0;
    float peak = 0.0f;
    std::size_t nonzero = 0;
    for (float h : m.histograms) {
        total += h;
        peak = std::max(peak, h);
        nonzero += h != 0.0f;
    }
    out << "relay          " << relay_label(relay_kind(m.relay)) << ", " << m.n_detect() << " samples\n"
        << "relay extent   " << e.str() << "\n"
        << "illuminations  " << (m.confocal ? std::string("confocal") : std::to_string(m.illuminations.size()))
        << "\n"
        << "bins           " << m.n_bins << fmt(" x %.4g ps (t0 %.4g ps, window %.4g ns)\n", m.dt * 1e12,
                                                   m.t0 * 1e12, static_cast<double>(m.n_bins) * m.dt * 1e9)
        << "counts         " << fmt("total %.6g, peak %.6g, %zu nonzero bins\n", total, static_cast<double>(peak),
                                    nonzero);
}

void describe_volume(const ReconstructionVolume& v, std::ostream& out) {
    const auto pos = voxel_positions(v.grid);
    const auto f = v.frame(0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.size(); ++i)
        if (std::abs(f[i]) > std::abs(f[best])) best = i;
    out << "volume         " << grid_label(grid_kind(v.grid)) << " " << grid_shape(v.grid) << ", "
        << voxel_count(v.grid) << " voxels\n"
        << "frames         " << v.frames() << "\n";
    if (!f.empty())
        out << "peak           " << fmt("|I| = %.6g at (%.4g, %.4g, %.4g) m\n", std::abs(f[best]), pos[best].x,
                                      pos[best].y, pos[best].z);
}

// --- commands ----------------------------------------------------------------

struct SimulateArgs {
    std::string scene, out;
    double noise_scale = 0.0;
    std::uint64_t seed = 0;
    bool confocal = false;
    unsigned threads = 1;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    auto d = sim::load_scene(a.scene);
    d.options.confocal = d.options.confocal || a.confocal;
    d.options.threads = a.threads;
    auto m = sim::simulate(d.scene, d.relay, d.illuminations, d.options);
    if (a.noise_scale > 0.0) m = sim::add_poisson_noise(m, a.noise_scale, a.seed);
    write_dataset(m, a.out);
    out << "scatterers     " << d.scene.scatterers.size() << "\n";
    describe_measurement(m, out);
    if (a.noise_scale > 0.0) out << fmt("noise          Poisson, scale %.6g, seed %llu\n", a.noise_scale,
                                        static_cast<unsigned long long>(a.seed));
    out << "wrote          " << a.out << "\n";
    return kExitOk;
}

struct ReconstructArgs {
    std::string in, out, image, algo, grid, video, interp = "linear";
    double lambda_c = 0.0;
    std::optional<double> alpha, beta;
    double eps = 1e-6;
    double threshold = 0.0;
    double kernel_threshold = phasor::kDefaultThreshold;
    double pitch = 0.0, z_pitch = 0.0;
    std::size_t subsample = 1;
    bool no_falloff = false, no_mask = false;
    unsigned threads = 1;
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out) {
    const rc::Algorithm algo = rc::parse_algorithm(a.algo);
    const VoxelGrid grid = parse_grid(a.grid, a.alpha, a.beta);
    validate_grid(grid);
    auto m = read_dataset(a.in);
    rc::check_compatibility(algo, relay_kind(m.relay), grid_kind(grid));
    const Interpolation interp = parse_interp(a.interp);
    if (a.subsample > 1) m = sim::subsample_interpolate(m, a.subsample, interp).data;
    const std::vector<double> times = a.video.empty() ? std::vector<double>{} : parse_video(a.video);

    rc::Options o;
    o.eps = a.eps;
    o.interp = interp;
    o.falloff = !a.no_falloff;
    o.illumination_mask = !a.no_mask;
    o.threads = a.threads;
    o.pitch = a.pitch;
    o.z_pitch = a.z_pitch;

    const auto start = std::chrono::steady_clock::now();
    const auto kernel = phasor::build_kernel(a.lambda_c, m.n_bins, m.dt, a.kernel_threshold);
    const auto slices = phasor::to_frequency(m, kernel, a.threads);
    const auto volume = times.empty() ? rc::reconstruct(slices, grid, algo, o)
                                      : rc::light_transport_video(slices, grid, algo, times, o);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path vol_path = a.out.empty() ? fs::path(a.in).replace_extension(".vol.nls1") : fs::path(a.out);
    write_volume(volume, vol_path);
    std::vector<fs::path> images;
    if (grid_kind(grid) != GridKind::Explicit) {
        const fs::path base = a.image.empty() ? fs::path(vol_path).replace_extension(".pgm") : fs::path(a.image);
        for (std::size_t t = 0; t < volume.frames(); ++t) {
            fs::path p = base;
            if (volume.frames() > 1) p.replace_filename(base.stem().string() + fmt("_f%03zu", t) + base.extension().string());
            write_pgm(rc::project_max_depth(volume, a.threshold, t), p);
            images.push_back(p);
        }
    }

    const std::size_t positions = m.confocal ? m.n_detect() : m.n_illum();
    out << "algorithm      " << rc::algorithm_name(algo) << "\n"
        << "relay          " << relay_label(relay_kind(m.relay)) << ", " << m.n_detect() << " samples\n"
        << "grid           " << grid_label(grid_kind(grid)) << " " << grid_shape(grid) << ", " << voxel_count(grid)
        << " voxels\n"
        << "frequencies    " << kernel.count() << fmt(" (lambda_c %.4g m, shortest %.4g m)\n", a.lambda_c,
                                                     kernel.shortest_wavelength())
        << "frames         " << volume.frames() << "\n"
        << "wall-clock     " << fmt("%.3f s total, %.3f ms per illumination position\n", seconds,
                                    1e3 * seconds / static_cast<double>(positions))
        << "wrote          " << vol_path.string() << "\n";
    for (const auto& p : images) out << "wrote          " << p.string() << "\n";
    if (images.empty()) out << "note           explicit voxel lists have no depth projection image\n";
    return kExitOk;
}

struct MetricsArgs {
    std::string a, b, metric = "ssim";
    bool align = false;
    double threshold = 0.0;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
    const auto va = read_volume(a.a);
    const auto vb = read_volume(a.b);
    if (a.metric != "ssim" && a.metric != "ncc") throw ValidationError("metric must be ssim or ncc");
    double value = 0.0;
    if (a.metric == "ncc" && !a.align) {
        if (voxel_count(va.grid) != voxel_count(vb.grid)) throw ValidationError("volumes differ in voxel count");
        value = metrics::ncc(va.frame(0), vb.frame(0));
    } else {
        const auto ref = metrics::normalized(projection_image(va, a.threshold));
        auto test = metrics::normalized(projection_image(vb, a.threshold));
        if (ref.nx != test.nx || ref.ny != test.ny) throw ValidationError("projections differ in size");
        if (a.align) {
            const auto s = metrics::align_by_correlation(test, ref);
            test = metrics::shift_image(test, s);
            out << "shift          " << s.dx << " " << s.dy << "\n";
        }
        value = a.metric == "ssim" ? metrics::ssim(ref, test) : metrics::pearson(ref.pixels, test.pixels);
    }
    out << a.metric << " " << fmt("%.6f", value) << "\n";
    return kExitOk;
}

int cmd_info(const std::string& path, std::ostream& out) {
    if (is_volume_file(path))
        describe_volume(read_volume(path), out);
    else
        describe_measurement(read_dataset(path), out);
    return kExitOk;
}

struct SamplingArgs {
    double z_off = 0.0, x_off = 0.0, lambda_star = 0.0;
    std::optional<double> factor;
    bool confocal = false;
};

int cmd_sampling(const SamplingArgs& a, std::ostream& out) {
    const auto r = phasor::sampling_report(a.x_off, a.z_off, a.lambda_star, a.confocal);
    out << "lambda_sz      " << fmt("%.6g m\n", r.lambda_sz);
    if (r.unbounded()) {
        out << "lambda_sx      unbounded\nratio          inf\nany D admissible\n";
    } else {
        out << "lambda_sx      " << fmt("%.6g m\n", r.lambda_sx) << "ratio          " << fmt("%.6g\n", r.ratio)
            << "D<=" << r.max_integer_factor() << " admissible\n";
    }
    if (a.factor)
        out << fmt("D=%g ", *a.factor) << (r.admits(*a.factor) ? "admissible" : "not admissible") << "\n";
    return kExitOk;
}

struct FrustumArgs {
    double x_in = 0.0, z = 0.0, z_in = 0.0, alpha = 0.0;
    std::optional<double> y_in, beta;
};

int cmd_frustum(const FrustumArgs& a, std::ostream& out) {
    const auto v = phasor::frustum_volume(a.x_in, a.y_in.value_or(a.x_in), a.z_in, a.z, a.alpha,
                                          a.beta.value_or(a.alpha));
    out << fmt("V_F=%.2f, V_C=%.2f, ΔV=%.2f, %+.0f%%\n", v.frustum, v.cuboid, v.difference, v.increase_percent);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phasor-field NLOS simulation and reconstruction"};
    app.name(args.empty() ? "nlos" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Simulate transients of a point-scatterer scene");
    simulate->add_option("scene", sa.scene, "Scene description (JSON)")->required();
    simulate->add_option("out", sa.out, "Output container")->required();
    simulate->add_option("--noise-scale", sa.noise_scale, "Poisson exposure scale (0 = noiseless)");
    simulate->add_option("--seed", sa.seed, "Noise seed");
    simulate->add_flag("--confocal", sa.confocal, "Confocal capture");
    simulate->add_option("--threads", sa.threads, "Worker threads (0 = all)");

    ReconstructArgs ra;
    auto* recon = app.add_subcommand("reconstruct", "Reconstruct a volume from a transient container");
    recon->add_option("in", ra.in, "Input container")->required();
    recon->add_option("--algo", ra.algo, "rsd|srsd|nursd1|nursd2|nursd3|rsd3d|nursd3d|srsd-nursd2")->required();
    recon->add_option("--lambda-c", ra.lambda_c, "Central wavelength (m)")->required();
    recon->add_option("--grid", ra.grid, "cuboid:..., frustum:... or @voxels.json")->required();
    recon->add_option("--alpha", ra.alpha, "Default x scale factor");
    recon->add_option("--beta", ra.beta, "Default y scale factor");
    recon->add_option("--eps", ra.eps, "NUFFT tolerance");
    recon->add_option("--video", ra.video, "Time-resolved frames t0:t1:steps (s)");
    recon->add_option("--threshold", ra.threshold, "Fraction of voxels zeroed before projection");
    recon->add_option("--kernel-threshold", ra.kernel_threshold, "Phasor kernel retention threshold");
    recon->add_option("--subsample", ra.subsample, "Keep every n-th relay row/column, interpolate the rest");
    recon->add_option("--interp", ra.interp, "nearest|linear");
    recon->add_option("--pitch", ra.pitch, "Internal lattice pitch for scattered samples (m)");
    recon->add_option("--z-pitch", ra.z_pitch, "Depth pitch of the 3D stage (m)");
    recon->add_flag("--no-falloff", ra.no_falloff, "Drop the 1/r kernel falloff");
    recon->add_flag("--no-mask", ra.no_mask, "Skip the illumination phase mask");
    recon->add_option("-o,--out", ra.out, "Output volume (default <in>.vol.nls1)");
    recon->add_option("--image", ra.image, "Projection image (default <out>.pgm)");
    recon->add_option("--threads", ra.threads, "Worker threads (0 = all)");

    MetricsArgs ma;
    auto* metric = app.add_subcommand("metrics", "Compare two reconstructed volumes");
    metric->add_option("volA", ma.a, "Reference volume")->required();
    metric->add_option("volB", ma.b, "Test volume")->required();
    metric->add_option("--metric", ma.metric, "ssim|ncc");
    metric->add_flag("--align", ma.align, "Align projections by correlation first");
    metric->add_option("--threshold", ma.threshold, "Fraction of voxels zeroed before projection");

    std::string info_path;
    auto* info = app.add_subcommand("info", "Describe a container");
    info->add_option("file", info_path, "Measurement or volume container")->required();

    SamplingArgs sr;
    auto* sampling = app.add_subcommand("sampling-report", "Relay sampling wavelengths and admissible factors");
    sampling->add_option("--z-off", sr.z_off, "Depth offset to the hidden point (m)")->required();
    sampling->add_option("--x-off", sr.x_off, "Lateral offset to the hidden point (m)")->required();
    sampling->add_option("--lambda-star", sr.lambda_star, "Shortest wavelength (m)")->required();
    sampling->add_option("--factor", sr.factor, "Check one subsampling factor");
    sampling->add_flag("--confocal", sr.confocal, "Confocal capture");

    FrustumArgs fa;
    auto* frustum = app.add_subcommand("frustum", "Frustum volume against the cuboid on the same base");
    frustum->add_option("--x-in", fa.x_in, "Base width (m)")->required();
    frustum->add_option("--y-in", fa.y_in, "Base height (m), default x-in");
    frustum->add_option("--alpha", fa.alpha, "x scale factor")->required();
    frustum->add_option("--beta", fa.beta, "y scale factor, default alpha");
    frustum->add_option("--z", fa.z, "Far depth (m)")->required();
    frustum->add_option("--z-in", fa.z_in, "Near depth (m)");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) argv.push_back("nlos");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitValidation;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sa, out);
        if (recon->parsed()) return cmd_reconstruct(ra, out);
        if (metric->parsed()) return cmd_metrics(ma, out);
        if (info->parsed()) return cmd_info(info_path, out);
        if (sampling->parsed()) return cmd_sampling(sr, out);
        if (frustum->parsed()) return cmd_frustum(fa, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitValidation;
}

} // namespace nlos::cli
