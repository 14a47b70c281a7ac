#include "nlos/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "nlos/fft.hpp"
#include "nlos/nufft.hpp"
#include "nlos/parallel.hpp"
#include "nlos/sfft.hpp"

namespace nlos::reconstruct {

namespace {

using spectral::ChirpZ;
using spectral::Direction;
using spectral::NufftPlan;

// Extra kernel samples (tapered) whenever positions fall between lattice nodes.
constexpr long kMargin = 8;
constexpr long kMaxSmoothMargin = 96;
constexpr double kTol = 1e-9;

long floor_tol(double x) { return static_cast<long>(std::floor(x + kTol)); }
long ceil_tol(double x) { return static_cast<long>(std::ceil(x - kTol)); }
bool integral(double x) { return std::abs(x - std::round(x)) < kTol; }
cplx unit(double phase) { return {std::cos(phase), std::sin(phase)}; }
std::size_t wrap(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}
long centered(std::size_t i, std::size_t n) { return static_cast<long>(i) - static_cast<long>(n / 2); }

double taper(std::size_t i, std::size_t n, long margin) {
    if (margin == 0) return 1.0;
    const auto e = static_cast<long>(std::min(i, n - 1 - i));
    if (e >= margin) return 1.0;
    const double s = std::sin(0.5 * kPi * (static_cast<double>(e) + 0.5) / static_cast<double>(margin));
    return s * s;
}

// Spectral edge between a kernel's band limit and the lattice's Nyquist. Its spatial
// response decays like a Gaussian, so a short kernel window suffices off the lattice.
struct Rolloff {
    bool on = false;
    double pass = 0.0;  // rad per lattice sample
    double stop = 0.0;
    double sharpness = 0.0;
    long margin = 0;

    // Falls back to a tapered window of kMargin samples when there is no headroom.
    static Rolloff make(double pass, double stop, double eps) {
        Rolloff r;
        r.margin = kMargin;
        const double width = stop - pass;
        if (!(pass > 0.0 && width > 0.0)) return r;
        const long m = static_cast<long>(std::ceil(4.0 * std::log(1.0 / eps) / width)) + 1;
        if (m > kMaxSmoothMargin) return r;
        r.on = true;
        r.pass = pass;
        r.stop = stop;
        r.sharpness = std::sqrt(std::log(1.0 / eps));
        r.margin = m;
        return r;
    }
    [[nodiscard]] double operator()(double nu) const {
        if (!on) return 1.0;
        const double t = (std::abs(nu) - pass) / (stop - pass);
        if (t <= 0.0) return 1.0;
        if (t >= 1.0) return 0.0;
        return 0.5 * std::erfc(2.0 * sharpness * (t - 0.5));
    }
    // Taper applied to the kernel window; the rolloff makes one unnecessary.
    [[nodiscard]] double window(std::size_t i, std::size_t n) const { return on ? 1.0 : taper(i, n, margin); }
};

// Headroom kept above the kernel wavenumber before the rolloff starts.
constexpr double kPassGuard = 1.2;

// ---------------------------------------------------------------------------
// geometry

struct Input {
    bool lattice = true;
    std::size_t count[2] = {0, 0};       // lattice extents
    double origin[2] = {0.0, 0.0};       // physical position of fine coordinate 0
    double pitch[2] = {0.0, 0.0};
    std::vector<double> s[2];            // scattered fine coordinates
    double s_min[2] = {0.0, 0.0};
    double s_max[2] = {0.0, 0.0};
    bool exact[2] = {true, true};        // all positions on integer fine coordinates
    double z = 0.0;                      // plane the second stage starts from

    // non-planar relays
    bool volumetric = false;
    double dz = 0.0;
    std::size_t layers = 0;              // gridded stack depth
    struct Splat {
        std::size_t detect, layer, cell;
        double weight;
    };
    std::vector<Splat> splats;
    std::vector<double> w;               // scattered depth coordinates, in dz units below z
    std::size_t kz = 0;                  // depth modes of the 3D transform
    long w_center = 0;
    long w_hi = 0;
    Rolloff depth_roll;
};

struct Plane {
    double z = 0.0;
    double alpha[2] = {1.0, 1.0};
    bool lattice_out = true;
    std::size_t count[2] = {0, 0};
    double offset[2] = {0.0, 0.0};       // physical kernel anchor
    double phi[2] = {0.0, 0.0};          // lattice output shift, output units
    std::vector<double> o[2];            // scattered outputs, output units
    double o_min[2] = {0.0, 0.0};
    double o_max[2] = {0.0, 0.0};
    long j_lo[2] = {0, 0};
    std::size_t j_count[2] = {0, 0};
    long margin[2] = {0, 0};
    Rolloff roll[2];
    std::size_t need[2] = {0, 0};
    std::vector<Vec3> voxels;
    std::size_t first = 0;

    std::optional<ChirpZ> kernel_cz[2];
    std::optional<ChirpZ> input_cz[2];
    std::vector<std::vector<double>> targets;
    long b_center[2] = {0, 0};

    [[nodiscard]] bool unit_scale() const { return alpha[0] == 1.0 && alpha[1] == 1.0; }
    [[nodiscard]] std::size_t size() const { return voxels.size(); }
};

struct Plan {
    Input in;
    std::vector<Plane> planes;
    std::size_t k[2] = {0, 0};
    bool shared_input = true;
    std::optional<NufftPlan> lateral;
    std::optional<NufftPlan> volume;
    bool confocal = false;
};

double median_spacing(std::span<const Vec3> pts) {
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });
    std::vector<double> nn;
    for (std::size_t ii = 0; ii < order.size(); ++ii) {
        const Vec3& p = pts[order[ii]];
        double best = std::numeric_limits<double>::infinity();
        auto visit = [&](std::size_t jj) {
            const Vec3& q = pts[order[jj]];
            const double d = std::hypot(p.x - q.x, p.y - q.y);
            if (d > 0.0) best = std::min(best, d);
            return std::abs(p.x - q.x) <= best;
        };
        for (std::size_t jj = ii + 1; jj < order.size() && visit(jj); ++jj) {}
        for (std::size_t jj = ii; jj-- > 0 && visit(jj);) {}
        if (std::isfinite(best)) nn.push_back(best);
    }
    if (nn.empty()) return 0.0;
    std::nth_element(nn.begin(), nn.begin() + static_cast<long>(nn.size() / 2), nn.end());
    return nn[nn.size() / 2];
}

double shortest_wavelength(const FrequencySlices& m) {
    const double w = std::max(std::abs(m.frequencies.front()), std::abs(m.frequencies.back()));
    if (w == 0.0) throw ValidationError("reconstruction needs a nonzero frequency");
    return 2.0 * kPi * kSpeedOfLight / w / (m.confocal ? 2.0 : 1.0);
}

void set_scattered(Input& in, std::span<const Vec3> pts) {
    for (int a = 0; a < 2; ++a) {
        in.s[a].resize(pts.size());
        for (std::size_t l = 0; l < pts.size(); ++l)
            in.s[a][l] = ((a == 0 ? pts[l].x : pts[l].y) - in.origin[a]) / in.pitch[a];
        const auto [lo, hi] = std::minmax_element(in.s[a].begin(), in.s[a].end());
        in.s_min[a] = *lo;
        in.s_max[a] = *hi;
        in.exact[a] = std::all_of(in.s[a].begin(), in.s[a].end(), integral);
    }
}

// Picks the fine pitch for scattered data when no output lattice dictates it.
double free_pitch(const Options& o, std::span<const Vec3> pts, const FrequencySlices& m) {
    if (o.pitch > 0.0) return o.pitch;
    const double nyquist = shortest_wavelength(m) / 4.0;
    const double d = median_spacing(pts);
    if (!(d > 0.0)) return nyquist;
    // keep a lattice the samples already sit on, otherwise oversample for the rolloff
    const double x0 = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
    const double y0 = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.y < b.y; })->y;
    const bool on_lattice = std::all_of(pts.begin(), pts.end(), [&](const Vec3& p) {
        return integral((p.x - x0) / d) && integral((p.y - y0) / d);
    });
    return on_lattice ? d : std::min(d, nyquist);
}

Input make_input(const FrequencySlices& m, const VoxelGrid& grid, Algorithm algo, const Options& o) {
    Input in;
    const auto* cuboid = std::get_if<CuboidGrid>(&grid);
    if (const auto* g = std::get_if<UniformGrid2D>(&m.relay)) {
        in.count[0] = g->nx;
        in.count[1] = g->ny;
        in.origin[0] = g->x0;
        in.origin[1] = g->y0;
        in.pitch[0] = g->dx;
        in.pitch[1] = g->dy;
        in.s_max[0] = static_cast<double>(g->nx - 1);
        in.s_max[1] = static_cast<double>(g->ny - 1);
        in.z = g->z;
        return in;
    }
    const auto pts = relay_points(m.relay);
    in.lattice = false;
    if (cuboid) {
        in.pitch[0] = cuboid->dx;
        in.pitch[1] = cuboid->dy;
    } else {
        in.pitch[0] = in.pitch[1] = free_pitch(o, pts, m);
    }
    if (const auto* p = std::get_if<NonUniformPlanar>(&m.relay)) {
        in.z = p->z;
        if (cuboid) {
            in.origin[0] = cuboid->x0;
            in.origin[1] = cuboid->y0;
        } else {
            in.origin[0] = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
            in.origin[1] = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.y < b.y; })->y;
        }
        set_scattered(in, pts);
        return in;
    }

    // non-planar relay: the second stage starts from the face nearest the hidden volume
    in.volumetric = true;
    double z_min = pts[0].z, z_max = pts[0].z;
    for (const auto& p : pts) {
        z_min = std::min(z_min, p.z);
        z_max = std::max(z_max, p.z);
    }
    in.z = z_max;
    in.dz = o.z_pitch > 0.0 ? o.z_pitch : shortest_wavelength(m) / 8.0;
    const double w_max = (z_max - z_min) / in.dz;
    in.origin[0] = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
    in.origin[1] = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.y < b.y; })->y;
    if (algo == Algorithm::Nursd3d) {
        if (cuboid) {
            in.origin[0] = cuboid->x0;
            in.origin[1] = cuboid->y0;
        }
        set_scattered(in, pts);
        in.w.resize(pts.size());
        for (std::size_t l = 0; l < pts.size(); ++l) in.w[l] = (z_max - pts[l].z) / in.dz;
        in.w_hi = ceil_tol(w_max);
        in.w_center = static_cast<long>(std::lround(0.5 * w_max));
        if (!std::all_of(in.w.begin(), in.w.end(), integral))
            in.depth_roll = Rolloff::make(kPassGuard * 2.0 * kPi / shortest_wavelength(m) * in.dz, kPi, o.eps);
        in.kz = spectral::good_fft_size(static_cast<std::size_t>(in.w_hi + 1 + 2 * in.depth_roll.margin));
        return in;
    }

    // gridded 3D stage: splat every sample onto a lattice of layers
    in.lattice = true;
    double s_hi[2] = {0.0, 0.0};
    for (const auto& p : pts) {
        s_hi[0] = std::max(s_hi[0], (p.x - in.origin[0]) / in.pitch[0]);
        s_hi[1] = std::max(s_hi[1], (p.y - in.origin[1]) / in.pitch[1]);
    }
    for (int a = 0; a < 2; ++a) {
        in.count[a] = static_cast<std::size_t>(floor_tol(s_hi[a])) + 2;
        in.s_max[a] = static_cast<double>(in.count[a] - 1);
    }
    in.layers = static_cast<std::size_t>(floor_tol(w_max)) + 2;
    for (std::size_t l = 0; l < pts.size(); ++l) {
        const double c[3] = {(pts[l].x - in.origin[0]) / in.pitch[0], (pts[l].y - in.origin[1]) / in.pitch[1],
                             (z_max - pts[l].z) / in.dz};
        std::size_t base[3];
        double frac[3];
        for (int a = 0; a < 3; ++a) {
            const double r = std::round(c[a]);
            const double v = std::abs(c[a] - r) < kTol ? r : c[a];
            if (o.interp == Interpolation::Nearest) {
                base[a] = static_cast<std::size_t>(std::max(0.0, r));
                frac[a] = 0.0;
            } else {
                base[a] = static_cast<std::size_t>(std::max(0.0, std::floor(v)));
                frac[a] = v - static_cast<double>(base[a]);
            }
        }
        for (int corner = 0; corner < 8; ++corner) {
            double wgt = 1.0;
            std::size_t idx[3];
            for (int a = 0; a < 3; ++a) {
                const bool up = (corner >> a) & 1;
                wgt *= up ? frac[a] : 1.0 - frac[a];
                idx[a] = base[a] + (up ? 1 : 0);
            }
            if (wgt == 0.0) continue;
            if (idx[0] >= in.count[0] || idx[1] >= in.count[1] || idx[2] >= in.layers)
                throw ValidationError("relay sample falls outside the 3D grid");
            in.splats.push_back({l, idx[2], idx[1] * in.count[0] + idx[0], wgt});
        }
    }
    return in;
}

void finish_plane(Plane& p, const Input& in, double kappa_max, double eps) {
    for (int a = 0; a < 2; ++a) {
        const double al = p.alpha[a];
        bool exact = in.exact[a] && al == 1.0;
        if (p.lattice_out) {
            p.o_min[a] = p.phi[a];
            p.o_max[a] = p.phi[a] + static_cast<double>(p.count[a] - 1);
            exact = exact && integral(p.phi[a]);
        } else {
            const auto [lo, hi] = std::minmax_element(p.o[a].begin(), p.o[a].end());
            p.o_min[a] = *lo;
            p.o_max[a] = *hi;
            exact = exact && std::all_of(p.o[a].begin(), p.o[a].end(), integral);
        }
        if (!exact) p.roll[a] = Rolloff::make(kPassGuard * kappa_max * in.pitch[a], kPi * al, eps);
        const long m = exact ? 0 : p.roll[a].margin;
        p.margin[a] = m;
        p.j_lo[a] = floor_tol(p.o_min[a] / al - in.s_max[a]) - m;
        const long j_hi = ceil_tol(p.o_max[a] / al - in.s_min[a]) + m;
        p.j_count[a] = static_cast<std::size_t>(j_hi - p.j_lo[a] + 1);
        const double c_lo = al * (in.s_min[a] + static_cast<double>(p.j_lo[a]));
        const double c_hi = al * (in.s_max[a] + static_cast<double>(j_hi));
        double need = std::max(c_hi - p.o_min[a], p.o_max[a] - c_lo) + 1.0 + static_cast<double>(m);
        if (al == 1.0) need = std::max(need, static_cast<double>(p.j_count[a]));
        p.need[a] = static_cast<std::size_t>(std::ceil(need - kTol));
    }
}

void lattice_plane(Plane& p, const UniformGrid2D& g, double alpha, double beta, const Input& in) {
    p.z = g.z;
    p.alpha[0] = alpha;
    p.alpha[1] = beta;
    p.lattice_out = true;
    p.count[0] = g.nx;
    p.count[1] = g.ny;
    const double xo[2] = {g.x0, g.y0};
    for (int a = 0; a < 2; ++a) {
        if (p.alpha[a] == 1.0) {
            p.offset[a] = xo[a] - in.origin[a];
        } else {
            p.phi[a] = p.alpha[a] * (xo[a] - in.origin[a]) / in.pitch[a];
        }
    }
    const auto pts = grid_coordinates(g);
    p.voxels.reserve(pts.size());
    for (const auto& q : pts.points) p.voxels.push_back({q.x, q.y, g.z});
}

void check_pitch(double got, double want, const char* what) {
    if (std::abs(got - want) > 1e-9 * std::max(std::abs(want), 1e-12))
        throw ValidationError(std::string(what));
}

Plan make_plan(const FrequencySlices& m, const VoxelGrid& grid, Algorithm algo, const Options& o) {
    Plan plan;
    plan.confocal = m.confocal;
    plan.in = make_input(m, grid, algo, o);
    const Input& in = plan.in;

    std::size_t first = 0;
    if (const auto* c = std::get_if<CuboidGrid>(&grid)) {
        check_pitch(c->dx, in.pitch[0], "output lateral pitch must equal the relay pitch (use srsd to rescale)");
        check_pitch(c->dy, in.pitch[1], "output lateral pitch must equal the relay pitch (use srsd to rescale)");
        for (std::size_t k = 0; k < c->nz; ++k) {
            Plane p;
            lattice_plane(p, c->plane(k), 1.0, 1.0, in);
            plan.planes.push_back(std::move(p));
        }
    } else if (const auto* f = std::get_if<FrustumGrid>(&grid)) {
        check_pitch(f->base.dx, in.pitch[0], "frustum base pitch must equal the relay pitch");
        check_pitch(f->base.dy, in.pitch[1], "frustum base pitch must equal the relay pitch");
        for (std::size_t k = 0; k < f->planes.size(); ++k) {
            const auto& pl = f->planes[k];
            if (!(pl.alpha > 0.0 && pl.alpha <= 1.0 && pl.beta > 0.0 && pl.beta <= 1.0))
                throw ValidationError("frustum scale factors must lie in (0, 1]");
            Plane p;
            lattice_plane(p, f->plane(k), pl.alpha, pl.beta, in);
            plan.planes.push_back(std::move(p));
        }
    } else {
        const auto& e = std::get<ExplicitGrid>(grid);
        for (const auto& gr : e.groups) {
            if (gr.xy.empty()) throw ValidationError("explicit voxel group is empty");
            Plane p;
            p.z = gr.z;
            p.lattice_out = false;
            if (algo == Algorithm::SrsdNursd2) {
                if (!(gr.alpha > 0.0 && gr.alpha <= 1.0 && gr.beta > 0.0 && gr.beta <= 1.0))
                    throw ValidationError("scale factors must lie in (0, 1]");
                p.alpha[0] = gr.alpha;
                p.alpha[1] = gr.beta;
            }
            for (int a = 0; a < 2; ++a) p.o[a].resize(gr.xy.size());
            for (std::size_t i = 0; i < gr.xy.size(); ++i) {
                for (int a = 0; a < 2; ++a)
                    p.o[a][i] = p.alpha[a] * (gr.xy[i][static_cast<std::size_t>(a)] - in.origin[a]) / in.pitch[a];
                p.voxels.push_back({gr.xy[i][0], gr.xy[i][1], gr.z});
            }
            plan.planes.push_back(std::move(p));
        }
    }

    for (auto& p : plan.planes) {
        if (!(p.z > in.z)) throw ValidationError("voxel planes must lie beyond the relay surface");
        p.first = first;
        first += p.size();
        finish_plane(p, in, 2.0 * kPi / shortest_wavelength(m), o.eps);
        plan.k[0] = std::max(plan.k[0], p.need[0]);
        plan.k[1] = std::max(plan.k[1], p.need[1]);
        plan.shared_input = plan.shared_input && p.unit_scale();
    }
    for (int a = 0; a < 2; ++a) plan.k[a] = spectral::good_fft_size(plan.k[a]);

    const std::size_t kx = plan.k[0], ky = plan.k[1];
    for (auto& p : plan.planes) {
        if (!p.unit_scale())
            for (int a = 0; a < 2; ++a) {
                const double theta = 2.0 * kPi * p.alpha[a] / static_cast<double>(plan.k[a]);
                const double out0 = -static_cast<double>(plan.k[a] / 2);
                p.kernel_cz[a].emplace(p.j_count[a], plan.k[a], theta, static_cast<double>(p.j_lo[a]), out0);
                if (in.lattice) p.input_cz[a].emplace(in.count[a], plan.k[a], theta, 0.0, out0);
            }
        if (!p.lattice_out) {
            p.targets.assign(2, std::vector<double>(p.size()));
            for (int a = 0; a < 2; ++a) {
                p.b_center[a] = std::lround(0.5 * (p.o_min[a] + p.o_max[a]));
                const double kk = static_cast<double>(plan.k[a]);
                for (std::size_t i = 0; i < p.size(); ++i)
                    p.targets[static_cast<std::size_t>(a)][i] =
                        std::min(2.0 * kPi * (p.o[a][i] - static_cast<double>(p.b_center[a])) / kk,
                                 std::nextafter(kPi, 0.0));
            }
        }
    }
    const bool scattered_out = std::any_of(plan.planes.begin(), plan.planes.end(),
                                           [](const Plane& p) { return !p.lattice_out; });
    if (!in.lattice || scattered_out) plan.lateral.emplace(std::vector<std::size_t>{kx, ky}, o.eps);
    if (in.volumetric && !in.lattice) plan.volume.emplace(std::vector<std::size_t>{kx, ky, in.kz}, o.eps);
    return plan;
}

// ---------------------------------------------------------------------------
// spectra

// FFT-order (index k mod K) to centered order (index k + K/2).
void to_centered(const std::vector<cplx>& fft_order, std::vector<cplx>& out, std::size_t kx, std::size_t ky) {
    out.resize(kx * ky);
    for (std::size_t iy = 0; iy < ky; ++iy) {
        const std::size_t sy = wrap(centered(iy, ky), ky);
        for (std::size_t ix = 0; ix < kx; ++ix) out[iy * kx + ix] = fft_order[sy * kx + wrap(centered(ix, kx), kx)];
    }
}

struct Frequency {
    double omega = 0.0;
    double kappa = 0.0;  // wavenumber seen by the kernel
    std::vector<cplx> transfer;  // 3D stage, see depth_transfer
};

// Lateral wavenumber of centered mode index i.
double lateral_wavenumber(std::size_t i, std::size_t k, double pitch) {
    return 2.0 * kPi * static_cast<double>(centered(i, k)) / (static_cast<double>(k) * pitch);
}

// Angular-spectrum transfer over a depth step, decaying for evanescent modes.
cplx depth_factor(double kappa, double kr2, double depth) {
    const double d = kappa * kappa - kr2;
    if (d >= 0.0) return unit(kPropagationSign * std::sqrt(d) * depth);
    return {std::exp(-std::sqrt(-d) * std::abs(depth)), 0.0};
}

// For the gridded stack: [layer][centered k]. For scattered depth: per lateral mode,
// the depth-mode spectrum of the tapered transfer samples, [k][q] in FFT order over q.
void depth_transfer(const Plan& plan, Frequency& fr) {
    const Input& in = plan.in;
    if (!in.volumetric) return;
    const std::size_t kx = plan.k[0], ky = plan.k[1];
    if (in.lattice) {
        fr.transfer.resize(in.layers * kx * ky);
        for (std::size_t l = 0; l < in.layers; ++l)
            for (std::size_t iy = 0; iy < ky; ++iy) {
                const double vy = lateral_wavenumber(iy, ky, in.pitch[1]);
                for (std::size_t ix = 0; ix < kx; ++ix) {
                    const double vx = lateral_wavenumber(ix, kx, in.pitch[0]);
                    fr.transfer[(l * ky + iy) * kx + ix] =
                        depth_factor(fr.kappa, vx * vx + vy * vy, static_cast<double>(l) * in.dz);
                }
            }
        return;
    }
    const std::size_t kz = in.kz;
    const Rolloff& roll = in.depth_roll;
    const long lo = -roll.margin, hi = in.w_hi + roll.margin;
    const auto n = static_cast<std::size_t>(hi - lo + 1);
    fr.transfer.assign(kx * ky * kz, cplx{});
    std::vector<cplx> line(kz);
    const std::size_t shape[1] = {kz};
    for (std::size_t iy = 0; iy < ky; ++iy) {
        const double vy = lateral_wavenumber(iy, ky, in.pitch[1]);
        for (std::size_t ix = 0; ix < kx; ++ix) {
            const double vx = lateral_wavenumber(ix, kx, in.pitch[0]);
            std::fill(line.begin(), line.end(), cplx{});
            for (std::size_t t = 0; t < n; ++t) {
                const long i = lo + static_cast<long>(t);
                line[wrap(i, kz)] = roll.window(t, n) *
                                    depth_factor(fr.kappa, vx * vx + vy * vy, static_cast<double>(i) * in.dz);
            }
            spectral::fft_inplace(line, shape, Direction::Forward);
            if (roll.on)
                for (std::size_t iq = 0; iq < kz; ++iq) {
                    const long q = iq < (kz + 1) / 2 ? static_cast<long>(iq) : static_cast<long>(iq) - static_cast<long>(kz);
                    line[iq] *= roll(2.0 * kPi * static_cast<double>(q) / static_cast<double>(kz));
                }
            std::copy(line.begin(), line.end(), fr.transfer.begin() + static_cast<long>((iy * kx + ix) * kz));
        }
    }
}

// Spectrum A(k) = sum_s u_s exp(-j 2pi k alpha s / K) on centered modes.
void input_spectrum(const Plan& plan, const Plane* plane, const Frequency& fr, std::span<const cplx> u,
                    std::vector<cplx>& out) {
    const Input& in = plan.in;
    const std::size_t kx = plan.k[0], ky = plan.k[1];
    const double alpha[2] = {plane ? plane->alpha[0] : 1.0, plane ? plane->alpha[1] : 1.0};
    const std::size_t shape[2] = {kx, ky};

    if (in.lattice && in.volumetric) {
        std::vector<cplx> layer(kx * ky), acc(kx * ky), stack(in.layers * in.count[0] * in.count[1]);
        const std::size_t cells = in.count[0] * in.count[1];
        for (const auto& sp : in.splats) stack[sp.layer * cells + sp.cell] += sp.weight * u[sp.detect];
        std::vector<cplx> centered_layer;
        for (std::size_t l = 0; l < in.layers; ++l) {
            std::fill(layer.begin(), layer.end(), cplx{});
            bool any = false;
            for (std::size_t y = 0; y < in.count[1]; ++y)
                for (std::size_t x = 0; x < in.count[0]; ++x) {
                    const cplx v = stack[l * cells + y * in.count[0] + x];
                    layer[y * kx + x] = v;
                    any = any || v != cplx{};
                }
            if (!any) continue;
            spectral::fft_inplace(layer, shape, Direction::Forward);
            to_centered(layer, centered_layer, kx, ky);
            const cplx* t = fr.transfer.data() + l * kx * ky;
            for (std::size_t i = 0; i < kx * ky; ++i) acc[i] += centered_layer[i] * t[i];
        }
        out = std::move(acc);
        return;
    }

    if (in.lattice) {
        if (alpha[0] == 1.0 && alpha[1] == 1.0) {
            std::vector<cplx> buf(kx * ky);
            for (std::size_t y = 0; y < in.count[1]; ++y)
                for (std::size_t x = 0; x < in.count[0]; ++x) buf[y * kx + x] = u[y * in.count[0] + x];
            spectral::fft_inplace(buf, shape, Direction::Forward);
            to_centered(buf, out, kx, ky);
        } else {
            out = spectral::chirp_z_2d(*plane->input_cz[0], *plane->input_cz[1], u);
        }
        return;
    }

    // scattered samples: type-1 NUFFT after an integer re-centering
    long shift[2];
    std::vector<std::vector<double>> coords(in.volumetric ? 3 : 2);
    for (int a = 0; a < 2; ++a) {
        shift[a] = std::lround(0.5 * alpha[a] * (in.s_min[a] + in.s_max[a]));
        const double kk = static_cast<double>(plan.k[a]);
        auto& c = coords[static_cast<std::size_t>(a)];
        c.resize(u.size());
        for (std::size_t l = 0; l < u.size(); ++l)
            c[l] = std::min(2.0 * kPi * (alpha[a] * in.s[a][l] - static_cast<double>(shift[a])) / kk,
                            std::nextafter(kPi, 0.0));
    }
    if (!in.volumetric) {
        out = plan.lateral->type1(coords, u);
    } else {
        const std::size_t kz = in.kz;
        auto& c = coords[2];
        c.resize(u.size());
        for (std::size_t l = 0; l < u.size(); ++l)
            c[l] = std::min(-2.0 * kPi * (in.w[l] - static_cast<double>(in.w_center)) / static_cast<double>(kz),
                            std::nextafter(kPi, 0.0));
        const auto full = plan.volume->type1(coords, u);
        // fold the depth axis against the transfer: (1/Kz) sum_q F_k(q) U(k, q) exp(j 2pi q w_c / Kz)
        std::vector<cplx> ramp(kz);
        for (std::size_t iq = 0; iq < kz; ++iq)
            ramp[iq] = unit(2.0 * kPi * static_cast<double>(centered(iq, kz) * in.w_center) / static_cast<double>(kz)) /
                       static_cast<double>(kz);
        out.assign(kx * ky, cplx{});
        for (std::size_t iy = 0; iy < ky; ++iy)
            for (std::size_t ix = 0; ix < kx; ++ix) {
                const cplx* f = fr.transfer.data() + (iy * kx + ix) * kz;
                cplx acc{};
                for (std::size_t iq = 0; iq < kz; ++iq)
                    acc += f[wrap(centered(iq, kz), kz)] * full[(iq * ky + iy) * kx + ix] * ramp[iq];
                out[iy * kx + ix] = acc;
            }
    }
    for (std::size_t iy = 0; iy < ky; ++iy)
        for (std::size_t ix = 0; ix < kx; ++ix) {
            const double ph = -2.0 * kPi *
                              (static_cast<double>(centered(ix, kx) * shift[0]) / static_cast<double>(kx) +
                               static_cast<double>(centered(iy, ky) * shift[1]) / static_cast<double>(ky));
            out[iy * kx + ix] *= unit(ph);
        }
}

void kernel_spectrum(const Plan& plan, const Plane& p, const Frequency& fr, bool falloff, std::vector<cplx>& out) {
    const Input& in = plan.in;
    const std::size_t kx = plan.k[0], ky = plan.k[1];
    const std::size_t jx = p.j_count[0], jy = p.j_count[1];
    const PropagationKernel g{fr.kappa, falloff};
    const double depth = p.z - in.z;
    std::vector<double> tx(jx), ty(jy);
    for (std::size_t i = 0; i < jx; ++i) tx[i] = p.roll[0].window(i, jx);
    for (std::size_t i = 0; i < jy; ++i) ty[i] = p.roll[1].window(i, jy);
    auto sample = [&](std::size_t ix, std::size_t iy) {
        const double x = p.offset[0] + static_cast<double>(p.j_lo[0] + static_cast<long>(ix)) * in.pitch[0];
        const double y = p.offset[1] + static_cast<double>(p.j_lo[1] + static_cast<long>(iy)) * in.pitch[1];
        return g(x, y, depth) * (tx[ix] * ty[iy]);
    };
    if (p.unit_scale()) {
        std::vector<cplx> buf(kx * ky);
        for (std::size_t iy = 0; iy < jy; ++iy) {
            const std::size_t row = wrap(p.j_lo[1] + static_cast<long>(iy), ky) * kx;
            for (std::size_t ix = 0; ix < jx; ++ix) buf[row + wrap(p.j_lo[0] + static_cast<long>(ix), kx)] = sample(ix, iy);
        }
        const std::size_t shape[2] = {kx, ky};
        spectral::fft_inplace(buf, shape, Direction::Forward);
        to_centered(buf, out, kx, ky);
    } else {
        std::vector<cplx> h(jx * jy);
        for (std::size_t iy = 0; iy < jy; ++iy)
            for (std::size_t ix = 0; ix < jx; ++ix) h[iy * jx + ix] = sample(ix, iy);
        out = spectral::chirp_z_2d(*p.kernel_cz[0], *p.kernel_cz[1], h);
    }
    if (!p.roll[0].on && !p.roll[1].on) return;
    auto edge = [&](int a, std::size_t k) {
        std::vector<double> w(k);
        for (std::size_t i = 0; i < k; ++i)
            w[i] = p.roll[a](2.0 * kPi * p.alpha[a] * static_cast<double>(centered(i, k)) / static_cast<double>(k));
        return w;
    };
    const auto wx = edge(0, kx), wy = edge(1, ky);
    for (std::size_t iy = 0; iy < ky; ++iy)
        for (std::size_t ix = 0; ix < kx; ++ix) out[iy * kx + ix] *= wx[ix] * wy[iy];
}

// Field on the plane's outputs from the centered product spectrum.
void synthesize(const Plan& plan, const Plane& p, std::vector<cplx>& spec, std::vector<cplx>& out) {
    const std::size_t kx = plan.k[0], ky = plan.k[1];
    const double shift[2] = {p.lattice_out ? p.phi[0] : static_cast<double>(p.b_center[0]),
                             p.lattice_out ? p.phi[1] : static_cast<double>(p.b_center[1])};
    if (shift[0] != 0.0 || shift[1] != 0.0) {
        std::vector<cplx> rx(kx), ry(ky);
        for (std::size_t i = 0; i < kx; ++i)
            rx[i] = unit(2.0 * kPi * static_cast<double>(centered(i, kx)) * shift[0] / static_cast<double>(kx));
        for (std::size_t i = 0; i < ky; ++i)
            ry[i] = unit(2.0 * kPi * static_cast<double>(centered(i, ky)) * shift[1] / static_cast<double>(ky));
        for (std::size_t iy = 0; iy < ky; ++iy)
            for (std::size_t ix = 0; ix < kx; ++ix) spec[iy * kx + ix] *= rx[ix] * ry[iy];
    }
    if (!p.lattice_out) {
        out = plan.lateral->type2(spec, p.targets);
        return;
    }
    std::vector<cplx> buf(kx * ky);
    for (std::size_t iy = 0; iy < ky; ++iy) {
        const std::size_t row = wrap(centered(iy, ky), ky) * kx;
        for (std::size_t ix = 0; ix < kx; ++ix) buf[row + wrap(centered(ix, kx), kx)] = spec[iy * kx + ix];
    }
    const std::size_t shape[2] = {kx, ky};
    spectral::fft_inplace(buf, shape, Direction::Inverse);
    out.resize(p.size());
    for (std::size_t y = 0; y < p.count[1]; ++y)
        for (std::size_t x = 0; x < p.count[0]; ++x) out[y * p.count[0] + x] = buf[y * kx + x];
}

ReconstructionVolume run(const FrequencySlices& m, const VoxelGrid& grid, Algorithm algo,
                         const std::vector<double>& times, const Options& o) {
    m.validate();
    validate_grid(grid);
    check_compatibility(algo, relay_kind(m.relay), grid_kind(grid));
    if (!(o.eps >= 1e-14 && o.eps <= 1e-1)) throw ValidationError("NUFFT tolerance must lie in [1e-14, 1e-1]");
    for (double t : times)
        if (!std::isfinite(t)) throw ValidationError("video times must be finite");

    const Plan plan = make_plan(m, grid, algo, o);
    const std::size_t kx = plan.k[0], ky = plan.k[1];
    const std::size_t n_vox = voxel_count(grid);
    const std::size_t frames = times.empty() ? 1 : times.size();

    ReconstructionVolume vol;
    vol.grid = grid;
    vol.times = times;
    vol.field.assign(frames * n_vox, cplx{});

    const bool mask = o.illumination_mask && !m.confocal;
    const std::size_t n_illum = m.n_illum();
    std::vector<std::vector<cplx>> shared(n_illum);

    for (std::size_t f = 0; f < m.n_freq(); ++f) {
        Frequency fr;
        fr.omega = m.frequencies[f];
        fr.kappa = (m.confocal ? 2.0 : 1.0) * fr.omega / kSpeedOfLight;
        depth_transfer(plan, fr);
        std::vector<cplx> weights(frames, cplx{1.0, 0.0});
        for (std::size_t t = 0; t < times.size(); ++t) weights[t] = unit(kPropagationSign * fr.omega * times[t]);

        if (plan.shared_input)
            parallel_for(n_illum, o.threads, [&](std::size_t p) {
                input_spectrum(plan, nullptr, fr, m.relay_field(p, f), shared[p]);
            });

        parallel_for(plan.planes.size(), o.threads, [&](std::size_t g) {
            const Plane& pl = plan.planes[g];
            std::vector<cplx> h, a, spec, field;
            kernel_spectrum(plan, pl, fr, o.falloff, h);
            const double scale = pl.alpha[0] * pl.alpha[1] / static_cast<double>(kx * ky);
            std::vector<cplx> sum(pl.size());
            for (std::size_t p = 0; p < n_illum; ++p) {
                const std::vector<cplx>* ap = &shared[p];
                if (!plan.shared_input) {
                    input_spectrum(plan, &pl, fr, m.relay_field(p, f), a);
                    ap = &a;
                }
                spec.resize(kx * ky);
                for (std::size_t i = 0; i < kx * ky; ++i) spec[i] = (*ap)[i] * h[i] * scale;
                synthesize(plan, pl, spec, field);
                if (mask) {
                    const Vec3& src = m.illuminations[p];
                    for (std::size_t v = 0; v < pl.size(); ++v)
                        field[v] *= unit(kPropagationSign * fr.kappa * distance(src, pl.voxels[v]));
                }
                for (std::size_t v = 0; v < pl.size(); ++v) sum[v] += field[v];
            }
            for (std::size_t t = 0; t < frames; ++t) {
                cplx* dst = vol.field.data() + t * n_vox + pl.first;
                if (weights[t] == cplx{1.0, 0.0}) {
                    for (std::size_t v = 0; v < pl.size(); ++v) dst[v] += sum[v];
                } else {
                    for (std::size_t v = 0; v < pl.size(); ++v) dst[v] += weights[t] * sum[v];
                }
            }
        });
    }
    return vol;
}

struct Rule {
    Algorithm algo;
    RelayKind relay;
    std::vector<GridKind> grids;
};

const std::vector<Rule>& rules() {
    static const std::vector<Rule> r = {
        {Algorithm::Rsd, RelayKind::Uniform, {GridKind::Cuboid}},
        {Algorithm::Srsd, RelayKind::Uniform, {GridKind::Frustum}},
        {Algorithm::Nursd1, RelayKind::NonUniformPlanar, {GridKind::Cuboid}},
        {Algorithm::Nursd2, RelayKind::Uniform, {GridKind::Explicit}},
        {Algorithm::Nursd3, RelayKind::NonUniformPlanar, {GridKind::Explicit}},
        {Algorithm::Rsd3d, RelayKind::NonPlanar, {GridKind::Cuboid, GridKind::Explicit}},
        {Algorithm::Nursd3d, RelayKind::NonPlanar, {GridKind::Cuboid, GridKind::Explicit}},
        {Algorithm::SrsdNursd2, RelayKind::Uniform, {GridKind::Explicit}},
    };
    return r;
}

const char* relay_name(RelayKind k) {
    switch (k) {
    case RelayKind::Uniform: return "uniform grid";
    case RelayKind::NonUniformPlanar: return "planar point list";
    case RelayKind::NonPlanar: return "non-planar point list";
    }
    return "?";
}

const char* grid_name(GridKind k) {
    switch (k) {
    case GridKind::Cuboid: return "cuboid";
    case GridKind::Frustum: return "frustum";
    case GridKind::Explicit: return "explicit";
    }
    return "?";
}

} // namespace

cplx PropagationKernel::operator()(double x, double y, double z) const noexcept {
    const double r = std::sqrt(x * x + y * y + z * z);
    const cplx e = unit(kPropagationSign * wavenumber * r);
    return falloff ? e / r : e;
}

std::string_view algorithm_name(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::Rsd: return "rsd";
    case Algorithm::Srsd: return "srsd";
    case Algorithm::Nursd1: return "nursd1";
    case Algorithm::Nursd2: return "nursd2";
    case Algorithm::Nursd3: return "nursd3";
    case Algorithm::Rsd3d: return "rsd3d";
    case Algorithm::Nursd3d: return "nursd3d";
    case Algorithm::SrsdNursd2: return "srsd-nursd2";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (const auto& r : rules())
        if (algorithm_name(r.algo) == name) return r.algo;
    throw ValidationError("unknown algorithm '" + std::string(name) + "'\n" + compatibility_table());
}

std::string compatibility_table() {
    std::ostringstream s;
    s << "algorithm     relay                   output grids\n";
    for (const auto& r : rules()) {
        std::string name(algorithm_name(r.algo));
        std::string relay(relay_name(r.relay));
        name.resize(14, ' ');
        relay.resize(24, ' ');
        s << name << relay;
        for (std::size_t i = 0; i < r.grids.size(); ++i) s << (i ? ", " : "") << grid_name(r.grids[i]);
        s << '\n';
    }
    return s.str();
}

void check_compatibility(Algorithm a, RelayKind relay, GridKind grid) {
    for (const auto& r : rules())
        if (r.algo == a) {
            if (r.relay == relay && std::find(r.grids.begin(), r.grids.end(), grid) != r.grids.end()) return;
            std::string hint;
            if (a == Algorithm::Rsd && relay == RelayKind::NonUniformPlanar) hint = " (use nursd1 for point lists)";
            throw ValidationError(std::string(algorithm_name(a)) + " does not accept a " + relay_name(relay) +
                                  " relay with a " + grid_name(grid) + " output" + hint + "\n" +
                                  compatibility_table());
        }
    throw ValidationError("unknown algorithm");
}

ReconstructionVolume reconstruct(const FrequencySlices& m, const VoxelGrid& grid, Algorithm algo,
                                 const Options& options) {
    return run(m, grid, algo, {}, options);
}

ReconstructionVolume light_transport_video(const FrequencySlices& m, const VoxelGrid& grid, Algorithm algo,
                                           const std::vector<double>& times, const Options& options) {
    if (times.empty()) throw ValidationError("video needs at least one frame time");
    return run(m, grid, algo, times, options);
}

ReconstructionVolume rsd(const FrequencySlices& m, const CuboidGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Rsd, o);
}
ReconstructionVolume srsd(const FrequencySlices& m, const FrustumGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Srsd, o);
}
ReconstructionVolume nursd1(const FrequencySlices& m, const CuboidGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Nursd1, o);
}
ReconstructionVolume nursd2(const FrequencySlices& m, const ExplicitGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Nursd2, o);
}
ReconstructionVolume nursd3(const FrequencySlices& m, const ExplicitGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Nursd3, o);
}
ReconstructionVolume rsd3d(const FrequencySlices& m, const VoxelGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Rsd3d, o);
}
ReconstructionVolume nursd3d(const FrequencySlices& m, const VoxelGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::Nursd3d, o);
}
ReconstructionVolume srsd_nursd2(const FrequencySlices& m, const ExplicitGrid& g, const Options& o) {
    return reconstruct(m, g, Algorithm::SrsdNursd2, o);
}

DepthProjection project_max_depth(const ReconstructionVolume& v, double threshold, std::size_t frame) {
    if (!(threshold >= 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in [0, 1)");
    if (frame >= v.frames()) throw ValidationError("frame index out of range");
    std::size_t nx = 0, ny = 0, nz = 0;
    if (const auto* c = std::get_if<CuboidGrid>(&v.grid)) {
        nx = c->nx, ny = c->ny, nz = c->nz;
    } else if (const auto* f = std::get_if<FrustumGrid>(&v.grid)) {
        nx = f->base.nx, ny = f->base.ny, nz = f->planes.size();
    } else {
        throw ValidationError("depth projection needs a cuboid or frustum volume");
    }
    const auto field = v.frame(frame);
    std::vector<double> mag(field.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(field[i]);
    if (threshold > 0.0 && !mag.empty()) {
        std::vector<double> sorted = mag;
        std::sort(sorted.begin(), sorted.end());
        const double cut = sorted[static_cast<std::size_t>(std::floor(threshold * static_cast<double>(sorted.size())))];
        for (auto& x : mag)
            if (x < cut) x = 0.0;
    }
    DepthProjection out;
    out.nx = nx;
    out.ny = ny;
    out.image.assign(nx * ny, 0.0);
    out.depth.assign(nx * ny, 0);
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t i = 0; i < nx * ny; ++i) {
            const double x = mag[k * nx * ny + i];
            if (x > out.image[i]) {  // strict: ties keep the shallower plane
                out.image[i] = x;
                out.depth[i] = k;
            }
        }
    return out;
}

} // namespace nlos::reconstruct
