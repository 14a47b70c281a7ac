#include "nlos/oracle.hpp"

#include <cmath>

#include "nlos/parallel.hpp"

namespace nlos::oracle {

namespace {

cplx phase(double omega, double r) {
    const double p = kPropagationSign * omega / kSpeedOfLight * r;
    return {std::cos(p), std::sin(p)};
}

const Vec3& source_of(const FrequencySlices& m, const std::vector<Vec3>& detect, std::size_t p, std::size_t c) {
    return m.confocal ? detect[c] : m.illuminations[p];
}

} // namespace

std::vector<cplx> backproject(const FrequencySlices& m, std::span<const Vec3> voxels, unsigned threads) {
    m.validate();
    const auto detect = relay_points(m.relay);
    std::vector<cplx> out(voxels.size());
    parallel_for(voxels.size(), threads, [&](std::size_t v) {
        const Vec3& x = voxels[v];
        cplx total{};
        for (std::size_t f = 0; f < m.n_freq(); ++f) {
            const double w = m.frequencies[f];
            for (std::size_t p = 0; p < m.n_illum(); ++p) {
                if (m.confocal) {
                    // the illumination moves with the detector, so the mask sits inside the detection sum
                    cplx inner{};
                    for (std::size_t c = 0; c < m.n_detect(); ++c) {
                        const double r = distance(x, detect[c]);
                        inner += phase(w, r) * (m.coefficients[m.index(p, c, f)] * phase(w, r));
                    }
                    total += inner;
                    continue;
                }
                cplx inner{};
                for (std::size_t c = 0; c < m.n_detect(); ++c)
                    inner += m.coefficients[m.index(p, c, f)] * phase(w, distance(x, detect[c]));
                total += phase(w, distance(m.illuminations[p], x)) * inner;
            }
        }
        out[v] = total;
    });
    return out;
}

std::vector<cplx> backproject_frequency_major(const FrequencySlices& m, std::span<const Vec3> voxels) {
    m.validate();
    const auto detect = relay_points(m.relay);
    const std::size_t nv = voxels.size();
    std::vector<cplx> total(nv);
    std::vector<cplx> inner(nv);
    for (std::size_t f = 0; f < m.n_freq(); ++f) {
        const double w = m.frequencies[f];
        for (std::size_t p = 0; p < m.n_illum(); ++p) {
            std::fill(inner.begin(), inner.end(), cplx{});
            for (std::size_t c = 0; c < m.n_detect(); ++c) {
                const cplx coef = m.coefficients[m.index(p, c, f)];
                const Vec3& src = source_of(m, detect, p, c);
                for (std::size_t v = 0; v < nv; ++v) {
                    const double r = distance(voxels[v], detect[c]);
                    if (m.confocal)
                        inner[v] += phase(w, distance(voxels[v], src)) * (coef * phase(w, r));
                    else
                        inner[v] += coef * phase(w, r);
                }
            }
            for (std::size_t v = 0; v < nv; ++v) {
                if (m.confocal)
                    total[v] += inner[v];
                else
                    total[v] += phase(w, distance(m.illuminations[p], voxels[v])) * inner[v];
            }
        }
    }
    return total;
}

namespace {

struct ModeShape {
    std::size_t mx, my, mz;
};

ModeShape shape_of(std::span<const std::vector<double>> coords, std::span<const std::size_t> modes) {
    if (coords.size() != modes.size() || modes.empty() || modes.size() > 3)
        throw ValidationError("direct NUDFT needs one coordinate array per mode axis (1 to 3)");
    return {modes[0], modes.size() > 1 ? modes[1] : 1, modes.size() > 2 ? modes[2] : 1};
}

double coord(std::span<const std::vector<double>> coords, std::size_t axis, std::size_t l) {
    return axis < coords.size() ? coords[axis][l] : 0.0;
}

long centered(std::size_t i, std::size_t m) { return static_cast<long>(i) - static_cast<long>(m / 2); }

} // namespace

std::vector<cplx> direct_nudft(std::span<const std::vector<double>> coords, std::span<const cplx> weights,
                               std::span<const std::size_t> modes) {
    const auto s = shape_of(coords, modes);
    const std::size_t n = weights.size();
    std::vector<cplx> out(s.mx * s.my * s.mz);
    for (std::size_t kz = 0; kz < s.mz; ++kz)
        for (std::size_t ky = 0; ky < s.my; ++ky)
            for (std::size_t kx = 0; kx < s.mx; ++kx) {
                const double fx = static_cast<double>(centered(kx, s.mx));
                const double fy = modes.size() > 1 ? static_cast<double>(centered(ky, s.my)) : 0.0;
                const double fz = modes.size() > 2 ? static_cast<double>(centered(kz, s.mz)) : 0.0;
                cplx acc{};
                for (std::size_t l = 0; l < n; ++l) {
                    const double ph = -(fx * coord(coords, 0, l) + fy * coord(coords, 1, l) + fz * coord(coords, 2, l));
                    acc += weights[l] * cplx(std::cos(ph), std::sin(ph));
                }
                out[(kz * s.my + ky) * s.mx + kx] = acc;
            }
    return out;
}

std::vector<cplx> direct_nudft_adjoint(std::span<const cplx> spectrum, std::span<const std::vector<double>> coords,
                                       std::span<const std::size_t> modes) {
    const auto s = shape_of(coords, modes);
    if (spectrum.size() != s.mx * s.my * s.mz) throw ValidationError("spectrum size does not match the mode counts");
    const std::size_t n = coords[0].size();
    std::vector<cplx> out(n);
    for (std::size_t l = 0; l < n; ++l) {
        cplx acc{};
        for (std::size_t kz = 0; kz < s.mz; ++kz)
            for (std::size_t ky = 0; ky < s.my; ++ky)
                for (std::size_t kx = 0; kx < s.mx; ++kx) {
                    const double fx = static_cast<double>(centered(kx, s.mx));
                    const double fy = modes.size() > 1 ? static_cast<double>(centered(ky, s.my)) : 0.0;
                    const double fz = modes.size() > 2 ? static_cast<double>(centered(kz, s.mz)) : 0.0;
                    const double ph = fx * coord(coords, 0, l) + fy * coord(coords, 1, l) + fz * coord(coords, 2, l);
                    acc += spectrum[(kz * s.my + ky) * s.mx + kx] * cplx(std::cos(ph), std::sin(ph));
                }
        out[l] = acc;
    }
    return out;
}

std::vector<cplx> scaled_dft_2d(std::span<const cplx> u, std::size_t m, std::size_t n, double alpha, double beta) {
    if (u.size() != m * n) throw ValidationError("scaled DFT input size does not match its shape");
    std::vector<cplx> out(m * n);
    const double tx = 2.0 * kPi * alpha / static_cast<double>(m);
    const double ty = 2.0 * kPi * beta / static_cast<double>(n);
    for (std::size_t kn = 0; kn < n; ++kn)
        for (std::size_t km = 0; km < m; ++km) {
            cplx acc{};
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < m; ++i) {
                    const double ph = -(tx * static_cast<double>(i * km) + ty * static_cast<double>(j * kn));
                    acc += u[j * m + i] * cplx(std::cos(ph), std::sin(ph));
                }
            out[kn * m + km] = acc;
        }
    return out;
}

} // namespace nlos::oracle
