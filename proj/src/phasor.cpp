#include "nlos/phasor.hpp"

#include <cmath>

#include "nlos/fft.hpp"
#include "nlos/parallel.hpp"

namespace nlos::phasor {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}

} // namespace

double PhasorKernel::weight(double omega) const noexcept {
    const double d = omega - omega_c;
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

double PhasorKernel::shortest_wavelength() const noexcept {
    return frequencies.empty() ? 0.0 : 2.0 * kPi * kSpeedOfLight / frequencies.back();
}

PhasorKernel build_kernel(double lambda_c, std::size_t n_bins, double dt, double threshold) {
    require_positive(lambda_c, "central wavelength");
    require_positive(dt, "bin width");
    if (n_bins == 0) throw ValidationError("bin count must be positive");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
    PhasorKernel k;
    k.lambda_c = lambda_c;
    k.omega_c = 2.0 * kPi * kSpeedOfLight / lambda_c;
    k.sigma = kSpeedOfLight / (5.0 * lambda_c);
    k.threshold = threshold;
    k.n_bins = n_bins;
    k.dt = dt;
    const double step = 2.0 * kPi / (static_cast<double>(n_bins) * dt);
    for (std::size_t b = 0; b <= n_bins / 2; ++b) {
        const double w = static_cast<double>(b) * step;
        const double g = k.weight(w);
        if (g < threshold) continue;
        k.bins.push_back(b);
        k.frequencies.push_back(w);
        k.weights.push_back(g);
    }
    if (k.bins.empty())
        throw ValidationError("no frequency bin of the time axis clears the kernel threshold; "
                              "lengthen the time window or raise the central wavelength");
    return k;
}

FrequencySlices to_frequency(const TransientMeasurement& m, const PhasorKernel& k, unsigned threads) {
    m.validate();
    if (k.n_bins != m.n_bins || k.dt != m.dt)
        throw ValidationError("phasor kernel was built for a different time axis");
    FrequencySlices out;
    out.frequencies = k.frequencies;
    out.relay = m.relay;
    out.illuminations = m.illuminations;
    out.confocal = m.confocal;
    const std::size_t nf = k.count();
    const std::size_t pairs = m.n_illum() * m.n_detect();
    out.coefficients.assign(pairs * nf, cplx{});

    const double sign = -kPropagationSign;
    std::vector<cplx> shift(nf);
    for (std::size_t f = 0; f < nf; ++f) shift[f] = std::polar(k.weights[f], sign * k.frequencies[f] * m.t0);
    const auto dir = sign > 0 ? spectral::Direction::Inverse : spectral::Direction::Forward;
    const std::size_t shape[1] = {m.n_bins};

    parallel_for(pairs, threads, [&](std::size_t pair) {
        std::vector<cplx> buf(m.n_bins);
        const float* h = m.histograms.data() + pair * m.n_bins;
        bool any = false;
        for (std::size_t b = 0; b < m.n_bins; ++b) {
            buf[b] = h[b];
            any = any || h[b] != 0.0f;
        }
        if (!any) return;
        spectral::fft_inplace(buf, shape, dir);
        for (std::size_t f = 0; f < nf; ++f) out.coefficients[pair * nf + f] = buf[k.bins[f]] * shift[f];
    });
    return out;
}

double lateral_resolution(double lambda_c, double z, double aperture) {
    require_positive(lambda_c, "central wavelength");
    require_positive(z, "depth");
    require_positive(aperture, "aperture");
    return 1.22 * lambda_c * z / aperture;
}

std::size_t SamplingReport::max_integer_factor() const noexcept {
    if (unbounded()) return std::numeric_limits<std::size_t>::max();
    const double below = std::ceil(ratio) - 1.0;
    return below < 1.0 ? 1 : static_cast<std::size_t>(below);
}

SamplingReport sampling_report(double x_offset, double z_offset, double lambda_star, bool confocal) {
    if (!std::isfinite(x_offset) || !std::isfinite(z_offset)) throw ValidationError("offsets must be finite");
    require_positive(lambda_star, "shortest wavelength");
    if (z_offset == 0.0) throw ValidationError("depth offset must be nonzero");
    SamplingReport r;
    r.confocal = confocal;
    r.lambda_sz = lambda_star / (confocal ? 4.0 : 2.0);
    r.ratio = x_offset == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * std::abs(z_offset) / std::abs(x_offset);
    r.lambda_sx = r.ratio * r.lambda_sz;
    return r;
}

FrustumVolume frustum_volume(double x_in, double y_in, double z_in, double z_out, double alpha, double beta) {
    require_positive(x_in, "base width");
    require_positive(y_in, "base height");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    if (!std::isfinite(z_in) || !std::isfinite(z_out) || !(z_out > z_in))
        throw ValidationError("z_out must exceed z_in");
    const double h = z_out - z_in;
    auto antiderivative = [&](double s) {
        return s * x_in * y_in + 0.5 * s * s * (x_in / beta + y_in / alpha) + s * s * s / (3.0 * alpha * beta);
    };
    FrustumVolume v;
    v.frustum = std::abs(antiderivative(h) - antiderivative(0.0));
    v.cuboid = x_in * y_in * h;
    v.difference = v.frustum - v.cuboid;
    v.increase_percent = 100.0 * v.difference / v.cuboid;
    return v;
}

ScaleBounds scale_bounds(double delta_in, double lambda_c, double aperture, double z) {
    require_positive(delta_in, "input pitch");
    const double dx = lateral_resolution(lambda_c, z, aperture);
    return {dx / 2.0, 2.0 * delta_in / dx};
}

double compression_factor(std::size_t n, double d, std::size_t t, std::size_t f) {
    if (n == 0 || t == 0 || f == 0) throw ValidationError("counts must be positive");
    require_positive(d, "downsampling factor");
    const double kept = std::floor(static_cast<double>(n) / d);
    if (kept < 1.0) throw ValidationError("downsampling factor leaves no samples");
    const double nn = static_cast<double>(n);
    return nn * nn * static_cast<double>(t) / (kept * kept * 2.0 * static_cast<double>(f));
}

} // namespace nlos::phasor
