#include "nlos/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace nlos::spectral {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const std::vector<int>& dims_slow_first, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(dims_slow_first, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t total = 1;
        for (int d : dims_slow_first) total *= static_cast<std::size_t>(d);
        std::vector<cplx> scratch(total);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        // ESTIMATE keeps planning deterministic; UNALIGNED lets any buffer reuse the plan.
        fftw_plan plan = fftw_plan_dft(static_cast<int>(dims_slow_first.size()), dims_slow_first.data(), p, p, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw ValidationError("FFT planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<std::vector<int>, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

} // namespace

std::size_t good_fft_size(std::size_t n) {
    if (n <= 1) return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

void fft_inplace(std::span<cplx> data, std::span<const std::size_t> shape, Direction dir) {
    std::vector<int> dims;
    std::size_t total = 1;
    for (auto it = shape.rbegin(); it != shape.rend(); ++it) {
        if (*it == 0) throw ValidationError("FFT extent must be positive");
        dims.push_back(static_cast<int>(*it));
        total *= *it;
    }
    if (total != data.size()) throw ValidationError("FFT buffer size does not match its shape");
    const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = cache().get(dims, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

std::vector<cplx> fft_2d(std::span<const cplx> u, std::size_t nx, std::size_t ny) {
    std::vector<cplx> out(u.begin(), u.end());
    const std::size_t shape[2] = {nx, ny};
    fft_inplace(out, shape, Direction::Forward);
    return out;
}

std::vector<cplx> ifft_2d(std::span<const cplx> u, std::size_t nx, std::size_t ny) {
    std::vector<cplx> out(u.begin(), u.end());
    const std::size_t shape[2] = {nx, ny};
    fft_inplace(out, shape, Direction::Inverse);
    const double scale = 1.0 / static_cast<double>(nx * ny);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> dft_2d(std::span<const cplx> u, std::size_t nx, std::size_t ny) {
    if (u.size() != nx * ny) throw ValidationError("dft_2d input size does not match its shape");
    std::vector<cplx> out(nx * ny);
    for (std::size_t kn = 0; kn < ny; ++kn)
        for (std::size_t km = 0; km < nx; ++km) {
            cplx acc{};
            for (std::size_t n = 0; n < ny; ++n)
                for (std::size_t m = 0; m < nx; ++m) {
                    // reduce the integer products before scaling to keep the phase exact
                    const double ph = -2.0 * kPi *
                                      (static_cast<double>((m * km) % nx) / static_cast<double>(nx) +
                                       static_cast<double>((n * kn) % ny) / static_cast<double>(ny));
                    acc += u[n * nx + m] * cplx(std::cos(ph), std::sin(ph));
                }
            out[kn * nx + km] = acc;
        }
    return out;
}

} // namespace nlos::spectral
