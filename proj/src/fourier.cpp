#include "varlab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>

namespace varlab {

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

std::vector<cplx> run(std::span<const cplx> x, int sign) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> in(x.begin(), x.end());
    std::vector<cplx> out(x.size());
    if (n == 0) return out;
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan(fftw_plan_dft_1d(n, pin, pout, sign, FFTW_ESTIMATE));
    fftw_execute(plan.get());
    return out;
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> x) { return run(x, FFTW_FORWARD); }

std::vector<cplx> idft(std::span<const cplx> X) {
    auto out = run(X, FFTW_BACKWARD);
    const double s = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (cplx& v : out) v *= s;
    return out;
}

GridSignal frequency_grid(const GridSignal& f) {
    const std::size_t n = f.size();
    const double df = 1.0 / f.extent();
    return GridSignal(-static_cast<double>(n / 2) * df, df, n);
}

GridSignal spectrum(const GridSignal& f) {
    const std::size_t n = f.size();
    const std::size_t half = n / 2;
    const auto X = dft(f.values());
    GridSignal out = frequency_grid(f);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = (k + n - half) % n;
        const double xi = out.x(k);
        out[k] = f.spacing() * X[src] * std::polar(1.0, -2.0 * kPi * xi * f.origin());
    }
    return out;
}

GridSignal inverse_spectrum(const GridSignal& fhat, double time_origin) {
    const std::size_t n = fhat.size();
    const std::size_t half = n / 2;
    std::vector<cplx> X(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dst = (k + n - half) % n;
        X[dst] = fhat[k] * std::polar(1.0, 2.0 * kPi * fhat.x(k) * time_origin);
    }
    const double h = 1.0 / (static_cast<double>(n) * fhat.spacing());
    auto x = idft(X);
    for (cplx& v : x) v /= h;
    return GridSignal(time_origin, h, std::move(x));
}

}  // namespace varlab
