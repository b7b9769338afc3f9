#include "varlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "varlab/fourier.hpp"
#include "varlab/smooth.hpp"

namespace varlab {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
    return std::sin(kPi * x) / (kPi * x);
}

cplx interpolate(const GridSignal& s, double y) {
    if (s.size() == 0) return 0.0;
    const double u = (y - s.origin()) / s.spacing();
    if (u < 0.0 || u > static_cast<double>(s.size() - 1)) return 0.0;
    if (s.size() == 1) return s[0];
    const auto i = std::min(static_cast<std::size_t>(u), s.size() - 2);
    const double w = u - static_cast<double>(i);
    return (1.0 - w) * s[i] + w * s[i + 1];
}

/// Five-point central derivative of a closure.
cplx derivative(const ScalarFn& f, double x) {
    const double d = 1e-3 * std::max(1.0, std::abs(x));
    return (f(x - 2 * d) - 8.0 * f(x - d) + 8.0 * f(x + d) - f(x + 2 * d)) / (12.0 * d);
}

/// Five-point central derivative of samples (one-sided near the ends).
std::vector<cplx> sample_derivative(const GridSignal& s) {
    const std::size_t n = s.size();
    if (n < 5) domain_fail("grid too coarse for differentiation");
    const double h = s.spacing();
    std::vector<cplx> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n)
            d[i] = (s[i - 2] - 8.0 * s[i - 1] + 8.0 * s[i + 1] - s[i + 2]) / (12.0 * h);
        else if (i + 1 < n && i >= 1)
            d[i] = (s[i + 1] - s[i - 1]) / (2.0 * h);
        else if (i == 0)
            d[i] = (s[1] - s[0]) / h;
        else
            d[i] = (s[i] - s[i - 1]) / h;
    }
    return d;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

/// CDF of the cardinal B-spline of order q on [0, q].
double spline_cdf(int q, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= q) return 1.0;
    double s = 0.0, fact = 1.0;
    for (int i = 2; i <= q; ++i) fact *= i;
    for (int k = 0; k <= q && k < x; ++k) s += ((k % 2) ? -1.0 : 1.0) * binomial(q, k) * std::pow(x - k, q);
    return std::clamp(s / fact, 0.0, 1.0);
}

}  // namespace

cplx KernelProfile::at(double y) const { return time_fn ? time_fn(y) : interpolate(time_samples, y); }

cplx KernelProfile::hat(double xi) const { return freq_fn ? freq_fn(xi) : interpolate(freq_samples, xi); }

KernelProfile make_kernel(std::string name, ScalarFn time_fn, ScalarFn freq_fn, const KernelGrid& grid) {
    if (grid.size < 8 || !(grid.extent > 0.0)) domain_fail("kernel grid needs >= 8 samples and positive extent");
    KernelProfile k;
    k.name = std::move(name);
    k.time_fn = std::move(time_fn);
    k.freq_fn = std::move(freq_fn);
    const double h = grid.extent / static_cast<double>(grid.size);
    k.time_samples = GridSignal(-grid.extent / 2, h, grid.size);
    k.freq_samples = frequency_grid(k.time_samples);
    if (k.time_fn)
        for (std::size_t i = 0; i < grid.size; ++i) k.time_samples[i] = k.time_fn(k.time_samples.x(i));
    if (k.freq_fn)
        for (std::size_t i = 0; i < grid.size; ++i) k.freq_samples[i] = k.freq_fn(k.freq_samples.x(i));
    if (!k.freq_fn) k.freq_samples = spectrum(k.time_samples);
    if (!k.time_fn) k.time_samples = inverse_spectrum(k.freq_samples, k.time_samples.origin());
    return k;
}

KernelProfile kernel_from_samples(std::string name, GridSignal time_samples) {
    if (time_samples.size() < 8) domain_fail("kernel needs at least 8 samples");
    KernelProfile k;
    k.name = std::move(name);
    k.freq_samples = spectrum(time_samples);
    k.time_samples = std::move(time_samples);
    return k;
}

KernelProfile load_kernel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel file " + path);
    std::vector<double> ys;
    std::vector<cplx> vs;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double y = 0.0, re = 0.0, im = 0.0;
        if (!(row >> y >> re)) {
            if (ys.empty()) continue;
            throw ConfigError("malformed kernel row: " + line);
        }
        if (!(row >> im)) im = 0.0;
        ys.push_back(y);
        vs.emplace_back(re, im);
    }
    if (ys.size() < 8) throw ConfigError("kernel file needs at least 8 rows");
    const double h = ys[1] - ys[0];
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (std::abs(ys[i] - ys[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)) || !(h > 0))
            throw ConfigError("kernel samples must be uniformly spaced and increasing");
    return kernel_from_samples(path, GridSignal(ys.front(), h, std::move(vs)));
}

KernelProfile gaussian_kernel(const KernelGrid& grid) {
    return make_kernel("gaussian", [](double y) { return cplx(std::exp(-kPi * y * y)); },
                       [](double xi) { return cplx(std::exp(-kPi * xi * xi)); }, grid);
}

KernelProfile gaussian_derivative_kernel(const KernelGrid& grid) {
    return make_kernel(
        "gaussian-derivative", [](double y) { return cplx(-2.0 * kPi * y * std::exp(-kPi * y * y)); },
        [](double xi) { return cplx(0.0, 2.0 * kPi * xi * std::exp(-kPi * xi * xi)); }, grid);
}

KernelProfile abs_gaussian_kernel(const KernelGrid& grid) {
    return make_kernel("abs-gaussian", nullptr, [](double xi) { return cplx(std::abs(xi) * std::exp(-kPi * xi * xi)); },
                       grid);
}

KernelProfile box_kernel(const KernelGrid& grid) {
    return make_kernel(
        "box",
        [](double y) {
            if (y > 0.0 && y < 1.0) return cplx(1.0);
            return cplx((y == 0.0 || y == 1.0) ? 0.5 : 0.0);
        },
        [](double xi) { return std::polar(1.0, -kPi * xi) * sinc(xi); }, grid);
}

KernelProfile mollified_box_kernel(double alpha, int spline_order, const KernelGrid& grid) {
    if (!(alpha > 0.0 && alpha < 0.5)) domain_fail("mollified box needs 0 < alpha < 1/2");
    if (spline_order < 1 || spline_order > 16) domain_fail("spline order must lie in 1..16");
    const double w = alpha / spline_order;
    const double a = alpha / 2, b = 1.0 - alpha / 2;
    const int q = spline_order;
    auto K = [=](double y) {
        return cplx(spline_cdf(q, (y - a) / w + q / 2.0) - spline_cdf(q, (y - b) / w + q / 2.0));
    };
    auto Khat = [=](double xi) {
        return std::polar(1.0, -kPi * xi) * ((b - a) * sinc((b - a) * xi) * std::pow(sinc(w * xi), q));
    };
    auto k = make_kernel("mollified-box", K, Khat, grid);
    k.order = q - 2;
    return k;
}

KernelProfile builtin_kernel(const std::string& name, double alpha, const KernelGrid& grid) {
    if (name == "gaussian") return gaussian_kernel(grid);
    if (name == "gaussian-derivative") return gaussian_derivative_kernel(grid);
    if (name == "abs-gaussian") return abs_gaussian_kernel(grid);
    if (name == "box") return box_kernel(grid);
    if (name == "mollified-box") return mollified_box_kernel(alpha, 8, grid);
    throw ConfigError("unknown kernel " + name);
}

KernelProfile reflect(const KernelProfile& k) {
    KernelProfile r;
    r.name = k.name + "-reflected";
    r.order = k.order;
    if (k.time_fn) r.time_fn = [f = k.time_fn](double y) { return f(-y); };
    if (k.freq_fn) r.freq_fn = [f = k.freq_fn](double xi) { return f(-xi); };
    auto flip = [](const GridSignal& s) {
        const std::size_t n = s.size();
        GridSignal out(-(s.origin() + static_cast<double>(n - 1) * s.spacing()), s.spacing(), n);
        for (std::size_t i = 0; i < n; ++i) out[i] = s[n - 1 - i];
        return out;
    };
    r.time_samples = flip(k.time_samples);
    r.freq_samples = flip(k.freq_samples);
    return r;
}

double profile_consistency(const KernelProfile& k) {
    const GridSignal s = spectrum(k.time_samples);
    if (!same_grid(s, k.freq_samples, 1e-9)) domain_fail("time and frequency grids do not correspond");
    double dev = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        dev = std::max(dev, std::abs(s[i] - k.freq_samples[i]));
        scale = std::max(scale, std::abs(k.freq_samples[i]));
    }
    return scale > 0.0 ? dev / scale : dev;
}

bool KernelConditions::ok() const {
    return std::none_of(growing.begin(), growing.end(), [](bool g) { return g; });
}

KernelConditions check_kernel_conditions(const KernelProfile& k, int n0) {
    if (n0 < 0) domain_fail("n0 must be nonnegative");
    const GridSignal& f = k.freq_samples;
    const std::size_t N = f.size();
    if (N < 8 * static_cast<std::size_t>(n0 + 1)) domain_fail("frequency grid too coarse for the requested order");
    const double h = f.spacing();
    double fmax = 0.0, xmax = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        fmax = std::max(fmax, std::abs(f[i]));
        xmax = std::max(xmax, std::abs(f.x(i)));
    }
    KernelConditions out;
    for (int n = 0; n <= n0; ++n) {
        const double noise = 64.0 * std::pow(2.0, n) * 1e-16 * fmax / std::pow(h, n);
        struct Point {
            double x, r;
        };
        std::vector<Point> pts;
        for (std::size_t s = 0; s + static_cast<std::size_t>(n) < N; ++s) {
            const double lo = f.x(s), hi = f.x(s + static_cast<std::size_t>(n));
            const double x = lo + 0.5 * n * h;
            if (lo <= 0.0 && hi >= 0.0) continue;
            cplx d = 0.0;
            for (int i = 0; i <= n; ++i)
                d += (((n - i) % 2) ? -1.0 : 1.0) * binomial(n, i) * f[s + static_cast<std::size_t>(i)];
            double mag = std::abs(d) / std::pow(h, n);
            if (n > 0 && mag <= noise) mag = 0.0;
            const double ax = std::abs(x);
            const double bound = n == 0 ? std::min(1.0, 1.0 / ax) : std::min(std::pow(ax, 1 - n), std::pow(ax, -n - 1));
            pts.push_back({ax, mag / bound});
        }
        double all = 0.0, inner = 0.0, xmin = xmax;
        for (const auto& p : pts) xmin = std::min(xmin, p.x);
        for (const auto& p : pts) {
            all = std::max(all, p.r);
            if (p.x >= 2.0 * xmin && p.x <= xmax / 2.0) inner = std::max(inner, p.r);
        }
        out.constants.push_back(all);
        out.growing.push_back(all > 1.5 * inner && all > 0.0);
    }
    return out;
}

double KernelDecomposition::eta(double xi) {
    const double a = std::abs(xi);
    if (!(a > 1000.0 && a < 4000.0)) return 0.0;
    auto b = [](double t) { return (t > 0.0 && t < 2.0) ? smooth_step(t) * smooth_step(2.0 - t) : 0.0; };
    const double t = std::log2(a / 1000.0);
    const double frac = t - std::floor(t);
    return b(t) / (b(frac) + b(frac + 1.0));
}

cplx KernelDecomposition::near_hat(double xi) const {
    if (!has_near_part) return 0.0;
    const cplx z = xi >= 0.0 ? zero_plus : zero_minus;
    const double a = std::abs(xi);
    if (a <= 1000.0) return z;
    if (a >= 2000.0) return 0.0;
    return z * eta(2.0 * xi);
}

cplx KernelDecomposition::piece_hat(int j, double xi) const {
    const double e = eta(xi);
    if (e == 0.0) return 0.0;
    const double u = std::ldexp(xi, -j);
    return std::ldexp(1.0, std::abs(j)) * (khat(u) - near_hat(u)) * e;
}

cplx KernelDecomposition::generator_hat(int j, double xi) const { return piece_hat(j, xi) - piece_hat(j, 2.0 * xi); }

cplx KernelDecomposition::near_generator_hat(double xi) const { return near_hat(xi) - near_hat(2.0 * xi); }

cplx KernelDecomposition::evaluate(double xi) const {
    cplx s = near_hat(xi);
    for (const auto& p : pieces) s += p.weight * piece_hat(p.j, std::ldexp(xi, p.j));
    return s;
}

KernelDecomposition decompose_kernel(const KernelProfile& k) {
    KernelDecomposition d;
    d.khat = [k](double xi) { return k.hat(xi); };

    auto limit = [&](double sgn) {
        const cplx a = k.hat(sgn * std::ldexp(1.0, -30));
        const cplx b = 2.0 * k.hat(sgn * std::ldexp(1.0, -40)) - k.hat(sgn * std::ldexp(1.0, -39));
        if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b)) || std::abs(a - b) > 1e-8 * std::max(1.0, std::abs(b)))
            domain_fail("one-sided limit of Khat at 0 is not numerically stable: Khat(" + std::to_string(sgn) +
                        "*2^-30) and Khat(" + std::to_string(sgn) + "*2^-40) differ by " + std::to_string(std::abs(a - b)));
        return std::abs(b) < 1e-10 ? cplx(0.0) : b;
    };
    d.zero_plus = limit(1.0);
    d.zero_minus = limit(-1.0);
    d.has_near_part = d.zero_plus != 0.0 || d.zero_minus != 0.0;

    // magnitude of c_j Khat_j over the support of eta, sampled on a log grid of both signs
    std::vector<double> probe;
    for (int i = 0; i <= 256; ++i) {
        const double x = 1000.0 * std::pow(4.0, i / 256.0);
        probe.push_back(x);
        probe.push_back(-x);
    }
    auto magnitude = [&](int j) {
        double m = 0.0;
        for (double x : probe) m = std::max(m, std::abs((d.khat(std::ldexp(x, -j)) - d.near_hat(std::ldexp(x, -j))) *
                                                        KernelDecomposition::eta(x)));
        return m;
    };
    constexpr int kRange = 100;
    std::vector<double> mags;
    for (int j = -kRange; j <= kRange; ++j) mags.push_back(magnitude(j));
    if (mags.front() >= kDecompositionCutoff || mags.back() >= kDecompositionCutoff)
        domain_fail("decomposition does not decay within |j| <= " + std::to_string(kRange));
    int lo = kRange + 1, hi = -kRange - 1;
    for (int j = -kRange; j <= kRange; ++j)
        if (mags[static_cast<std::size_t>(j + kRange)] >= kDecompositionCutoff) {
            lo = std::min(lo, j);
            hi = std::max(hi, j);
        }
    for (int j = -kRange; j <= kRange; ++j)
        if (j < lo || j > hi) d.truncation_tail = std::max(d.truncation_tail, mags[static_cast<std::size_t>(j + kRange)]);

    constexpr std::size_t kGen = 1024;
    const double gh = 9.0;
    auto sample = [&](auto&& fn) {
        GridSignal g(-4608.0, gh, kGen);
        for (std::size_t i = 0; i < kGen; ++i) g[i] = fn(g.x(i));
        return g;
    };
    auto supported = [](const GridSignal& g) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double a = std::abs(g.x(i));
            if ((a < 500.0 || a > 4000.0) && g[i] != 0.0) return false;
        }
        return true;
    };
    for (int j = lo; j <= hi; ++j) {
        KernelPiece p;
        p.j = j;
        p.weight = std::ldexp(1.0, -std::abs(j));
        p.generator = sample([&](double x) { return d.generator_hat(j, x); });
        p.support_ok = supported(p.generator);
        d.pieces.push_back(std::move(p));
    }
    if (d.has_near_part) d.near_generator = sample([&](double x) { return d.near_generator_hat(x); });

    const GridSignal& grid = k.freq_samples;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        if (x == 0.0) continue;
        d.reconstruction_error = std::max(d.reconstruction_error, std::abs(d.khat(x) - d.evaluate(x)));
    }

    for (int i = 0; i <= 400; ++i) {
        const double x = 100.0 * std::pow(80.0, i / 400.0);
        for (double sx : {x, -x}) {
            for (const auto& p : d.pieces) {
                cplx s = 0.0;
                for (double y = sx; std::abs(y) <= 4000.0; y *= 2.0) s += d.generator_hat(p.j, y);
                d.telescoping_error = std::max(d.telescoping_error, std::abs(s - d.piece_hat(p.j, sx)));
            }
            if (d.has_near_part) {
                const double y0 = sx / 64.0;
                cplx s = 0.0;
                for (double y = y0; std::abs(y) <= 4000.0; y *= 2.0) s += d.near_generator_hat(y);
                d.telescoping_error = std::max(d.telescoping_error, std::abs(s - d.near_hat(y0)));
            }
        }
    }
    return d;
}

BilinearResult bilinear_apply(const KernelProfile& k, double t, const GridSignal& f1, const GridSignal& f2) {
    if (!(t > 0.0)) domain_fail("bilinear_apply needs t > 0");
    if (!same_grid(f1, f2)) domain_fail("bilinear_apply needs f1 and f2 on the same grid");
    const std::size_t N = f1.size();
    if (N < 2) domain_fail("bilinear_apply needs at least two samples");
    const double h = f1.spacing();
    const auto half = static_cast<std::ptrdiff_t>(N / 2);
    const auto sN = static_cast<std::ptrdiff_t>(N);

    std::vector<cplx> kv(N);
    for (std::ptrdiff_t m = -half; m < sN - half; ++m)
        kv[static_cast<std::size_t>(m + half)] = k.at(static_cast<double>(m) * h / t) / t;
    BilinearResult out;
    out.direct = GridSignal(f1.origin(), h, N);
    for (std::ptrdiff_t i = 0; i < sN; ++i) {
        cplx s = 0.0;
        for (std::ptrdiff_t m = -half; m < sN - half; ++m) {
            const auto a = static_cast<std::size_t>(((i + m) % sN + sN) % sN);
            const auto b = static_cast<std::size_t>(((i - m) % sN + sN) % sN);
            s += f1[a] * f2[b] * kv[static_cast<std::size_t>(m + half)];
        }
        out.direct[static_cast<std::size_t>(i)] = h * s;
    }

    const GridSignal F1 = spectrum(f1), F2 = spectrum(f2);
    const double dxi = F1.spacing();
    std::vector<cplx> khat(2 * N - 1);
    for (std::ptrdiff_t d = -(sN - 1); d <= sN - 1; ++d)
        khat[static_cast<std::size_t>(d + sN - 1)] = k.hat(t * static_cast<double>(d) * dxi);
    const cplx wrap_phase = std::polar(1.0, 2.0 * kPi * f1.origin() / h);
    GridSignal G(F1.origin(), dxi, N);
    for (std::ptrdiff_t p = 0; p < sN; ++p) {
        if (F1[static_cast<std::size_t>(p)] == 0.0) continue;
        for (std::ptrdiff_t q = 0; q < sN; ++q) {
            const std::ptrdiff_t u = p + q - half;
            const std::ptrdiff_t w = (u >= sN) ? 1 : (u < 0 ? -1 : 0);
            const cplx phase = w == 0 ? cplx(1.0) : (w > 0 ? wrap_phase : std::conj(wrap_phase));
            G[static_cast<std::size_t>(u - w * sN)] += F1[static_cast<std::size_t>(p)] * F2[static_cast<std::size_t>(q)] *
                                                      khat[static_cast<std::size_t>(q - p + sN - 1)] * dxi * phase;
        }
    }
    out.spectral = inverse_spectrum(G, f1.origin());

    double dev = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        dev = std::max(dev, std::abs(out.direct[i] - out.spectral[i]));
        scale = std::max(scale, std::abs(out.direct[i]));
    }
    out.deviation = scale > 0.0 ? dev / scale : dev;
    return out;
}

KernelProfile derive_short_kernel(const KernelProfile& k) {
    KernelProfile h;
    h.name = k.name + "-short";
    h.order = k.order;
    if (k.time_samples.size() < 5 || k.freq_samples.size() < 5) domain_fail("grid too coarse for differentiation");
    if (k.time_fn) h.time_fn = [f = k.time_fn](double y) { return -(f(y) + y * derivative(f, y)); };
    if (k.freq_fn) h.freq_fn = [f = k.freq_fn](double xi) { return xi * derivative(f, xi); };

    h.time_samples = k.time_samples;
    if (h.time_fn) {
        for (std::size_t i = 0; i < h.time_samples.size(); ++i) h.time_samples[i] = h.time_fn(h.time_samples.x(i));
    } else {
        const auto d = sample_derivative(k.time_samples);
        for (std::size_t i = 0; i < h.time_samples.size(); ++i)
            h.time_samples[i] = -(k.time_samples[i] + k.time_samples.x(i) * d[i]);
    }
    h.freq_samples = k.freq_samples;
    if (h.freq_fn) {
        for (std::size_t i = 0; i < h.freq_samples.size(); ++i) h.freq_samples[i] = h.freq_fn(h.freq_samples.x(i));
    } else {
        const auto d = sample_derivative(k.freq_samples);
        for (std::size_t i = 0; i < h.freq_samples.size(); ++i) h.freq_samples[i] = k.freq_samples.x(i) * d[i];
    }
    return h;
}

}  // namespace varlab
