#include "varlab/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "varlab/fourier.hpp"
#include "varlab/smooth.hpp"

namespace varlab {

namespace {

/// Floor division by 2^k.
std::int64_t floor_shift(std::int64_t m, int k) { return m >= 0 ? m >> k : -((-m - 1) >> k) - 1; }

cplx spectral_inner(const GridSignal& F, const GridSignal& G) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) s += F[k] * std::conj(G[k]);
    return s * F.spacing();
}

GridSignal zero_like(const GridSignal& like) { return GridSignal(like.origin(), like.spacing(), like.size()); }

double max_abs(const GridSignal& s) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, std::abs(s[i]));
    return m;
}

}  // namespace

DInterval to_double(const RInterval& r) { return {r.lo.to_double(), r.hi.to_double()}; }

double window_hat(double xi) {
    if (xi <= 0.0 || xi >= 0.4) return 0.0;
    if (xi <= 0.2) return std::sin(0.5 * kPi * smooth_step(5.0 * xi));
    return std::cos(0.5 * kPi * smooth_step(5.0 * xi - 1.0));
}

GridSignal base_window(std::size_t n) {
    GridSignal w(-1.0, 2.0 / static_cast<double>(n), n);
    for (std::size_t i = 0; i < n; ++i) w[i] = window_hat(w.x(i));
    return w;
}

double chi_tilde(const DInterval& I, double x) {
    const double u = (x - I.center()) / I.length();
    return 1.0 / ((1.0 + u * u) * (1.0 + u * u));
}

GridSignal packet_hat(const DInterval& I, const DInterval& omega, const GridSignal& like) {
    const double area = I.length() * omega.length();
    if (!(std::abs(area - 1.0) <= 1e-12)) domain_fail("packet tile must have area 1, got " + std::to_string(area));
    GridSignal hat = frequency_grid(like);
    const double w = omega.length(), amp = 1.0 / std::sqrt(w), c = omega.center(), cI = I.center();
    for (std::size_t k = 0; k < hat.size(); ++k) {
        const double xi = hat.x(k);
        const double v = window_hat((xi - c) / w);
        hat[k] = v == 0.0 ? cplx(0.0) : std::polar(amp * v, -2.0 * kPi * cI * xi);
    }
    return hat;
}

WavePacket packet(const DInterval& I, const DInterval& omega, const GridSignal& like) {
    WavePacket p;
    p.time = I;
    p.freq = omega;
    p.center_freq = omega.center();
    p.hat = packet_hat(I, omega, like);
    p.samples = inverse_spectrum(p.hat, like.origin());
    return p;
}

WavePacket packet(const TriTile& p, int leg, const GridSignal& like) {
    return packet(to_double(p.time()), to_double(p.freq(leg)), like);
}

std::vector<std::vector<double>> adaptation_constants(const WavePacket& w, int M) {
    if (M < 0) domain_fail("order must be nonnegative");
    const double L = w.samples.extent(), cI = w.time.center(), len = w.time.length();
    std::vector<std::vector<double>> C(M + 1, std::vector<double>(M + 1, 0.0));
    for (int n = 0; n <= M; ++n) {
        GridSignal d = w.hat;
        for (std::size_t k = 0; k < d.size(); ++k) d[k] *= std::pow(cplx(0.0, 2.0 * kPi * (d.x(k) - w.center_freq)), n);
        const GridSignal t = inverse_spectrum(d, w.samples.origin());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double dx = std::remainder(t.x(i) - cI, L);
            const double chi = chi_tilde({-0.5 * len, 0.5 * len}, dx);
            const double v = std::pow(len, n + 0.5) * std::abs(t[i]);
            for (int m = 0; m <= M; ++m) C[n][m] = std::max(C[n][m], v / std::pow(chi, m));
        }
    }
    return C;
}

namespace {

struct AnalysisLayout {
    double len = 0.0;  // |I|
    double w = 0.0;    // |omega|
    std::int64_t m0 = 0;
    std::int64_t count = 0;
    std::int64_t n_lo = 0, n_hi = 0;
};

AnalysisLayout layout(const GridSignal& f, int scale) {
    if (f.size() < 2) domain_fail("analysis needs at least two samples");
    AnalysisLayout a;
    a.len = std::ldexp(1.0, scale);
    a.w = 1.0 / a.len;
    const double per = f.extent() / a.len;
    if (per < 1.0 - 1e-9 || std::abs(per - std::round(per)) > 1e-9)
        domain_fail("time scale 2^" + std::to_string(scale) + " must divide the grid extent");
    if (a.w > 1.0 / f.spacing() + 1e-12) domain_fail("frequency scale 2^" + std::to_string(-scale) + " exceeds the grid band");
    a.count = static_cast<std::int64_t>(std::llround(per));
    a.m0 = static_cast<std::int64_t>(std::ceil(f.origin() / a.len - 1e-9));
    const GridSignal F = frequency_grid(f);
    a.n_lo = static_cast<std::int64_t>(std::floor(F.x(0) / a.w)) - 2;
    a.n_hi = static_cast<std::int64_t>(std::ceil(F.x(F.size() - 1) / a.w)) + 1;
    return a;
}

}  // namespace

PacketAnalysis analyze(const GridSignal& f, int scale) {
    const AnalysisLayout lay = layout(f, scale);
    PacketAnalysis out;
    out.scale = scale;
    out.grid = zero_like(f);
    const GridSignal F = spectrum(f);
    const double dxi = F.spacing(), amp = 1.0 / std::sqrt(lay.w);
    std::vector<std::size_t> idx;
    std::vector<cplx> wts;
    for (std::int64_t n = lay.n_lo; n <= lay.n_hi; ++n) {
        for (int j = 0; j < 5; ++j) {
            const double c = lay.w * (static_cast<double>(n) + j / 5.0 + 0.5);
            idx.clear();
            wts.clear();
            const auto k0 = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor((c - F.origin()) / dxi)));
            const auto k1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(F.size()) - 1,
                                                     static_cast<std::ptrdiff_t>(std::ceil((c + 0.4 * lay.w - F.origin()) / dxi)));
            for (std::ptrdiff_t kk = k0; kk <= k1; ++kk) {
                const auto k = static_cast<std::size_t>(kk);
                const double v = window_hat((F.x(k) - c) / lay.w);
                if (v == 0.0) continue;
                idx.push_back(k);
                wts.push_back(F[k] * (amp * v * dxi));
            }
            if (idx.empty()) continue;
            for (std::int64_t q = 0; q < lay.count; ++q) {
                const std::int64_t m = lay.m0 + q;
                const double cI = lay.len * (static_cast<double>(m) + 0.5);
                cplx s = 0.0;
                for (std::size_t t = 0; t < idx.size(); ++t) s += wts[t] * std::polar(1.0, 2.0 * kPi * cI * F.x(idx[t]));
                out.coefficients[{m, n, j}] = s;
            }
        }
    }
    return out;
}

GridSignal synthesize(const PacketAnalysis& a) {
    GridSignal G = frequency_grid(a.grid);
    const double len = std::ldexp(1.0, a.scale), w = 1.0 / len, amp = 1.0 / std::sqrt(w);
    for (const auto& [ix, coef] : a.coefficients) {
        if (coef == 0.0) continue;
        const double c = w * (static_cast<double>(ix.n) + ix.j / 5.0 + 0.5);
        const double cI = len * (static_cast<double>(ix.m) + 0.5);
        const auto k0 = static_cast<std::ptrdiff_t>(std::floor((c - G.origin()) / G.spacing()));
        const auto k1 = static_cast<std::ptrdiff_t>(std::ceil((c + 0.4 * w - G.origin()) / G.spacing()));
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(k0, 0); k <= k1 && k < static_cast<std::ptrdiff_t>(G.size()); ++k) {
            const double xi = G.x(static_cast<std::size_t>(k));
            const double v = window_hat((xi - c) / w);
            if (v != 0.0) G[static_cast<std::size_t>(k)] += coef * std::polar(amp * v, -2.0 * kPi * cI * xi);
        }
    }
    return inverse_spectrum(G, a.grid.origin());
}

double round_trip_error(const GridSignal& f, int scale) {
    const GridSignal g = synthesize(analyze(f, scale));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += std::norm(g[i] - f[i]);
        den += std::norm(f[i]);
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

CoefficientMap packet_coefficients(std::span<const TriTile> P, const GridSignal& f, int leg) {
    CoefficientMap c;
    c.leg = leg;
    const GridSignal F = spectrum(f);
    for (const auto& p : P) c.entries[p] = spectral_inner(F, packet_hat(to_double(p.time()), to_double(p.freq(leg)), f));
    return c;
}

GridSignal synthesize_tiles(const CoefficientMap& c, int leg, const GridSignal& like) {
    GridSignal G = frequency_grid(like);
    for (const auto& [p, v] : c.entries) {
        const GridSignal h = packet_hat(to_double(p.time()), to_double(p.freq(leg)), like);
        for (std::size_t k = 0; k < G.size(); ++k) G[k] += v * h[k];
    }
    return inverse_spectrum(G, like.origin());
}

double proxy_value(const DInterval& I, const GridSignal& f, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        if (a == 0.0) continue;
        const double chi = chi_tilde(I, f.x(i));
        acc += std::pow(a, s) * chi * chi;
    }
    return std::pow(acc * f.spacing() / I.length(), 1.0 / s);
}

double size_upper_proxy(std::span<const TriTile> P, const GridSignal& f, double s) {
    if (!(s > 1.0)) domain_fail("size proxy needs s > 1");
    using Dyadic = std::pair<int, std::int64_t>;  // 2^-scale [m, m+1)
    std::set<Dyadic> outer;
    for (const auto& p : P) outer.insert({p.scale, p.m});
    auto inside_some = [&](const Dyadic& d) {
        for (const auto& [s2, m2] : outer)
            if (s2 <= d.first && floor_shift(d.second, d.first - s2) == m2) return true;
        return false;
    };
    const int coarsest = outer.empty() ? 0 : outer.begin()->first;
    std::set<Dyadic> candidates;
    for (const auto& [sc, m] : outer) {
        for (Dyadic d{sc, m}; d.first >= coarsest; d = {d.first - 1, floor_shift(d.second, 1)}) {
            if (!inside_some(d)) break;
            candidates.insert(d);
        }
    }
    double best = 0.0;
    for (const auto& [sc, m] : candidates) {
        const double len = std::ldexp(1.0, -sc);
        best = std::max(best, proxy_value({len * static_cast<double>(m), len * static_cast<double>(m + 1)}, f, s));
    }
    return best;
}

double bessel_ratio(std::span<const Tree> trees, const CoefficientMap& b, int j, const GridSignal& like) {
    const auto verdict = strongly_j_disjoint(trees, j);
    if (!verdict.ok) domain_fail("bessel_ratio needs strongly disjoint trees: " + verdict.message);
    CoefficientMap q;
    double norm2 = 0.0;
    for (const auto& t : trees)
        for (const auto& p : t.members)
            if (!q.entries.count(p)) {
                q.entries[p] = b.at(p);
                norm2 += std::norm(q.entries[p]);
            }
    if (q.entries.empty() || norm2 == 0.0) return 0.0;
    const auto L = static_cast<double>(collection_stats(trees).sup);
    return synthesize_tiles(q, j, like).l2_norm() / (std::log(1.0 + L) * std::sqrt(norm2));
}

namespace {

void validate(const ModulationData& mod, const GridSignal& f3) {
    auto on_grid = [&](const GridSignal& g) {
        if (!same_grid(g, f3, 1e-9)) domain_fail("modulation functions must live on the grid of f3");
    };
    if (mod.mode == Modulation::variation) {
        if (mod.breaks.size() < 2 || mod.a.size() + 1 != mod.breaks.size())
            domain_fail("variation modulation needs breaks k_0 < ... < k_L and a_1..a_L");
        if (!std::is_sorted(mod.breaks.begin(), mod.breaks.end()) ||
            std::adjacent_find(mod.breaks.begin(), mod.breaks.end()) != mod.breaks.end())
            domain_fail("breaks must be strictly increasing");
        if (!(mod.r > 1.0)) domain_fail("variation modulation needs r > 1");
        const double rp = mod.r / (mod.r - 1.0);
        for (const auto& g : mod.a) on_grid(g);
        for (std::size_t i = 0; i < f3.size(); ++i) {
            double s = 0.0;
            for (const auto& g : mod.a) s += std::pow(std::abs(g[i]), rp);
            if (s > 1.0 + 1e-12) domain_fail("sum |a_n|^{r'} exceeds 1");
        }
    } else if (mod.mode == Modulation::square) {
        if (mod.d.empty()) domain_fail("square modulation needs d_n");
        for (const auto& [n, g] : mod.d) on_grid(g);
        for (std::size_t i = 0; i < f3.size(); ++i) {
            double s = 0.0;
            for (const auto& [n, g] : mod.d) s += std::norm(g[i]);
            if (s > 1.0 + 1e-12) domain_fail("sum |d_n|^2 exceeds 1");
        }
    }
}

/// a_P as a function on the grid; nullptr when identically 1; empty GridSignal when identically 0.
const GridSignal* modulation_for(const TriTile& p, const ModulationData& mod, bool& zero) {
    zero = false;
    const int lg = -p.scale;  // |I_P| = 2^lg
    if (mod.mode == Modulation::variation) {
        for (std::size_t m = 1; m < mod.breaks.size(); ++m)
            if (mod.breaks[m - 1] <= lg && lg < mod.breaks[m]) return &mod.a[m - 1];
        zero = true;
    } else if (mod.mode == Modulation::square) {
        const auto it = mod.d.find(lg);
        if (it != mod.d.end()) return &it->second;
        zero = true;
    }
    return nullptr;
}

}  // namespace

cplx model_trilinear_form(std::span<const TriTile> P, const GridSignal& f1, const GridSignal& f2, const GridSignal& f3,
                          const ModulationData& mod) {
    if (!same_grid(f1, f2, 1e-9) || !same_grid(f1, f3, 1e-9)) domain_fail("f1, f2, f3 must share a grid");
    validate(mod, f3);
    if (P.empty()) return 0.0;
    const GridSignal F1 = spectrum(f1), F2 = spectrum(f2), F3 = spectrum(f3);
    cplx total = 0.0;
    for (const auto& p : P) {
        bool zero = false;
        const GridSignal* a = modulation_for(p, mod, zero);
        if (zero) continue;
        const DInterval I = to_double(p.time());
        const cplx c1 = spectral_inner(F1, packet_hat(I, to_double(p.freq(1)), f1));
        const cplx c2 = spectral_inner(F2, packet_hat(I, to_double(p.freq(2)), f2));
        if (c1 == 0.0 || c2 == 0.0) continue;
        const GridSignal h3 = packet_hat(I, to_double(p.freq(3)), f3);
        cplx c3;
        if (!a) {
            c3 = spectral_inner(h3, F3);
        } else {
            GridSignal t = inverse_spectrum(h3, f3.origin());
            for (std::size_t i = 0; i < t.size(); ++i) t[i] *= (*a)[i];
            c3 = inner(t, f3);
        }
        total += c1 * c2 * c3 / std::sqrt(I.length());
    }
    return total;
}

double restricted_type_ratio(cplx lambda, const std::array<double, 3>& measures, const std::array<double, 3>& alpha) {
    double den = 1.0;
    for (int i = 0; i < 3; ++i) {
        if (!(measures[i] > 0.0)) domain_fail("restricted-type ratio needs sets of positive measure");
        den *= std::pow(measures[i], alpha[i]);
    }
    return std::abs(lambda) / den;
}

double truncation_zeta_hat(double xi, double kappa) {
    const double a = std::abs(xi) / kappa;
    return 1.0 - smooth_step(a - 10000.0);
}

double truncation_identity_error(const Tree& T, const CoefficientMap& c, int j, int k, const GridSignal& like,
                                 const TruncationParams& params) {
    if (j < 1 || j > 3) domain_fail("leg must be 1, 2 or 3");
    if (params.stride <= 0 || !(params.kappa > 0.0)) domain_fail("truncation needs stride > 0 and kappa > 0");
    if (((k + T.top.nu.i) % params.stride + params.stride) % params.stride != 0)
        domain_fail("k must be congruent to -i modulo the stride");
    if (k > -T.top.scale) domain_fail("2^k must not exceed |I_T|");
    for (const auto& p : T.members)
        if (((p.scale - T.top.nu.i) % params.stride + params.stride) % params.stride != 0)
            domain_fail("member scale does not respect the stride residue");
    if (T.members.empty()) return 0.0;
    const double c0 = to_double(T.top.freq(j)).center();
    GridSignal kept = frequency_grid(like), full = frequency_grid(like);
    for (const auto& p : T.members) {
        const cplx v = c.at(p);
        const GridSignal h = packet_hat(to_double(p.time()), to_double(p.freq(j)), like);
        const bool big = -p.scale >= k;
        for (std::size_t q = 0; q < h.size(); ++q) {
            full[q] += v * h[q];
            if (big) kept[q] += v * h[q];
        }
    }
    const double dil = std::ldexp(1.0, k);
    GridSignal diff = kept;
    for (std::size_t q = 0; q < diff.size(); ++q)
        diff[q] -= truncation_zeta_hat(dil * (diff.x(q) - c0), params.kappa) * full[q];
    return max_abs(inverse_spectrum(diff, like.origin()));
}

}  // namespace varlab
