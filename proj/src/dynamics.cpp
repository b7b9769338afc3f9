#include "varlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace varlab {

CyclicSystem::CyclicSystem(std::int64_t n, std::int64_t step) : n_(n), step_(step) {
    if (n < 1) domain_fail("cyclic system needs N >= 1");
    step_ = ((step % n) + n) % n;
}

std::int64_t CyclicSystem::orbit(std::int64_t x, std::int64_t k) const {
    const __int128 v = static_cast<__int128>(x) + static_cast<__int128>(k) * step_;
    __int128 r = v % n_;
    if (r < 0) r += n_;
    return static_cast<std::int64_t>(r);
}

Observable compose(const CyclicSystem& sys, std::span<const cplx> g) {
    if (static_cast<std::int64_t>(g.size()) != sys.size()) domain_fail("observable length differs from N");
    Observable out(g.size());
    for (std::int64_t x = 0; x < sys.size(); ++x) out[x] = g[sys.orbit(x, 1)];
    return out;
}

std::vector<cplx> bilinear_average_series(const CyclicSystem& sys, std::span<const cplx> f1,
                                          std::span<const cplx> f2, std::int64_t x, std::size_t kmax) {
    const auto n = static_cast<std::size_t>(sys.size());
    if (f1.size() != n || f2.size() != n) domain_fail("observable length differs from N");
    if (kmax < 1) domain_fail("kmax must be at least 1");
    std::vector<cplx> out;
    out.reserve(kmax);
    std::int64_t fwd = sys.orbit(x, 0);
    std::int64_t bwd = fwd;
    const std::int64_t back = sys.size() - sys.step();
    cplx sum{};
    for (std::size_t k = 1; k <= kmax; ++k) {
        sum += f1[fwd] * f2[bwd];
        out.push_back(sum / static_cast<double>(k));
        fwd = (fwd + sys.step()) % sys.size();
        bwd = (bwd + back) % sys.size();
    }
    return out;
}

namespace {

std::int64_t whole_cells(double t, double h) {
    const double q = t / h;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(q));
}

}  // namespace

std::vector<cplx> continuous_average_series(const GridSignal& F1, const GridSignal& F2, double x,
                                            std::span<const double> t_grid) {
    const double h = F1.spacing();
    if (std::abs(F2.spacing() - h) > 1e-12 * h) domain_fail("signals have incompatible spacings");
    std::vector<cplx> out;
    out.reserve(t_grid.size());
    cplx acc{};
    std::int64_t done = 0;
    double prev = 0.0;
    for (double t : t_grid) {
        if (!(t > prev)) domain_fail("t_grid must be positive and increasing");
        prev = t;
        const std::int64_t cells = whole_cells(t, h);
        for (; done < cells; ++done) {
            const double y = (static_cast<double>(done) + 0.5) * h;
            acc += F1.cell_value(x + y) * F2.cell_value(x - y) * h;
        }
        cplx total = acc;
        const double w = t - static_cast<double>(cells) * h;
        if (w > 1e-12 * h) {
            const double y = static_cast<double>(cells) * h + 0.5 * w;
            total += F1.cell_value(x + y) * F2.cell_value(x - y) * w;
        }
        out.push_back(total / t);
    }
    return out;
}

cplx IntSequence::at(std::int64_t n) const {
    const std::int64_t k = n - offset;
    if (k < 0 || k >= static_cast<std::int64_t>(values.size())) return {};
    return values[static_cast<std::size_t>(k)];
}

namespace {

std::int64_t cells_per_unit(double h) {
    if (!(h > 0.0)) domain_fail("grid spacing must be positive");
    const double q = 1.0 / h;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * q || static_cast<std::int64_t>(r) % 6 != 0)
        domain_fail("1/h must be a multiple of 6");
    return static_cast<std::int64_t>(r);
}

// Cells of [lo, hi) carry f(n) where the cell midpoint lies within 1/3 of n + shift.
GridSignal window_extension(const IntSequence& f, std::int64_t lo, std::int64_t hi, std::int64_t q, double shift) {
    const double h = 1.0 / static_cast<double>(q);
    const auto cells = static_cast<std::size_t>((hi - lo) * q);
    GridSignal out(static_cast<double>(lo), h, cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const double mid = static_cast<double>(lo) + (static_cast<double>(c) + 0.5) * h;
        const auto n = static_cast<std::int64_t>(std::floor(mid - shift + 0.5));
        if (std::abs(mid - (static_cast<double>(n) + shift)) < 1.0 / 3.0) out[c] = f.at(n);
    }
    return out;
}

}  // namespace

std::pair<GridSignal, GridSignal> transfer_extend(const IntSequence& f1, const IntSequence& f2, double h) {
    const std::int64_t q = cells_per_unit(h);
    return {window_extension(f1, f1.first(), f1.last() + 1, q, 0.5),
            window_extension(f2, f2.first() - 1, f2.last(), q, -0.5)};
}

cplx discrete_average(const IntSequence& f1, const IntSequence& f2, std::int64_t n, std::size_t k) {
    cplx s{};
    for (std::size_t m = 0; m < k; ++m) {
        const auto mm = static_cast<std::int64_t>(m);
        s += f1.at(n + mm) * f2.at(n - mm);
    }
    return s / static_cast<double>(k);
}

TransferenceReport transference_check(const IntSequence& f1, const IntSequence& f2, std::size_t kmax, double h) {
    const std::int64_t q = cells_per_unit(h);
    const auto [F1, F2] = transfer_extend(f1, f2, h);
    std::vector<double> ts;
    for (std::size_t k = 1; k <= kmax; ++k) ts.push_back(static_cast<double>(k));

    const std::int64_t lo = std::min(f1.first(), f2.first());
    const std::int64_t hi = std::max(f1.last(), f2.last());
    const std::int64_t span = q / 6;
    TransferenceReport out;
    for (std::int64_t n = lo; n <= hi; ++n) {
        for (std::int64_t s = -span; s <= span; ++s) {
            const double delta = static_cast<double>(s) / static_cast<double>(q);
            const auto S = continuous_average_series(F1, F2, static_cast<double>(n) + delta, ts);
            for (std::size_t k = 1; k <= kmax; ++k) {
                const cplx m = discrete_average(f1, f2, n, k);
                const double d = std::abs(S[k - 1] - (2.0 / 3.0) * m);
                out.max_deviation = std::max(out.max_deviation, d);
                if (s == 0) out.max_deviation_at_centers = std::max(out.max_deviation_at_centers, d);
                const double w = 2.0 / 3.0 - 2.0 * std::abs(delta);
                out.max_deviation_overlap = std::max(out.max_deviation_overlap, std::abs(S[k - 1] - w * m));
            }
        }
    }
    return out;
}

}  // namespace varlab
