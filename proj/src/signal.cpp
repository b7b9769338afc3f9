#include "varlab/signal.hpp"

#include <algorithm>
#include <cmath>

namespace varlab {

GridSignal::GridSignal(double origin, double spacing, std::vector<cplx> values)
    : origin_(origin), spacing_(spacing), values_(std::move(values)) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) domain_fail("grid spacing must be positive");
}

GridSignal::GridSignal(double origin, double spacing, std::size_t n)
    : GridSignal(origin, spacing, std::vector<cplx>(n)) {}

cplx GridSignal::cell_value(double y) const {
    const double u = std::floor((y - origin_) / spacing_);
    if (u < 0.0 || u >= static_cast<double>(values_.size())) return {};
    return values_[static_cast<std::size_t>(u)];
}

double GridSignal::lp_norm_pow(double p) const {
    double s = 0.0;
    for (const cplx& v : values_) s += std::pow(std::abs(v), p);
    return s * spacing_;
}

double GridSignal::l2_norm() const { return std::sqrt(lp_norm_pow(2.0)); }

bool same_grid(const GridSignal& a, const GridSignal& b, double tol) {
    const double h = a.spacing();
    return a.size() == b.size() && std::abs(a.spacing() - b.spacing()) <= tol * h &&
           std::abs(a.origin() - b.origin()) <= tol * std::max(1.0, std::abs(a.origin()));
}

cplx inner(const GridSignal& f, const GridSignal& g) {
    if (!same_grid(f, g)) domain_fail("inner product of signals on different grids");
    cplx s{};
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
    return s * f.spacing();
}

}  // namespace varlab
