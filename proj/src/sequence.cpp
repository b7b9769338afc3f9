#include "varlab/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varlab {

RealSequence::RealSequence(std::vector<cplx> values) : values_(std::move(values)) {}

RealSequence::RealSequence(std::vector<cplx> values, std::vector<double> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
    if (labels_->size() != values_.size()) domain_fail("label count differs from sample count");
    for (std::size_t i = 1; i < labels_->size(); ++i)
        if (!((*labels_)[i - 1] < (*labels_)[i])) domain_fail("labels must be strictly increasing");
}

RealSequence RealSequence::from_real(std::span<const double> values) {
    std::vector<cplx> v(values.begin(), values.end());
    return RealSequence(std::move(v));
}

double RealSequence::label(std::size_t i) const {
    return labels_ ? (*labels_)[i] : static_cast<double>(i);
}

std::span<const double> RealSequence::labels() const {
    if (!labels_) return {};
    return *labels_;
}

namespace {

double jump_power(const cplx& a, const cplx& b, double r) { return std::pow(std::abs(a - b), r); }

void check_order(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) domain_fail("variation exponent must satisfy 1 <= r < inf");
}

}  // namespace

double variation_objective(std::span<const cplx> a, std::span<const std::size_t> idx, double r,
                           VariationMode mode) {
    if (idx.empty()) return 0.0;
    double s = mode == VariationMode::full ? std::pow(std::abs(a[idx[0]]), r) : 0.0;
    for (std::size_t k = 1; k < idx.size(); ++k) s = s + jump_power(a[idx[k]], a[idx[k - 1]], r);
    return s;
}

VariationResult var_norm(std::span<const cplx> a, double r, VariationMode mode) {
    if (a.empty()) domain_fail("var_norm of an empty sequence");
    check_order(r);
    const std::size_t n = a.size();
    std::vector<double> best(n);
    std::vector<std::size_t> prev(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double b = -1.0;
        std::size_t p = n;
        for (std::size_t j = 0; j < i; ++j) {
            const double c = best[j] + jump_power(a[i], a[j], r);
            if (c > b) {
                b = c;
                p = j;
            }
        }
        const double seed = mode == VariationMode::full ? std::pow(std::abs(a[i]), r) : 0.0;
        if (seed > b) {
            b = seed;
            p = n;
        }
        best[i] = b;
        prev[i] = p;
    }
    std::size_t last = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (best[i] > best[last]) last = i;

    VariationResult res;
    res.mode = mode;
    for (std::size_t i = last; i != n; i = prev[i]) res.witness.push_back(i);
    std::reverse(res.witness.begin(), res.witness.end());
    res.value = std::pow(best[last], 1.0 / r);
    return res;
}

FluctuationCount fluctuation_count(std::span<const cplx> a, double tau, Threshold cmp) {
    if (!(tau > 0.0)) domain_fail("fluctuation threshold must be positive");
    if (a.empty()) domain_fail("fluctuation count of an empty sequence");
    auto hit = [&](std::size_t n, std::size_t m) {
        const double d = std::abs(a[m] - a[n]);
        return cmp == Threshold::at_least ? d >= tau : d > tau;
    };
    FluctuationCount out;
    out.threshold = tau;
    std::size_t start = 0;
    for (std::size_t m = 1; m < a.size(); ++m) {
        for (std::size_t n = start; n < m; ++n) {
            if (hit(n, m)) {
                out.intervals.push_back({n, m});
                start = m;
                break;
            }
        }
    }
    out.count = out.intervals.size();
    return out;
}

FluctuationCount fluctuations_at_scale(std::span<const cplx> a, double lambda, Threshold cmp) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) domain_fail("lambda must be positive and finite");
    return fluctuation_count(a, 1.0 / lambda, cmp);
}

DualPair dualize_variation(std::span<const cplx> a, double r) {
    if (!(r > 1.0) || !std::isfinite(r)) domain_fail("duality requires 1 < r < inf");
    const VariationResult v = var_norm(a, r, VariationMode::semi);
    DualPair out;
    if (v.value == 0.0) return out;

    const double rp = r / (r - 1.0);
    const auto& w = v.witness;
    std::vector<cplx> jumps;
    for (std::size_t k = 1; k < w.size(); ++k) jumps.push_back(a[w[k]] - a[w[k - 1]]);

    double norm = 0.0;
    for (const cplx& d : jumps) norm += std::pow(std::pow(std::abs(d), r - 1.0), rp);
    norm = std::pow(norm, 1.0 / rp);

    out.breakpoints = w;
    for (const cplx& d : jumps) {
        const double m = std::abs(d);
        out.coefficients.push_back(m == 0.0 ? cplx{} : std::pow(m, r - 1.0) * std::conj(d / m) / norm);
    }
    cplx pair{};
    for (std::size_t k = 0; k < jumps.size(); ++k) pair += jumps[k] * out.coefficients[k];
    out.pairing_value = pair.real();
    return out;
}

std::vector<Interval> rademacher_menshov_blocks(std::size_t n, std::size_t N) {
    if (n < 1 || n > N) domain_fail("rademacher_menshov_blocks requires 1 <= n <= N");
    std::vector<Interval> out;
    for (std::size_t len = 1; len <= N; len *= 2) {
        const std::size_t lo = (n / (2 * len)) * (2 * len);
        if (n >= lo + len) out.push_back({lo, lo + len});
    }
    std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.begin < y.begin; });
    return out;
}

ShortLongSplit short_long_split(const RealSequence& a, double r) {
    if (!a.has_labels()) domain_fail("short_long_split needs time labels");
    if (!(r > 2.0) || !std::isfinite(r)) domain_fail("short_long_split requires 2 < r < inf");

    std::vector<std::size_t> dy;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a.label(i);
        int e = 0;
        if (t > 0.0 && std::frexp(t, &e) == 0.5) dy.push_back(i);
    }
    if (dy.size() < 2) domain_fail("fewer than two dyadic points among the labels");
    for (std::size_t k = 1; k < dy.size(); ++k)
        if (a.label(dy[k]) != 2.0 * a.label(dy[k - 1])) domain_fail("t-grid is missing a dyadic point");

    const auto vals = a.values();
    ShortLongSplit out;
    out.v_full = var_norm(vals.subspan(dy.front(), dy.back() - dy.front() + 1), r, VariationMode::full).value;

    double s = 0.0;
    for (std::size_t k = 1; k < dy.size(); ++k) {
        const double b = var_norm(vals.subspan(dy[k - 1], dy[k] - dy[k - 1] + 1), 2.0, VariationMode::semi).value;
        s += b * b;
    }
    out.s_norm = std::sqrt(s);

    std::vector<cplx> at_dyadic;
    for (std::size_t i : dy) at_dyadic.push_back(vals[i]);
    out.v_dyadic = var_norm(at_dyadic, r, VariationMode::full).value;

    const double denom = out.s_norm + out.v_dyadic;
    out.bound_ratio = denom == 0.0 ? 0.0 : out.v_full / denom;
    return out;
}

}  // namespace varlab
