#include "varlab/projections.hpp"

#include <algorithm>
#include <cmath>

#include "varlab/fourier.hpp"

namespace varlab {

FrequencySet::FrequencySet(std::vector<double> freqs) : freqs_(std::move(freqs)) {
    if (freqs_.empty()) domain_fail("a frequency set needs at least one frequency");
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
        if (!std::isfinite(freqs_[i])) domain_fail("frequencies must be finite");
        if (i > 0 && !(freqs_[i - 1] < freqs_[i])) domain_fail("frequencies must be strictly increasing");
    }
}

bool in_region(const FrequencySet& xi, int k, double x) {
    const double rad = std::ldexp(1.0, -k);
    const auto f = xi.freqs();
    // nearest candidates around x
    const auto it = std::lower_bound(f.begin(), f.end(), x);
    if (it != f.end() && *it - x < rad) return true;
    return it != f.begin() && x - *(it - 1) < rad;
}

GridSignal project(const GridSignal& f, const FrequencySet& xi, int k) {
    const double rad = std::ldexp(1.0, -k), band = 0.5 / f.spacing();
    if (xi.freqs().front() - rad < -band || xi.freqs().back() + rad > band)
        domain_fail("R_" + std::to_string(k) + " leaves the grid band [-" + std::to_string(band) + ", " +
                    std::to_string(band) + ")");
    GridSignal F = spectrum(f);
    for (std::size_t q = 0; q < F.size(); ++q)
        if (!in_region(xi, k, F.x(q))) F[q] = 0.0;
    return inverse_spectrum(F, f.origin());
}

double variation_profile(const GridSignal& f, const FrequencySet& xi, std::span<const int> ks, double r,
                         VariationMode mode) {
    if (ks.empty()) domain_fail("variation profile needs at least one k");
    std::vector<GridSignal> proj;
    proj.reserve(ks.size());
    for (int k : ks) proj.push_back(project(f, xi, k));
    std::vector<cplx> seq(ks.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t q = 0; q < ks.size(); ++q) seq[q] = proj[q][i];
        const double v = var_norm(seq, r, mode).value;
        acc += v * v;
    }
    return std::sqrt(acc * f.spacing());
}

double variation_profile(const GridSignal& f, const FrequencySet& xi, int a, int b, double r, VariationMode mode) {
    if (a > b) domain_fail("empty k range");
    std::vector<int> ks;
    for (int k = a; k <= b; ++k) ks.push_back(k);
    return variation_profile(f, xi, ks, r, mode);
}

std::size_t component_count(const FrequencySet& xi, int k) {
    const double reach = 2.0 * std::ldexp(1.0, -k);
    const auto f = xi.freqs();
    std::size_t c = 1;
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i] - f[i - 1] > reach) ++c;
    return c;
}

std::vector<ComponentSegment> component_scales(const FrequencySet& xi, int a, int b) {
    if (a > b) domain_fail("empty k range");
    std::vector<ComponentSegment> out;
    for (int k = a; k <= b; ++k) {
        const std::size_t c = component_count(xi, k);
        if (!out.empty() && out.back().count == c)
            out.back().k_end = k;
        else
            out.push_back({k, k, c});
    }
    return out;
}

std::vector<int> interior_breakpoints(std::span<const ComponentSegment> segments) {
    std::vector<int> out;
    for (std::size_t i = 1; i < segments.size(); ++i) out.push_back(segments[i].k_begin);
    return out;
}

}  // namespace varlab
