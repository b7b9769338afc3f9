#pragma once

#include <span>
#include <vector>

#include "varlab/sequence.hpp"
#include "varlab/signal.hpp"

namespace varlab {

/// Strictly increasing frequencies xi_1 < ... < xi_N, N >= 1.
class FrequencySet {
public:
    explicit FrequencySet(std::vector<double> freqs);
    std::span<const double> freqs() const { return freqs_; }
    std::size_t size() const { return freqs_.size(); }

private:
    std::vector<double> freqs_;
};

/// Membership in R_k = union of (xi_j - 2^-k, xi_j + 2^-k).
bool in_region(const FrequencySet& xi, int k, double x);

/// Inverse transform of 1_{R_k} fhat; a bin is kept when its centre lies in R_k.
GridSignal project(const GridSignal& f, const FrequencySet& xi, int k);

/// || V^r_{k in ks} Pi_k f(x) ||_{L^2_x}
double variation_profile(const GridSignal& f, const FrequencySet& xi, std::span<const int> ks, double r,
                         VariationMode mode = VariationMode::full);
/// Same over every integer k in [a, b].
double variation_profile(const GridSignal& f, const FrequencySet& xi, int a, int b, double r,
                         VariationMode mode = VariationMode::full);

/// Number of connected components of the closure of R_k: neighbours join when their gap is <= 2 * 2^-k.
std::size_t component_count(const FrequencySet& xi, int k);

struct ComponentSegment {
    int k_begin = 0;
    int k_end = 0;
    std::size_t count = 0;
};

/// Maximal runs of k in [a, b] with a constant component count.
std::vector<ComponentSegment> component_scales(const FrequencySet& xi, int a, int b);

/// k_begin of every segment after the first.
std::vector<int> interior_breakpoints(std::span<const ComponentSegment> segments);

}  // namespace varlab
