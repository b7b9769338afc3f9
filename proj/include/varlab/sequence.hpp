#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "varlab/common.hpp"

namespace varlab {

/// Finite sequence of complex samples, optionally tagged with increasing time labels.
class RealSequence {
public:
    RealSequence() = default;
    explicit RealSequence(std::vector<cplx> values);
    RealSequence(std::vector<cplx> values, std::vector<double> labels);

    static RealSequence from_real(std::span<const double> values);

    std::span<const cplx> values() const { return values_; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    bool has_labels() const { return labels_.has_value(); }
    /// Time label of sample i (the index itself when unlabeled).
    double label(std::size_t i) const;
    std::span<const double> labels() const;

private:
    std::vector<cplx> values_;
    std::optional<std::vector<double>> labels_;
};

enum class VariationMode { full, semi };

struct VariationResult {
    double value = 0.0;
    std::vector<std::size_t> witness;
    VariationMode mode = VariationMode::full;
};

/// Sum of |a(N_0)|^r [full] + sum |a(N_j)-a(N_{j-1})|^r along `idx`, accumulated left to right.
double variation_objective(std::span<const cplx> a, std::span<const std::size_t> idx, double r,
                           VariationMode mode);

/// Exact r-variation norm by dynamic programming over the last chosen index.
VariationResult var_norm(std::span<const cplx> a, double r, VariationMode mode);
inline VariationResult var_norm(const RealSequence& a, double r, VariationMode mode) {
    return var_norm(a.values(), r, mode);
}

struct Interval {
    std::size_t begin = 0;
    std::size_t end = 0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Threshold { at_least, strictly_above };

struct FluctuationCount {
    std::size_t count = 0;
    std::vector<Interval> intervals;
    double threshold = 0.0;
};

/// Maximum number of disjoint [n,m) with |a(m)-a(n)| >= tau (or > tau), earliest-completion greedy.
FluctuationCount fluctuation_count(std::span<const cplx> a, double tau,
                                   Threshold cmp = Threshold::at_least);
inline FluctuationCount fluctuation_count(const RealSequence& a, double tau,
                                          Threshold cmp = Threshold::at_least) {
    return fluctuation_count(a.values(), tau, cmp);
}

/// N(a, lambda): fluctuations at threshold 1/lambda.
FluctuationCount fluctuations_at_scale(std::span<const cplx> a, double lambda,
                                       Threshold cmp = Threshold::at_least);

struct DualPair {
    std::vector<std::size_t> breakpoints;
    std::vector<cplx> coefficients;
    double pairing_value = 0.0;
};

/// Hoelder-dual coefficients on the semi-variation witness partition.
DualPair dualize_variation(std::span<const cplx> a, double r);

/// Dyadic left-half blocks whose union is [0, n).
std::vector<Interval> rademacher_menshov_blocks(std::size_t n, std::size_t N);

struct ShortLongSplit {
    double v_full = 0.0;
    double s_norm = 0.0;
    double v_dyadic = 0.0;
    double bound_ratio = 0.0;
};

/// Short/long jump decomposition over the dyadic points 2^n present among the labels.
ShortLongSplit short_long_split(const RealSequence& a, double r);

}  // namespace varlab
