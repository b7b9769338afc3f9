#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "varlab/signal.hpp"

namespace varlab {

/// Rotation x -> x + step (mod N) on Z_N with uniform measure.
class CyclicSystem {
public:
    CyclicSystem(std::int64_t n, std::int64_t step);

    std::int64_t size() const { return n_; }
    std::int64_t step() const { return step_; }
    /// T^k x for any integer k (negative k runs the inverse).
    std::int64_t orbit(std::int64_t x, std::int64_t k) const;

private:
    std::int64_t n_;
    std::int64_t step_;
};

using Observable = std::vector<cplx>;

/// g o T
Observable compose(const CyclicSystem& sys, std::span<const cplx> g);

/// M_k[f1,f2](x) for k = 1..kmax.
std::vector<cplx> bilinear_average_series(const CyclicSystem& sys, std::span<const cplx> f1,
                                          std::span<const cplx> f2, std::int64_t x, std::size_t kmax);

/// S_t[F1,F2](x) = (1/t) int_0^t F1(x+y) F2(x-y) dy by midpoint cells of the common grid.
std::vector<cplx> continuous_average_series(const GridSignal& F1, const GridSignal& F2, double x,
                                            std::span<const double> t_grid);

/// Integer-indexed finitely supported sequence: values[k] sits at index offset + k.
struct IntSequence {
    std::int64_t offset = 0;
    std::vector<cplx> values;

    cplx at(std::int64_t n) const;
    std::int64_t first() const { return offset; }
    std::int64_t last() const { return offset + static_cast<std::int64_t>(values.size()) - 1; }
};

/// Window extension onto R: F1 = f1(n) near n + 1/2, F2 = f2(n) near n - 1/2, windows of length 2/3.
std::pair<GridSignal, GridSignal> transfer_extend(const IntSequence& f1, const IntSequence& f2, double h);

/// (1/k) sum_{m<k} f1(n+m) f2(n-m)
cplx discrete_average(const IntSequence& f1, const IntSequence& f2, std::int64_t n, std::size_t k);

struct TransferenceReport {
    /// max |S_k(F1,F2)(x) - (2/3) Mtilde_k(n)| over grid x with |x - n| <= 1/6, 1 <= k <= kmax
    double max_deviation = 0.0;
    /// the same maximum restricted to x = n
    double max_deviation_at_centers = 0.0;
    /// max |S_k(F1,F2)(x) - (2/3 - 2|x - n|) Mtilde_k(n)|, the window-overlap factor
    double max_deviation_overlap = 0.0;
};

TransferenceReport transference_check(const IntSequence& f1, const IntSequence& f2, std::size_t kmax,
                                      double h = 1.0 / 6.0);

}  // namespace varlab
