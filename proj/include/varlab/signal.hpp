#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "varlab/common.hpp"

namespace varlab {

/// Complex samples on origin + i*spacing, i = 0..size-1, zero outside the grid.
/// Sample i also stands for the value on the cell [x_i, x_i + spacing).
class GridSignal {
public:
    GridSignal() = default;
    GridSignal(double origin, double spacing, std::vector<cplx> values);
    GridSignal(double origin, double spacing, std::size_t n);

    double origin() const { return origin_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return values_.size(); }
    double x(std::size_t i) const { return origin_ + static_cast<double>(i) * spacing_; }
    double extent() const { return static_cast<double>(values_.size()) * spacing_; }

    std::span<const cplx> values() const { return values_; }
    std::span<cplx> values() { return values_; }
    cplx& operator[](std::size_t i) { return values_[i]; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    /// Value of the cell containing y (piecewise-constant reading).
    cplx cell_value(double y) const;

    /// h * sum |v|^p
    double lp_norm_pow(double p) const;
    double l2_norm() const;

private:
    double origin_ = 0.0;
    double spacing_ = 1.0;
    std::vector<cplx> values_;
};

/// h * sum f conj(g); grids must coincide.
cplx inner(const GridSignal& f, const GridSignal& g);

bool same_grid(const GridSignal& a, const GridSignal& b, double tol = 1e-12);

}  // namespace varlab
