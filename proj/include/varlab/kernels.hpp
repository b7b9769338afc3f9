#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varlab/common.hpp"
#include "varlab/signal.hpp"

namespace varlab {

using ScalarFn = std::function<cplx(double)>;

/// Symmetric time grid [-extent/2, extent/2) with `size` samples; the frequency grid is its spectrum grid.
struct KernelGrid {
    std::size_t size = 1 << 14;
    double extent = 64.0;
};

/// K and its transform on grids, plus closed forms when known.
struct KernelProfile {
    std::string name;
    GridSignal time_samples;
    GridSignal freq_samples;
    int order = 2;
    ScalarFn time_fn;
    ScalarFn freq_fn;

    /// K(y): closed form, else linear interpolation of the samples (0 outside).
    cplx at(double y) const;
    /// Khat(xi): closed form, else quadrature of the time samples.
    cplx hat(double xi) const;
};

/// Samples whichever closed forms are given and fills the other side by transform.
KernelProfile make_kernel(std::string name, ScalarFn time_fn, ScalarFn freq_fn, const KernelGrid& grid = {});

/// Kernel from uniformly spaced samples of K(y).
KernelProfile kernel_from_samples(std::string name, GridSignal time_samples);

/// Reads "y,K" or "y,re,im" rows (header optional) on a uniform grid.
KernelProfile load_kernel_csv(const std::string& path);

/// K(y) = e^{-pi y^2}.
KernelProfile gaussian_kernel(const KernelGrid& grid = {});
/// K = K' of the Gaussian; Khat = 2 pi i xi e^{-pi xi^2}.
KernelProfile gaussian_derivative_kernel(const KernelGrid& grid = {});
/// Khat = |xi| e^{-pi xi^2}.
KernelProfile abs_gaussian_kernel(const KernelGrid& grid = {});
/// K = 1 on (0,1).
KernelProfile box_kernel(const KernelGrid& grid = {});
/// Smooth K with 1 on [alpha, 1-alpha], support [0,1]: the box [alpha/2, 1-alpha/2] convolved
/// with a B-spline of `spline_order` pieces supported on [-alpha/2, alpha/2].
KernelProfile mollified_box_kernel(double alpha, int spline_order = 8, const KernelGrid& grid = {});

/// Built-ins by name: gaussian, gaussian-derivative, abs-gaussian, box, mollified-box.
KernelProfile builtin_kernel(const std::string& name, double alpha = 0.1, const KernelGrid& grid = {});

/// K(-y).
KernelProfile reflect(const KernelProfile& k);

/// max |spectrum(time_samples) - freq_samples| relative to max |freq_samples|.
double profile_consistency(const KernelProfile& k);

struct KernelConditions {
    /// C_0, C_1, ..., C_n0
    std::vector<double> constants;
    /// true when the order-n ratio keeps growing across the outer dyadic shells
    std::vector<bool> growing;
    bool ok() const;
};

/// Grid estimates of the constants in |D^n Khat| <= C_n min(|xi|^{1-n}, |xi|^{-n-1}) (n = 0: min(1, 1/|xi|)).
KernelConditions check_kernel_conditions(const KernelProfile& k, int n0);

struct KernelPiece {
    int j = 0;
    double weight = 0.0;
    /// phi_j hat sampled on the generator grid
    GridSignal generator;
    bool support_ok = true;
};

/// Khat = near + sum_j c_j Khat_j(2^j xi), Khat_j = sum_{l>=0} phi_j hat(2^l .).
struct KernelDecomposition {
    std::vector<KernelPiece> pieces;
    /// Khat(0+), Khat(0-); both zero in the first case of the construction
    cplx zero_plus = 0.0;
    cplx zero_minus = 0.0;
    bool has_near_part = false;
    GridSignal near_generator;
    double reconstruction_error = 0.0;
    double telescoping_error = 0.0;
    /// largest |c_j| max|Khat_j| among the dropped j at the ends of the scanned range
    double truncation_tail = 0.0;

    ScalarFn khat;

    /// Smooth bump on 1000 <= |xi| <= 4000 with sum_j eta(2^j xi) = 1.
    static double eta(double xi);
    /// phi hat: Khat(0+-) for 0 < |xi| <= 1000, 0 for |xi| >= 2000.
    cplx near_hat(double xi) const;
    /// Khat_j(xi) = 2^{|j|} (Khat - near)(2^{-j} xi) eta(xi)
    cplx piece_hat(int j, double xi) const;
    /// Khat_j(xi) - Khat_j(2 xi)
    cplx generator_hat(int j, double xi) const;
    /// generator of the near part: near(xi) - near(2 xi)
    cplx near_generator_hat(double xi) const;
    /// near(xi) + sum_j c_j Khat_j(2^j xi)
    cplx evaluate(double xi) const;
};

inline constexpr double kDecompositionCutoff = 1e-12;

KernelDecomposition decompose_kernel(const KernelProfile& k);

struct BilinearResult {
    GridSignal direct;
    GridSignal spectral;
    /// max |direct - spectral| / max |direct|
    double deviation = 0.0;
};

/// B_t[f1,f2](x) = int f1(x+y) f2(x-y) t^{-1} K(y/t) dy on the periodic grid of f1, f2,
/// by direct quadrature and by the frequency-side formula with Khat(t(xi2 - xi1)).
BilinearResult bilinear_apply(const KernelProfile& k, double t, const GridSignal& f1, const GridSignal& f2);

/// h(y) = -(K(y) + y K'(y)), hhat(xi) = xi Khat'(xi).
KernelProfile derive_short_kernel(const KernelProfile& k);

}  // namespace varlab
