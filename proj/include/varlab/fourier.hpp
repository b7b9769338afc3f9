#pragma once

#include <span>
#include <vector>

#include "varlab/signal.hpp"

namespace varlab {

/// Unnormalized forward DFT, X_k = sum_j x_j e^{-2 pi i jk/N}.
std::vector<cplx> dft(std::span<const cplx> x);
/// Inverse of dft (carries the 1/N).
std::vector<cplx> idft(std::span<const cplx> X);

/// Continuous transform fhat(xi) = int e^{-2 pi i xi x} f(x) dx on a periodic grid.
/// The result is indexed by ascending frequency xi_k = (k - N/2)/(N h), k = 0..N-1.
GridSignal spectrum(const GridSignal& f);

/// Inverse of spectrum; `time_origin` fixes the phase reference of the time grid.
GridSignal inverse_spectrum(const GridSignal& fhat, double time_origin);

/// Frequency grid matching spectrum(f) without computing it.
GridSignal frequency_grid(const GridSignal& f);

}  // namespace varlab
