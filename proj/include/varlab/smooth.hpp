#pragma once

#include <cmath>

namespace varlab {

/// Regularity order k of the transition: sigma is C^k and is a polynomial of degree 2k+1 on [0,1].
inline constexpr int kTransitionOrder = 6;

/// Integrated polynomial bump (u(1-u))^k normalized to rise from 0 at u<=0 to 1 at u>=1.
/// Satisfies sigma(1-u) = 1 - sigma(u).
inline double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    constexpr int n = 2 * kTransitionOrder + 1;
    double s = 0.0, binom = 1.0;
    for (int i = 0; i <= n; ++i) {
        if (i >= kTransitionOrder + 1) s += binom * std::pow(u, i) * std::pow(1.0 - u, n - i);
        binom = binom * (n - i) / (i + 1);
    }
    return s;
}

}  // namespace varlab
