#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "varlab/common.hpp"
#include "varlab/signal.hpp"
#include "varlab/size.hpp"
#include "varlab/timefreq.hpp"

namespace varlab {

struct DInterval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
};

DInterval to_double(const RInterval& r);

/// psi hat: sin(pi/2 sigma(5 xi)) on [0, 1/5], cos(pi/2 sigma(5 xi - 1)) on [1/5, 2/5], 0 elsewhere.
double window_hat(double xi);

/// window_hat sampled on [-1, 1) with n points.
GridSignal base_window(std::size_t n = 4096);

/// (1 + ((x - c(I)) / |I|)^2)^(-2)
double chi_tilde(const DInterval& I, double x);

struct WavePacket {
    DInterval time;
    DInterval freq;
    double center_freq = 0.0;
    /// psi_{I,omega} hat on the spectrum grid of the time grid
    GridSignal hat;
    GridSignal samples;
    int order_checked = 2;
};

/// psi_{I,omega} hat(xi) = e^{-2 pi i c(I) xi} |omega|^{-1/2} psi hat((xi - c(omega)) / |omega|) on the grid of `like`.
WavePacket packet(const DInterval& I, const DInterval& omega, const GridSignal& like);

/// Frequency samples of the packet only; no inverse transform.
GridSignal packet_hat(const DInterval& I, const DInterval& omega, const GridSignal& like);

/// psi_{P, leg} on the grid of `like`.
WavePacket packet(const TriTile& p, int leg, const GridSignal& like);

/// C[n][m] = sup_x |I|^{n+1/2} |D^n (e^{-2 pi i c(omega) x} psi(x))| / chi_tilde_I(x)^m, n, m <= M.
/// Distances to c(I) are taken on the periodic grid.
std::vector<std::vector<double>> adaptation_constants(const WavePacket& w, int M);

/// Tile I = 2^scale [m, m+1), omega = 2^-scale [n + j/5, n + j/5 + 1).
struct PacketIndex {
    std::int64_t m = 0;
    std::int64_t n = 0;
    int j = 0;
    friend auto operator<=>(const PacketIndex&, const PacketIndex&) = default;
};

struct PacketAnalysis {
    int scale = 0;
    /// zero signal carrying the time grid
    GridSignal grid;
    std::map<PacketIndex, cplx> coefficients;
};

/// <f, psi_{I, omega_j}> for every tile at the given scale meeting the grid's frequency band.
PacketAnalysis analyze(const GridSignal& f, int scale);
GridSignal synthesize(const PacketAnalysis& a);
/// ||synthesize(analyze(f)) - f||_2 / ||f||_2
double round_trip_error(const GridSignal& f, int scale);

/// <f, psi_{P, leg}> for every P.
CoefficientMap packet_coefficients(std::span<const TriTile> P, const GridSignal& f, int leg);

/// sum_P c_P psi_{P, leg} on the grid of `like`.
GridSignal synthesize_tiles(const CoefficientMap& c, int leg, const GridSignal& like);

/// sup over dyadic I with I_P inside I inside I_P' of ((1/|I|) int |f|^s chi_tilde_I^2)^(1/s).
double size_upper_proxy(std::span<const TriTile> P, const GridSignal& f, double s);
/// The inner quantity for one interval.
double proxy_value(const DInterval& I, const GridSignal& f, double s);

/// ||sum_Q b_P psi_{P,j}||_2 / (log(1 + L) ||b||_2), L = sup N_T; natural log.
double bessel_ratio(std::span<const Tree> trees, const CoefficientMap& b, int j, const GridSignal& like);

/// Modulation of the third leg. Variation mode: a_P = a_m when 2^{k_{m-1}} <= |I_P| < 2^{k_m}.
/// Square mode: a_P = d_n with |I_P| = 2^n.
struct ModulationData {
    Modulation mode = Modulation::none;
    /// exponent r of the variation norm; a_n satisfy sum |a_n|^{r'} <= 1
    double r = 3.0;
    std::vector<int> breaks;
    std::vector<GridSignal> a;
    std::map<int, GridSignal> d;
};

/// <sum_P |I_P|^{-1/2} <f1, psi_{P,1}> <f2, psi_{P,2}> a_P psi_{P,3}, f3>
cplx model_trilinear_form(std::span<const TriTile> P, const GridSignal& f1, const GridSignal& f2, const GridSignal& f3,
                          const ModulationData& mod = {});

/// Vertices A_1..A_6 of the exponent hexagon on alpha_1 + alpha_2 + alpha_3 = 1.
inline constexpr std::array<std::array<double, 3>, 6> kHexagon{{{-0.5, 0.5, 1.0},
                                                                 {0.5, -0.5, 1.0},
                                                                 {0.5, 1.0, -0.5},
                                                                 {-0.5, 1.0, 0.5},
                                                                 {1.0, -0.5, 0.5},
                                                                 {1.0, 0.5, -0.5}}};

/// |Lambda| / prod |F_i|^{alpha_i}
double restricted_type_ratio(cplx lambda, const std::array<double, 3>& measures, const std::array<double, 3>& alpha);

struct TruncationParams {
    int stride = 8;
    /// zeta hat = 1 on (-10000 kappa, 10000 kappa), supported in (-10001 kappa, 10001 kappa)
    double kappa = 0.01;
};

/// max_x |sum_{|I_P| >= 2^k} c_P psi_{P,j} - e^{2 pi i c0 x} (zeta_k * [e^{-2 pi i c0 .} sum_P c_P psi_{P,j}])(x)|,
/// c0 = c(omega_{(P_T)_j}), zeta_k = 2^{-k} zeta(2^{-k} .).
double truncation_identity_error(const Tree& T, const CoefficientMap& c, int j, int k, const GridSignal& like,
                                 const TruncationParams& params = {});

/// zeta hat on the unit scale.
double truncation_zeta_hat(double xi, double kappa);

}  // namespace varlab
