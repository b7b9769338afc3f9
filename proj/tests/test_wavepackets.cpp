#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "varlab/fourier.hpp"
#include "varlab/wavepackets.hpp"

using namespace varlab;

namespace {

GridSignal band_limited(std::mt19937_64& g, double origin, double h, std::size_t n, double band) {
    GridSignal f(origin, h, n);
    GridSignal F = frequency_grid(f);
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(F.x(k)) < band) F[k] = {nd(g), nd(g)};
    return inverse_spectrum(F, origin);
}

const Nu kNu{1, 3, 16, 0};

}  // namespace

TEST(Window, PartitionOfUnity) {
    for (int i = 0; i < 10000; ++i) {
        const double xi = -3.0 + 6.0 * i / 10000.0 + 1e-7;
        double s = 0.0;
        for (int j = -40; j <= 40; ++j) s += window_hat(xi - j / 5.0) * window_hat(xi - j / 5.0);
        EXPECT_NEAR(s, 1.0, 1e-10) << xi;
    }
}

TEST(Window, SupportAndNorm) {
    const GridSignal w = base_window(1 << 16);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w.x(i) <= 0.0 || w.x(i) >= 0.4) EXPECT_EQ(w[i], 0.0);
        norm2 += std::norm(w[i]) * w.spacing();
    }
    EXPECT_NEAR(norm2, 0.2, 1e-12);
}

TEST(Packet, NormIsScaleInvariant) {
    for (int s : {-2, 0, 2}) {
        const double len = std::ldexp(1.0, s);
        const GridSignal like(-128.0, 1.0 / 32, 8192);
        const auto p = packet({len, 2 * len}, {3.0 / len, 4.0 / len}, like);
        EXPECT_NEAR(p.samples.l2_norm() * p.samples.l2_norm(), 0.2, 1e-8) << s;
    }
}

TEST(Packet, SupportInRightHalf) {
    const GridSignal like(0.0, 1.0 / 16, 1024);
    const DInterval omega{2.5, 3.5};
    const auto p = packet({0.0, 1.0}, omega, like);
    for (std::size_t k = 0; k < p.hat.size(); ++k)
        if (p.hat.x(k) < omega.center() || p.hat.x(k) >= omega.hi) EXPECT_EQ(p.hat[k], 0.0);
    const GridSignal back = spectrum(p.samples);
    double outside = 0.0, total = 0.0;
    for (std::size_t k = 0; k < back.size(); ++k) {
        total += std::norm(back[k]);
        if (back.x(k) < omega.center() || back.x(k) >= omega.hi) outside += std::norm(back[k]);
    }
    EXPECT_LE(std::sqrt(outside / total), 1e-8);
}

TEST(Packet, AreaMustBeOne) {
    const GridSignal like(0.0, 1.0 / 16, 256);
    EXPECT_THROW(packet({0.0, 1.0}, {0.0, 2.0}, like), std::domain_error);
}

TEST(Packet, AdaptationConstantsFinite) {
    const GridSignal like(-64.0, 1.0 / 16, 2048);
    const auto p = packet({0.0, 1.0}, {2.0, 3.0}, like);
    const auto C = adaptation_constants(p, 2);
    ASSERT_EQ(C.size(), 3u);
    for (const auto& row : C)
        for (double v : row) {
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GT(v, 0.0);
        }
    const auto wide = packet({0.0, 4.0}, {0.5, 0.75}, like);
    const auto Cw = adaptation_constants(wide, 2);
    for (int n = 0; n <= 2; ++n) EXPECT_NEAR(Cw[n][0], C[n][0], 1e-2 * C[n][0]);
}

TEST(Analysis, ZeroSignal) {
    const GridSignal f(0.0, 1.0 / 8, 512);
    const auto a = analyze(f, 0);
    EXPECT_FALSE(a.coefficients.empty());
    for (const auto& [ix, v] : a.coefficients) EXPECT_EQ(v, 0.0);
    const auto g = synthesize(a);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], 0.0);
}

TEST(Analysis, SinglePacket) {
    const GridSignal like(0.0, 1.0 / 8, 512);
    const auto p = packet({3.0, 4.0}, {2.2, 3.2}, like);
    const auto a = analyze(p.samples, 0);
    EXPECT_NEAR(std::abs(a.coefficients.at({3, 2, 1}) - 0.2), 0.0, 1e-9);
    const auto g = synthesize(a);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(g[i] - p.samples[i]), 0.0, 1e-6);
}

TEST(Analysis, RoundTrip) {
    std::mt19937_64 g(7);
    for (int scale : {-3, 0, 2, 4}) {
        const auto f = band_limited(g, -16.0, 1.0 / 16, 1024, 7.0);
        EXPECT_LE(round_trip_error(f, scale), 1e-6) << scale;
    }
}

TEST(Analysis, ScaleOutsideResolution) {
    const GridSignal f(0.0, 1.0 / 8, 512);
    EXPECT_THROW(analyze(f, 7), std::domain_error);
    EXPECT_THROW(analyze(f, -4), std::domain_error);
}

TEST(Analysis, CoefficientsMatchTimeQuadrature) {
    std::mt19937_64 g(8);
    const auto f = band_limited(g, 0.0, 1.0 / 32, 1024, 12.0);
    const std::vector<TriTile> P{{kNu, 0, 3, -8}, {kNu, 0, 5, -9}};
    const auto c = packet_coefficients(P, f, 1);
    for (int q = 0; q < 2; ++q) {
        const cplx direct = inner(f, packet(P[q], 1, f).samples);
        EXPECT_NEAR(std::abs(c.at(P[q]) - direct), 0.0, 1e-12);
    }
}

TEST(Proxy, ZeroAndConstant) {
    const GridSignal zero(-100.0, 1.0 / 16, 3200);
    const std::vector<TriTile> P{{kNu, 0, 0, 0}};
    EXPECT_EQ(size_upper_proxy(P, zero, 2.0), 0.0);
    GridSignal one(-2000.0, 1.0 / 16, 64000);
    for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
    for (double s : {1.5, 2.0, 3.0}) {
        EXPECT_NEAR(std::pow(proxy_value({0.0, 1.0}, one, s), s), 5.0 * kPi / 16.0, 1e-10);
        EXPECT_NEAR(size_upper_proxy(P, one, s), std::pow(5.0 * kPi / 16.0, 1.0 / s), 1e-10);
    }
    EXPECT_THROW(size_upper_proxy(P, one, 1.0), std::domain_error);
}

TEST(Proxy, SizeAgainstProxyIsReported) {
    std::mt19937_64 g(9);
    const GridSignal like(-512.0, 1.0 / 64, 1 << 16);
    double worst = 0.0;
    int trials = 0;
    while (trials < 4) {
        const Nu nu{static_cast<int>(g() % 5), static_cast<int>(g() % 5), 16, 0};
        const auto t = gen::two_scale_tree(g, nu, -8, 8, 1, 2, 6);
        if (!t) continue;
        ++trials;
        const auto f = band_limited(g, like.origin(), like.spacing(), like.size(), 30.0);
        const auto c = packet_coefficients(t->members, f, 2);
        const double sz = size(t->members, c, 2).value;
        const double proxy = size_upper_proxy(t->members, f, 2.0);
        ASSERT_GT(proxy, 0.0);
        worst = std::max(worst, sz / proxy);
    }
    RecordProperty("size_over_proxy", std::to_string(worst));
    EXPECT_TRUE(std::isfinite(worst));
}

TEST(Bessel, EmptyAndSingle) {
    const GridSignal like(0.0, 1.0 / 16, 1024);
    EXPECT_EQ(bessel_ratio({}, CoefficientMap{}, 1, like), 0.0);
    const TriTile p{kNu, 0, 0, 0};
    const std::vector<Tree> trees{Tree{p, {p}, 2}};
    CoefficientMap b;
    b.entries[p] = 1.0;
    EXPECT_NEAR(bessel_ratio(trees, b, 1, like), 1.0 / (std::sqrt(5.0) * std::log(2.0)), 1e-8);
}

TEST(Bessel, RejectsNonDisjoint) {
    const GridSignal like(0.0, 1.0 / 16, 1024);
    const TriTile p{kNu, 0, 0, 0};
    const std::vector<Tree> trees{Tree{p, {p}, 2}, Tree{p, {p}, 2}};
    CoefficientMap b;
    b.entries[p] = 1.0;
    EXPECT_THROW(bessel_ratio(trees, b, 1, like), std::domain_error);
}

TEST(Bessel, StackedTopsStayBounded) {
    const GridSignal like(0.0, 1.0 / 512, 8192);
    std::mt19937_64 g(10);
    std::normal_distribution<double> nd;
    double first = 0.0, worst = 0.0;
    for (int L : {1, 2, 4, 8}) {
        std::vector<Tree> trees;
        CoefficientMap b;
        for (int q = 0; q < L; ++q) {
            const TriTile p{kNu, 0, 4, 20 * q};
            trees.push_back(Tree{p, {p}, 2});
            b.entries[p] = {nd(g), nd(g)};
        }
        const double r = bessel_ratio(trees, b, 1, like);
        if (L == 1) first = r;
        worst = std::max(worst, r);
    }
    RecordProperty("bessel_max_ratio", std::to_string(worst));
    EXPECT_NEAR(worst, first, 1e-8);
}

TEST(Trilinear, EmptyAndZeroModulation) {
    std::mt19937_64 g(11);
    const auto f = band_limited(g, 0.0, 1.0 / 32, 1024, 14.0);
    EXPECT_EQ(model_trilinear_form({}, f, f, f), 0.0);
    const std::vector<TriTile> P{{kNu, 0, 10, -8}};
    ModulationData mod;
    mod.mode = Modulation::variation;
    mod.breaks = {-4, 4};
    mod.a = {GridSignal(f.origin(), f.spacing(), f.size())};
    EXPECT_EQ(model_trilinear_form(P, f, f, f, mod), 0.0);
}

TEST(Trilinear, SingleTileIsProductOfInnerProducts) {
    std::mt19937_64 g(12);
    const auto f1 = band_limited(g, 0.0, 1.0 / 32, 1024, 14.0);
    const auto f2 = band_limited(g, 0.0, 1.0 / 32, 1024, 14.0);
    const auto f3 = band_limited(g, 0.0, 1.0 / 32, 1024, 14.0);
    const TriTile p{kNu, 0, 10, -8};
    const cplx want = inner(f1, packet(p, 1, f1).samples) * inner(f2, packet(p, 2, f2).samples) *
                      inner(packet(p, 3, f3).samples, f3);
    const std::vector<TriTile> P{p};
    const cplx got = model_trilinear_form(P, f1, f2, f3);
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-10 * std::abs(want));

    ModulationData var;
    var.mode = Modulation::variation;
    var.breaks = {-4, 4};
    GridSignal half(f3.origin(), f3.spacing(), f3.size());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = 0.5;
    var.a = {half};
    EXPECT_NEAR(std::abs(model_trilinear_form(P, f1, f2, f3, var) - 0.5 * want), 0.0, 1e-10 * std::abs(want));

    ModulationData sq;
    sq.mode = Modulation::square;
    GridSignal one = half;
    for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
    sq.d[0] = one;
    EXPECT_NEAR(std::abs(model_trilinear_form(P, f1, f2, f3, sq) - want), 0.0, 1e-10 * std::abs(want));
    sq.d.clear();
    sq.d[3] = one;
    EXPECT_EQ(model_trilinear_form(P, f1, f2, f3, sq), 0.0);
}

TEST(Trilinear, ModulationValidation) {
    const GridSignal f(0.0, 1.0 / 32, 256);
    const std::vector<TriTile> P{{kNu, 0, 1, -8}};
    ModulationData var;
    var.mode = Modulation::variation;
    EXPECT_THROW(model_trilinear_form(P, f, f, f, var), std::domain_error);
    var.breaks = {0, 1};
    GridSignal big(f.origin(), f.spacing(), f.size());
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = 1.5;
    var.a = {big};
    EXPECT_THROW(model_trilinear_form(P, f, f, f, var), std::domain_error);
    ModulationData sq;
    sq.mode = Modulation::square;
    EXPECT_THROW(model_trilinear_form(P, f, f, f, sq), std::domain_error);
}

TEST(Trilinear, RestrictedTypeRatio) {
    EXPECT_NEAR(restricted_type_ratio({3.0, 4.0}, {4.0, 1.0, 2.0}, kHexagon[0]), 5.0 * 2.0 / 2.0, 1e-12);
    for (const auto& a : kHexagon) EXPECT_NEAR(a[0] + a[1] + a[2], 1.0, 1e-15);
    EXPECT_THROW(restricted_type_ratio(1.0, {0.0, 1.0, 1.0}, kHexagon[0]), std::domain_error);
}

TEST(Truncation, EmptyTree) {
    const GridSignal like(0.0, 1.0 / 16, 256);
    const Tree t{TriTile{kNu, 0, 0, 0}, {}, 1};
    EXPECT_EQ(truncation_identity_error(t, CoefficientMap{}, 2, 0, like), 0.0);
}

TEST(Truncation, TwoScaleTrees) {
    std::mt19937_64 g(13);
    std::normal_distribution<double> nd;
    const GridSignal like(-256.0, 1.0 / 64, 1 << 16);
    int trials = 0;
    while (trials < 5) {
        const Nu nu{static_cast<int>(g() % 5), static_cast<int>(g() % 5), (g() % 2 ? 1 : -1) * (16 + int(g() % 4)), 0};
        const int i = 1 + static_cast<int>(g() % 3);
        const int j = i % 3 + 1;
        const auto t = gen::two_scale_tree(g, nu, -8, 8, i, j, 5);
        if (!t) continue;
        ++trials;
        CoefficientMap c;
        for (const auto& p : t->members) c.entries[p] = {nd(g), nd(g)};
        EXPECT_LE(truncation_identity_error(*t, c, j, 0, like), 1e-8);
        EXPECT_LE(truncation_identity_error(*t, c, j, 8, like), 1e-6);
        EXPECT_THROW(truncation_identity_error(*t, c, j, 4, like), std::domain_error);
        EXPECT_THROW(truncation_identity_error(*t, c, j, 16, like), std::domain_error);
    }
}

TEST(Truncation, WrongCutoffLeaves) {
    std::mt19937_64 g(14);
    const GridSignal like(-256.0, 1.0 / 64, 1 << 16);
    std::optional<Tree> t;
    while (!t) t = gen::two_scale_tree(g, Nu{0, 0, 16, 0}, -8, 8, 1, 2, 4);
    CoefficientMap c;
    for (const auto& p : t->members) c.entries[p] = 1.0;
    const double err = truncation_identity_error(*t, c, 2, 8, like, {8, 1.0});
    EXPECT_GT(err, 1e-3);
}
