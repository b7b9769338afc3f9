#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "varlab/fourier.hpp"
#include "varlab/projections.hpp"

using namespace varlab;

namespace {

GridSignal from_spectrum(const GridSignal& like, const std::function<cplx(double)>& fhat) {
    GridSignal F = frequency_grid(like);
    for (std::size_t k = 0; k < F.size(); ++k) F[k] = fhat(F.x(k));
    return inverse_spectrum(F, like.origin());
}

GridSignal random_signal(std::mt19937_64& g, const GridSignal& like, double band) {
    std::normal_distribution<double> nd;
    return from_spectrum(like, [&](double x) { return std::abs(x) < band ? cplx(nd(g), nd(g)) : cplx(0.0); });
}

double dist(const GridSignal& a, const GridSignal& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

FrequencySet random_set(std::mt19937_64& g, std::size_t n, double spread) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> v;
    while (v.size() < n) {
        v.push_back(u(g));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return FrequencySet(v);
}

const GridSignal kGrid(0.0, 1.0 / 64, 4096);

}  // namespace

TEST(FrequencySet, Validation) {
    EXPECT_THROW(FrequencySet({}), std::domain_error);
    EXPECT_THROW(FrequencySet({1.0, 1.0}), std::domain_error);
    EXPECT_THROW(FrequencySet({2.0, 1.0}), std::domain_error);
    EXPECT_NO_THROW(FrequencySet({-1.0, 3.0}));
}

TEST(Project, SupportInsideAndOutside) {
    const FrequencySet xi({-3.0, 2.0});
    const int k = 1;
    const auto inside = from_spectrum(kGrid, [&](double x) { return std::abs(x - 2.0) < 0.3 ? cplx(1.0, x) : cplx(0.0); });
    EXPECT_LE(dist(project(inside, xi, k), inside), 1e-12);
    const auto outside = from_spectrum(kGrid, [&](double x) { return std::abs(x - 8.0) < 1.0 ? cplx(x) : cplx(0.0); });
    for (std::size_t i = 0; i < outside.size(); ++i) EXPECT_LE(std::abs(project(outside, xi, k)[i]), 1e-12);
}

TEST(Project, NyquistViolation) {
    const FrequencySet xi({31.5});
    EXPECT_THROW(project(kGrid, xi, 0), std::domain_error);
    EXPECT_NO_THROW(project(kGrid, xi, 2));
}

TEST(Project, Algebra) {
    std::mt19937_64 g(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_signal(g, kGrid, 30.0);
        const auto h = random_signal(g, kGrid, 30.0);
        const auto xi = random_set(g, 1 + g() % 6, 20.0);
        const int k = -1 + static_cast<int>(g() % 6), k2 = -1 + static_cast<int>(g() % 6);
        const auto pf = project(f, xi, k);
        const double scale = std::max(1.0, f.l2_norm());
        EXPECT_LE(dist(project(pf, xi, k), pf), 1e-10 * scale);
        EXPECT_LE(std::abs(inner(pf, h) - inner(f, project(h, xi, k))), 1e-10 * scale * h.l2_norm());
        EXPECT_LE(pf.l2_norm(), f.l2_norm() * (1 + 1e-12));
        EXPECT_LE(dist(project(pf, xi, k2), project(f, xi, std::max(k, k2))), 1e-10 * scale);
    }
}

TEST(Profile, SingleFrequencyInsideEveryRegion) {
    const FrequencySet xi({1.0});
    const auto f = from_spectrum(kGrid, [](double x) { return std::abs(x - 1.0) < 0.05 ? cplx(1.0) : cplx(0.0); });
    EXPECT_LE(variation_profile(f, xi, 0, 3, 3.0, VariationMode::semi), 1e-12);
    EXPECT_NEAR(variation_profile(f, xi, 0, 3, 3.0, VariationMode::full), f.l2_norm(), 1e-12);
}

TEST(Profile, TwoScaleSplitEqualsDiscardedPiece) {
    const FrequencySet xi({-2.0, 2.0});
    // kept everywhere on k in [0, 3]: |x - 2| < 1/8; discarded after k = 0: 1/2 < |x + 2| < 1
    std::mt19937_64 g(22);
    std::normal_distribution<double> nd;
    GridSignal G1 = frequency_grid(kGrid), G2 = frequency_grid(kGrid);
    for (std::size_t q = 0; q < G1.size(); ++q) {
        const double x = G1.x(q);
        if (std::abs(x - 2.0) < 0.1) G1[q] = {nd(g), nd(g)};
        if (std::abs(x + 2.0) > 0.55 && std::abs(x + 2.0) < 0.95) G2[q] = {nd(g), nd(g)};
    }
    const auto g1 = inverse_spectrum(G1, 0.0), g2 = inverse_spectrum(G2, 0.0);
    GridSignal f = g1;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += g2[i];
    double plancherel = 0.0;
    for (std::size_t q = 0; q < G2.size(); ++q) plancherel += std::norm(G2[q]) * G2.spacing();
    for (double r : {2.5, 3.0, 4.0}) {
        const double p = variation_profile(f, xi, 0, 3, r, VariationMode::semi);
        EXPECT_NEAR(p, g2.l2_norm(), 1e-10);
        EXPECT_NEAR(p, std::sqrt(plancherel), 1e-10);
    }
}

TEST(Profile, CrudeBound) {
    std::mt19937_64 g(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_signal(g, kGrid, 30.0);
        const auto xi = random_set(g, 1 + g() % 8, 20.0);
        const int a = -1, b = 2 + static_cast<int>(g() % 3);
        for (auto mode : {VariationMode::full, VariationMode::semi})
            EXPECT_LE(variation_profile(f, xi, a, b, 3.0, mode), std::sqrt(b - a + 1.0) * f.l2_norm() * (1 + 1e-12));
    }
}

TEST(Profile, SparseScaleSetsReported) {
    std::mt19937_64 g(24);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto f = random_signal(g, kGrid, 30.0);
        const auto xi = random_set(g, 4, 20.0);
        std::vector<int> S;
        for (int k = -1; k <= 5; ++k)
            if (g() % 2) S.push_back(k);
        if (S.empty()) S.push_back(0);
        const double v = variation_profile(f, xi, S, 2.0, VariationMode::full);
        worst = std::max(worst, v / ((1.0 + std::log(static_cast<double>(S.size()))) * f.l2_norm()));
    }
    RecordProperty("rm_ratio", std::to_string(worst));
    EXPECT_TRUE(std::isfinite(worst));
    EXPECT_THROW(variation_profile(kGrid, FrequencySet({0.0}), std::span<const int>{}, 2.0), std::domain_error);
}

TEST(Components, Examples) {
    const auto seg = component_scales(FrequencySet({0.0, 1.0}), -2, 5);
    ASSERT_EQ(seg.size(), 2u);
    EXPECT_EQ(seg[0].count, 1u);
    EXPECT_EQ(seg[0].k_end, 1);
    EXPECT_EQ(seg[1].count, 2u);
    EXPECT_EQ(interior_breakpoints(seg), std::vector<int>{2});
    EXPECT_TRUE(interior_breakpoints(component_scales(FrequencySet({3.0}), -5, 5)).empty());
    for (double delta : {0.3, 1.0, 2.5}) {
        std::vector<double> v;
        for (int j = 0; j < 6; ++j) v.push_back(j * delta);
        const auto s = component_scales(FrequencySet(v), -4, 8);
        const auto bps = interior_breakpoints(s);
        ASSERT_EQ(bps.size(), 1u) << delta;
        const int k = bps[0];
        EXPECT_LT(std::ldexp(1.0, 1 - k), delta);
        EXPECT_GE(std::ldexp(1.0, 2 - k), delta);
        EXPECT_EQ(s.back().count, 6u);
    }
}

TEST(Components, CountNeverDecreasesWithK) {
    std::mt19937_64 g(25);
    for (int t = 0; t < 200; ++t) {
        const auto xi = random_set(g, 1 + g() % 10, 10.0);
        std::size_t prev = 0;
        for (int k = -6; k <= 10; ++k) {
            const std::size_t c = component_count(xi, k);
            EXPECT_GE(c, prev);
            prev = c;
        }
        EXPECT_EQ(component_count(xi, 60), xi.size());
    }
}
