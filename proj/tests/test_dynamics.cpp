#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "varlab/dynamics.hpp"
#include "varlab/sequence.hpp"

using namespace varlab;

namespace {

Observable random_observable(std::mt19937_64& g, std::size_t n) {
    std::uniform_int_distribution<int> d(-1, 1);
    Observable f(n);
    for (auto& v : f) v = {static_cast<double>(d(g)), static_cast<double>(d(g))};
    return f;
}

IntSequence random_int_sequence(std::mt19937_64& g, std::int64_t lo, std::int64_t hi) {
    std::uniform_int_distribution<int> d(-3, 3);
    IntSequence s{lo, std::vector<cplx>(static_cast<std::size_t>(hi - lo + 1))};
    for (auto& v : s.values) v = static_cast<double>(d(g));
    return s;
}

}  // namespace

TEST(Bilinear, Constants) {
    CyclicSystem sys(7, 3);
    Observable one(7, 1.0), zero(7, 0.0);
    for (auto v : bilinear_average_series(sys, one, one, 2, 20)) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-15);
    for (auto v : bilinear_average_series(sys, one, zero, 2, 20)) EXPECT_EQ(v, 0.0);
}

TEST(Bilinear, IndicatorOnZ4) {
    CyclicSystem sys(4, 1);
    Observable d0{1, 0, 0, 0}, one(4, 1.0);
    auto m = bilinear_average_series(sys, d0, one, 0, 5);
    const double expect[] = {1.0, 0.5, 1.0 / 3, 0.25, 0.4};
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(m[k].real(), expect[k], 1e-15);
    EXPECT_THROW(bilinear_average_series(sys, Observable(3), one, 0, 5), std::domain_error);
}

TEST(Bilinear, DirectSummation) {
    std::mt19937_64 g(1);
    for (int t = 0; t < 50; ++t) {
        const std::int64_t n = 1 + t % 17;
        CyclicSystem sys(n, (t * 5) % 23 - 11);
        auto f1 = random_observable(g, n), f2 = random_observable(g, n);
        const std::int64_t x = t % n;
        auto m = bilinear_average_series(sys, f1, f2, x, 40);
        for (std::size_t k = 1; k <= 40; ++k) {
            cplx s{};
            for (std::int64_t j = 0; j < static_cast<std::int64_t>(k); ++j) {
                const auto a = ((x + j * sys.step()) % n + n) % n;
                const auto b = ((x - j * sys.step()) % n + n) % n;
                s += f1[a] * f2[b];
            }
            EXPECT_NEAR(std::abs(m[k - 1] - s / static_cast<double>(k)), 0.0, 1e-13);
        }
    }
}

TEST(Bilinear, MeasurePreservation) {
    std::mt19937_64 g(2);
    for (int t = 0; t < 50; ++t) {
        const std::int64_t n = 1 + t;
        CyclicSystem sys(n, 3 * t + 1);
        auto f = random_observable(g, n);
        auto ft = compose(sys, f);
        EXPECT_EQ(std::accumulate(f.begin(), f.end(), cplx{}), std::accumulate(ft.begin(), ft.end(), cplx{}));
    }
}

TEST(Bilinear, LinearityAndBound) {
    std::mt19937_64 g(3);
    for (int t = 0; t < 50; ++t) {
        const std::int64_t n = 3 + t;
        CyclicSystem sys(n, t + 2);
        auto f1 = random_observable(g, n), f2 = random_observable(g, n), h = random_observable(g, n);
        const cplx alpha{0.7, -1.3};
        Observable af(n), sum(n);
        for (std::int64_t i = 0; i < n; ++i) {
            af[i] = alpha * f1[i];
            sum[i] = f1[i] + h[i];
        }
        auto base = bilinear_average_series(sys, f1, f2, 1, 60);
        auto sc = bilinear_average_series(sys, af, f2, 1, 60);
        auto add = bilinear_average_series(sys, sum, f2, 1, 60);
        auto other = bilinear_average_series(sys, h, f2, 1, 60);
        double b1 = 0, b2 = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            b1 = std::max(b1, std::abs(f1[i]));
            b2 = std::max(b2, std::abs(f2[i]));
        }
        for (std::size_t k = 0; k < 60; ++k) {
            EXPECT_LE(std::abs(sc[k] - alpha * base[k]), 1e-12);
            EXPECT_LE(std::abs(add[k] - base[k] - other[k]), 1e-12);
            EXPECT_LE(std::abs(base[k]), b1 * b2 * (1 + 1e-12));
        }
    }
}

TEST(Bilinear, FluctuationsStabilise) {
    std::mt19937_64 g(4);
    CyclicSystem sys(13, 5);
    auto f1 = random_observable(g, 13), f2 = random_observable(g, 13);
    auto m = bilinear_average_series(sys, f1, f2, 0, 4000);
    const auto early = fluctuation_count(std::span<const cplx>(m).first(2000), 0.1).count;
    const auto late = fluctuation_count(m, 0.1).count;
    EXPECT_EQ(early, late);
}

TEST(ContinuousAverage, Examples) {
    GridSignal one(-50.0, 0.125, std::vector<cplx>(800, 1.0));
    std::vector<double> ts{0.5, 1.0, 3.0, 10.0};
    for (auto v : continuous_average_series(one, one, 0.0, ts)) EXPECT_NEAR(v.real(), 1.0, 1e-14);

    GridSignal box(0.0, 0.125, std::vector<cplx>(8, 1.0));
    std::vector<double> t1{1.0};
    EXPECT_NEAR(continuous_average_series(box, box, 0.5, t1)[0].real(), 0.5, 1e-15);
    std::vector<double> tg{0.25, 0.5, 0.75, 1.0, 2.0};
    auto s = continuous_average_series(box, box, 0.5, tg);
    for (std::size_t i = 0; i < tg.size(); ++i) EXPECT_NEAR(s[i].real(), std::min(tg[i], 0.5) / tg[i], 1e-15);

    GridSignal zero(0.0, 0.125, 8);
    EXPECT_EQ(continuous_average_series(box, zero, 0.5, t1)[0], 0.0);
    GridSignal other(0.0, 0.25, 8);
    EXPECT_THROW(continuous_average_series(box, other, 0.5, t1), std::domain_error);
}

TEST(Transfer, DeltaWindows) {
    IntSequence d0{0, {1.0}};
    auto [F1, F2] = transfer_extend(d0, d0, 1.0 / 6.0);
    for (double x = -1.0; x < 2.0; x += 1.0 / 12.0) {
        const double want1 = (x > 1.0 / 6.0 && x < 5.0 / 6.0) ? 1.0 : 0.0;
        const double want2 = (x > -5.0 / 6.0 && x < -1.0 / 6.0) ? 1.0 : 0.0;
        const double off = std::fmod(x * 6.0 + 600.0, 1.0);
        if (off < 1e-9 || off > 1 - 1e-9) continue;  // skip cell boundaries
        EXPECT_EQ(F1.cell_value(x).real(), want1) << x;
        EXPECT_EQ(F2.cell_value(x).real(), want2) << x;
    }
    EXPECT_THROW(transfer_extend(d0, d0, 0.25), std::domain_error);
}

TEST(Transfer, NormIdentity) {
    std::mt19937_64 g(5);
    for (int t = 0; t < 20; ++t) {
        auto f = random_int_sequence(g, -t, t + 3);
        for (double h : {1.0 / 6.0, 1.0 / 12.0, 1.0 / 30.0}) {
            auto [F1, F2] = transfer_extend(f, f, h);
            for (double p : {1.0, 2.0, 3.5}) {
                double lp = 0;
                for (auto v : f.values) lp += std::pow(std::abs(v), p);
                EXPECT_NEAR(F1.lp_norm_pow(p), 2.0 / 3.0 * lp, 1e-10 * (1 + lp));
                EXPECT_NEAR(F2.lp_norm_pow(p), 2.0 / 3.0 * lp, 1e-10 * (1 + lp));
            }
        }
    }
}

TEST(Transfer, IdentityAtCellCentres) {
    IntSequence z{0, std::vector<cplx>(5, 0.0)};
    EXPECT_EQ(transference_check(z, z, 8).max_deviation, 0.0);
    IntSequence d0{0, {1.0}};
    auto r0 = transference_check(d0, d0, 8);
    EXPECT_LE(r0.max_deviation_at_centers, 1e-14);
    EXPECT_LE(r0.max_deviation_overlap, 1e-14);
    std::mt19937_64 g(6);
    for (int t = 0; t < 5; ++t) {
        auto f1 = random_int_sequence(g, -6, 6), f2 = random_int_sequence(g, -6, 6);
        for (double h : {1.0 / 6.0, 1.0 / 12.0}) {
            auto r = transference_check(f1, f2, 20, h);
            EXPECT_LE(r.max_deviation_at_centers, 1e-12);
            EXPECT_LE(r.max_deviation_overlap, 1e-12);
        }
    }
}

TEST(Transfer, OffCentreOverlapShrinks) {
    // At |x - n| = 1/6 the two windows overlap on a set of length 1/3, not 2/3.
    IntSequence d0{0, {1.0}};
    auto [F1, F2] = transfer_extend(d0, d0, 1.0 / 6.0);
    std::vector<double> t1{1.0};
    EXPECT_NEAR(continuous_average_series(F1, F2, 1.0 / 6.0, t1)[0].real(), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(transference_check(d0, d0, 1).max_deviation, 1.0 / 3.0, 1e-14);
}
