#include "varlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "varlab/fourier.hpp"
#include "varlab/projections.hpp"
#include "varlab/sequence.hpp"
#include "varlab/wavepackets.hpp"

namespace varlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMaxTrials = 1'000'000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Reads experiment parameters, records the values used, and rejects unknown keys.
class Params {
public:
    explicit Params(const ordered_json& given) : given_(given) {
        if (!given_.is_object()) throw ConfigError("params must be an object");
    }

    std::int64_t integer(const std::string& key, std::int64_t def) {
        std::int64_t v = def;
        if (const auto* g = find(key)) {
            if (g->is_number_integer()) {
                v = g->get<std::int64_t>();
            } else if (g->is_number_float() && std::nearbyint(g->get<double>()) == g->get<double>() &&
                       std::abs(g->get<double>()) < 9e15) {
                v = static_cast<std::int64_t>(g->get<double>());
            } else {
                throw ConfigError("params." + key + " must be an integer");
            }
        }
        echo_[key] = v;
        return v;
    }

    double real(const std::string& key, double def) {
        double v = def;
        if (const auto* g = find(key)) {
            if (!g->is_number()) throw ConfigError("params." + key + " must be a number");
            v = g->get<double>();
            if (!std::isfinite(v)) throw ConfigError("params." + key + " must be finite");
        }
        echo_[key] = v;
        return v;
    }

    /// number > 1 or "inf"
    double exponent(const std::string& key, double def) {
        double v = def;
        if (const auto* g = find(key)) {
            if (g->is_string() && g->get<std::string>() == "inf")
                v = kInf;
            else if (g->is_number())
                v = g->get<double>();
            else
                throw ConfigError("params." + key + " must be a number or \"inf\"");
        }
        if (std::isinf(v))
            echo_[key] = "inf";
        else
            echo_[key] = v;
        return v;
    }

    std::string text(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
        std::string v = def;
        if (const auto* g = find(key)) {
            if (!g->is_string()) throw ConfigError("params." + key + " must be a string");
            v = g->get<std::string>();
        }
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return v == a; }))
            throw ConfigError("params." + key + " has unsupported value \"" + v + "\"");
        echo_[key] = v;
        return v;
    }

    std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> def) {
        std::vector<std::int64_t> v = std::move(def);
        if (const auto* g = find(key)) {
            if (!g->is_array() || g->empty()) throw ConfigError("params." + key + " must be a nonempty array");
            v.clear();
            for (const auto& e : *g) {
                if (!e.is_number_integer()) throw ConfigError("params." + key + " must hold integers");
                v.push_back(e.get<std::int64_t>());
            }
        }
        echo_[key] = v;
        return v;
    }

    /// Throws on keys that were never read.
    void finish() const {
        for (const auto& [k, v] : given_.items())
            if (!used_.count(k)) throw ConfigError("unknown parameter params." + k);
    }

    const ordered_json& echo() const { return echo_; }

private:
    const ordered_json* find(const std::string& key) {
        used_.insert(key);
        return given_.contains(key) ? &given_.at(key) : nullptr;
    }

    const ordered_json& given_;
    ordered_json echo_ = ordered_json::object();
    std::set<std::string> used_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

using Records = std::vector<ordered_json>;

struct Experiment {
    std::string distribution = "none";
    std::function<ordered_json(std::uint64_t seed)> trial;
    /// fills aggregates and acceptance; returns pass/fail
    std::function<bool(const Records&, ordered_json& aggregates, ordered_json& acceptance)> aggregate;
};

double lp_mean(std::span<const cplx> v, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (const auto& x : v) s += std::pow(std::abs(x), p);
    return std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

std::string suffix(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

ordered_json fit_json(const std::vector<std::pair<double, double>>& pts) {
    std::set<double> xs;
    for (const auto& p : pts) xs.insert(p.first);
    if (xs.size() < 2) return nullptr;
    const GrowthFit f = fit_growth(pts);
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

GridSignal band_limited_noise(std::mt19937_64& rng, const GridSignal& like, double band) {
    std::normal_distribution<double> nd;
    GridSignal F = frequency_grid(like);
    for (std::size_t k = 0; k < F.size(); ++k)
        if (std::abs(F.x(k)) < band) F[k] = {nd(rng), nd(rng)};
    return inverse_spectrum(F, like.origin());
}

// E1: fluctuation counts of M_k(x) on Z_n over a lambda grid.
Experiment make_e1(Params& p) {
    Experiment e;
    const std::int64_t n = p.integer("n", 1024);
    require(n >= 2 && n <= (1 << 16), "E1 needs 2 <= n <= 65536");
    const std::int64_t kmax = p.integer("kmax", n);
    require(kmax >= 1 && kmax <= 4 * n, "E1 needs 1 <= kmax <= 4n");
    const std::int64_t step = p.integer("step", 0);
    require(step >= 0 && step < n, "E1 step must lie in [0, n), 0 meaning random");
    const std::int64_t steps = p.integer("lambda_steps", 12);
    require(steps >= 1 && steps <= 60, "E1 lambda_steps must lie in 1..60");
    const double r = p.real("r", 3.0);
    require(r >= 1.0, "E1 needs r >= 1");
    const std::int64_t samples = p.integer("bound_samples", 8);
    require(samples >= 0 && samples <= n, "E1 bound_samples must lie in [0, n]");
    e.distribution = p.text("distribution", "ternary", {"ternary", "bernoulli", "gaussian"});
    const auto lambdas = lambda_grid(static_cast<int>(steps));

    e.trial = [=, dist = e.distribution](std::uint64_t seed) {
        const RotationDraw d = draw_rotation_inputs(seed, n, step, dist);
        const CyclicSystem sys(n, d.step);
        std::vector<std::int64_t> totals(lambdas.size(), 0);
        std::int64_t monotone = 0, bound = 0;
        for (std::int64_t x = 0; x < n; ++x) {
            const auto series = bilinear_average_series(sys, d.f1, d.f2, x, static_cast<std::size_t>(kmax));
            std::size_t prev = 0;
            const double vr = x < samples ? std::pow(var_norm(series, r, VariationMode::semi).value, r) : 0.0;
            for (std::size_t j = 0; j < lambdas.size(); ++j) {
                const std::size_t c = fluctuations_at_scale(series, lambdas[j]).count;
                totals[j] += static_cast<std::int64_t>(c);
                if (c < prev) ++monotone;
                prev = c;
                if (x < samples && static_cast<double>(c) * std::pow(lambdas[j], -r) > vr * (1 + 1e-12) + 1e-300) ++bound;
            }
        }
        ordered_json rec;
        rec["step"] = d.step;
        for (std::size_t j = 0; j < lambdas.size(); ++j) rec["N_total_l" + std::to_string(j)] = totals[j];
        rec["monotone_violations"] = monotone;
        rec["bound_violations"] = bound;
        return rec;
    };
    e.aggregate = [=](const Records& recs, ordered_json& agg, ordered_json& acc) {
        std::vector<std::pair<double, double>> pts;
        ordered_json maxmean = ordered_json::array();
        std::int64_t mono = 0, bound = 0;
        for (const auto& r2 : recs) {
            mono += r2["monotone_violations"].get<std::int64_t>();
            bound += r2["bound_violations"].get<std::int64_t>();
        }
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            double m = 0.0;
            for (const auto& r2 : recs)
                m = std::max(m, r2["N_total_l" + std::to_string(j)].get<double>() / static_cast<double>(n));
            maxmean.push_back(m);
            if (m > 0.0) pts.emplace_back(lambdas[j], m);
        }
        agg["lambda"] = lambdas;
        agg["max_mean_N"] = maxmean;
        agg["fit"] = fit_json(pts);
        agg["monotone_violations"] = mono;
        agg["bound_violations"] = bound;
        const bool ok = mono == 0 && bound == 0 && !agg["fit"].is_null();
        acc = {{"criterion", "N nondecreasing in lambda, N lambda^-r <= V^r^r, finite fitted exponent"},
               {"passed", ok}};
        return ok;
    };
    return e;
}

// E2: ||V^r_k M_k||_{L^q} / (||f1||_{p1} ||f2||_{p2}) on Z_n.
Experiment make_e2(Params& p) {
    Experiment e;
    const std::int64_t n = p.integer("n", 128);
    require(n >= 2 && n <= 4096, "E2 needs 2 <= n <= 4096");
    const std::int64_t kmax = p.integer("kmax", n);
    require(kmax >= 1 && kmax <= 4096, "E2 needs 1 <= kmax <= 4096");
    const std::int64_t step = p.integer("step", 0);
    require(step >= 0 && step < n, "E2 step must lie in [0, n), 0 meaning random");
    const double r = p.real("r", 3.0);
    require(r > 2.0, "E2 needs r > 2");
    const Exponents ex = make_exponents(p.exponent("p1", 4.0), p.exponent("p2", 4.0));
    e.distribution = p.text("distribution", "ternary", {"ternary", "bernoulli", "gaussian"});
    e.trial = [=, dist = e.distribution](std::uint64_t seed) {
        const RotationDraw d = draw_rotation_inputs(seed, n, step, dist);
        const CyclicSystem sys(n, d.step);
        std::vector<cplx> v(static_cast<std::size_t>(n));
        for (std::int64_t x = 0; x < n; ++x)
            v[static_cast<std::size_t>(x)] =
                var_norm(bilinear_average_series(sys, d.f1, d.f2, x, static_cast<std::size_t>(kmax)), r,
                         VariationMode::full)
                    .value;
        const double num = lp_mean(v, ex.q), a = lp_mean(d.f1, ex.p1), b = lp_mean(d.f2, ex.p2);
        ordered_json rec;
        rec["step"] = d.step;
        rec["vr_lq"] = num;
        rec["f1_lp1"] = a;
        rec["f2_lp2"] = b;
        rec["ratio"] = a * b > 0.0 ? num / (a * b) : 0.0;
        return rec;
    };
    e.aggregate = [](const Records& recs, ordered_json& agg, ordered_json& acc) {
        double m = 0.0, s = 0.0;
        for (const auto& r2 : recs) {
            m = std::max(m, r2["ratio"].get<double>());
            s += r2["ratio"].get<double>();
        }
        agg["max_ratio"] = m;
        agg["mean_ratio"] = s / static_cast<double>(recs.size());
        acc = {{"criterion", "reported only"}, {"passed", true}};
        return true;
    };
    (void)ex.q;
    return e;
}

// E3: max over trials of ||Pi_k f||_{L^2(V^r)} / ||f||_2 against N = |Xi|.
Experiment make_e3(Params& p) {
    Experiment e;
    const std::int64_t size = p.integer("grid_size", 4096);
    require(size >= 64 && size <= (1 << 20), "E3 grid_size must lie in [64, 2^20]");
    const double h = p.real("spacing", 1.0 / 64);
    require(h > 0.0, "E3 spacing must be positive");
    const std::int64_t kmin = p.integer("kmin", -2), kmax = p.integer("kmax", 5);
    require(kmin <= kmax && kmax - kmin <= 40, "E3 needs kmin <= kmax with at most 41 scales");
    const double r = p.real("r", 3.0);
    require(r > 2.0, "E3 needs r > 2");
    const auto Ns = p.integers("N_values", {2, 4, 8, 16, 32, 64});
    const double spread = p.real("freq_spread", 16.0);
    const double band = p.real("band", 30.0);
    const double max_slope = p.real("max_slope", 0.5);
    const double edge = 0.5 / h;
    require(spread > 0.0 && spread + std::ldexp(1.0, -static_cast<int>(kmin)) <= edge,
            "E3 frequencies plus 2^-kmin must stay inside the grid band");
    require(band > 0.0 && band <= edge, "E3 band must lie inside the grid band");
    for (auto N : Ns) require(N >= 1 && N <= 4096, "E3 N_values must lie in 1..4096");
    e.distribution = "gaussian band-limited f, uniform frequencies";
    e.trial = [=](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-spread, spread);
        const GridSignal like(0.0, h, static_cast<std::size_t>(size));
        ordered_json rec;
        for (auto N : Ns) {
            std::vector<double> xs;
            while (xs.size() < static_cast<std::size_t>(N)) {
                xs.push_back(u(rng));
                std::sort(xs.begin(), xs.end());
                xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            }
            const GridSignal f = band_limited_noise(rng, like, band);
            const double prof = variation_profile(f, FrequencySet(xs), static_cast<int>(kmin), static_cast<int>(kmax), r);
            rec["ratio_N" + std::to_string(N)] = prof / f.l2_norm();
        }
        return rec;
    };
    e.aggregate = [=](const Records& recs, ordered_json& agg, ordered_json& acc) {
        std::vector<std::pair<double, double>> pts;
        ordered_json mx = ordered_json::array();
        for (auto N : Ns) {
            double m = 0.0;
            for (const auto& r2 : recs) m = std::max(m, r2["ratio_N" + std::to_string(N)].get<double>());
            mx.push_back(m);
            if (m > 0.0) pts.emplace_back(static_cast<double>(N), m);
        }
        agg["N"] = Ns;
        agg["max_ratio"] = mx;
        agg["fit"] = fit_json(pts);
        const bool ok = !agg["fit"].is_null() && agg["fit"]["exponent"].get<double>() <= max_slope;
        acc = {{"criterion", "fitted log-log slope <= max_slope"}, {"max_slope", max_slope}, {"passed", ok}};
        return ok;
    };
    return e;
}

// E4: Bessel ratio of stacked singleton trees against L = sup N_T.
Experiment make_e4(Params& p) {
    Experiment e;
    const auto Ls = p.integers("L_values", {1, 2, 4, 8});
    const std::int64_t size = p.integer("grid_size", 8192);
    const double h = p.real("spacing", 1.0 / 512);
    const std::int64_t gap = p.integer("n_gap", 20);
    require(size >= 64 && size <= (1 << 20) && h > 0.0, "E4 needs a grid of 64..2^20 points with positive spacing");
    require(gap >= 2, "E4 n_gap must be at least 2");
    const std::int64_t Lmax = *std::max_element(Ls.begin(), Ls.end());
    for (auto L : Ls) require(L >= 1 && L <= 256, "E4 L_values must lie in 1..256");
    require(static_cast<double>(gap * Lmax + 2) < 0.5 / h, "E4 tiles leave the grid band; lower n_gap or spacing");
    require(static_cast<double>(size) * h >= 4.0, "E4 grid extent must be at least 4");
    e.distribution = "complex gaussian coefficients";
    e.trial = [=](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        const GridSignal like(0.0, h, static_cast<std::size_t>(size));
        const Nu nu{static_cast<int>(rng() % 5), static_cast<int>(rng() % 5), 16, 0};
        const std::int64_t m = static_cast<std::int64_t>(rng() % 4);
        ordered_json rec;
        for (auto L : Ls) {
            std::vector<Tree> trees;
            CoefficientMap b;
            for (std::int64_t q = 0; q < L; ++q) {
                const TriTile t{nu, 0, m, gap * q};
                trees.push_back(Tree{t, {t}, 2});
                b.entries[t] = {nd(rng), nd(rng)};
            }
            rec["ratio_L" + std::to_string(L)] = bessel_ratio(trees, b, 1, like);
        }
        return rec;
    };
    e.aggregate = [=](const Records& recs, ordered_json& agg, ordered_json& acc) {
        ordered_json mx = ordered_json::array();
        double overall = 0.0;
        for (auto L : Ls) {
            double m = 0.0;
            for (const auto& r2 : recs) m = std::max(m, r2["ratio_L" + std::to_string(L)].get<double>());
            mx.push_back(m);
            overall = std::max(overall, m);
        }
        agg["L"] = Ls;
        agg["max_ratio"] = mx;
        agg["overall_max"] = overall;
        acc = {{"criterion", "reported only"}, {"passed", true}};
        return true;
    };
    return e;
}

// E5: the transference identity on random integer sequences.
Experiment make_e5(Params& p) {
    Experiment e;
    const std::int64_t radius = p.integer("radius", 16);
    const std::int64_t amp = p.integer("amplitude", 3);
    const std::int64_t kmax = p.integer("kmax", 64);
    const double h = p.real("spacing", 1.0 / 6);
    const std::string metric = p.text("metric", "literal", {"literal", "centers", "overlap"});
    const double tol = p.real("tolerance", 1e-12);
    require(radius >= 0 && radius <= 1000, "E5 radius must lie in 0..1000");
    require(amp >= 1 && amp <= 1000, "E5 amplitude must lie in 1..1000");
    require(kmax >= 1 && kmax <= 10000, "E5 kmax must lie in 1..10000");
    require(h > 0.0 && std::abs(1.0 / (6.0 * h) - std::round(1.0 / (6.0 * h))) < 1e-9,
            "E5 spacing must be 1/(6m) for an integer m");
    e.distribution = "uniform integers in [-amplitude, amplitude]";
    e.trial = [=](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        auto draw = [&] {
            IntSequence s;
            s.offset = -radius;
            for (std::int64_t i = -radius; i <= radius; ++i)
                s.values.emplace_back(static_cast<double>(static_cast<std::int64_t>(rng() % (2 * amp + 1)) - amp));
            return s;
        };
        const IntSequence f1 = draw(), f2 = draw();
        const auto t = transference_check(f1, f2, static_cast<std::size_t>(kmax), h);
        return ordered_json{{"literal", t.max_deviation},
                            {"centers", t.max_deviation_at_centers},
                            {"overlap", t.max_deviation_overlap}};
    };
    e.aggregate = [=](const Records& recs, ordered_json& agg, ordered_json& acc) {
        for (const char* k : {"literal", "centers", "overlap"}) {
            double m = 0.0;
            for (const auto& r2 : recs) m = std::max(m, r2[k].get<double>());
            agg["max_" + std::string(k)] = m;
        }
        const double v = agg["max_" + metric].get<double>();
        const bool ok = v <= tol;
        acc = {{"criterion", "max deviation <= tolerance"}, {"metric", metric}, {"tolerance", tol}, {"value", v},
               {"passed", ok}};
        return ok;
    };
    return e;
}

// E6: restricted-type ratios of the model trilinear form at the hexagon vertices.
Experiment make_e6(Params& p) {
    Experiment e;
    const std::int64_t size = p.integer("grid_size", 1024);
    const double h = p.real("spacing", 1.0 / 32);
    const std::int64_t tiles = p.integer("tiles", 12);
    const std::int64_t segments = p.integer("segments", 4);
    const std::string mode = p.text("modulation", "none", {"none", "variation", "square"});
    const double r = p.real("r", 3.0);
    require(size >= 64 && size <= (1 << 18) && h > 0.0, "E6 needs a grid of 64..2^18 points with positive spacing");
    require(0.5 / h >= 16.0, "E6 needs a grid band of at least 16 (spacing <= 1/32)");
    require(static_cast<double>(size) * h >= 4.0, "E6 grid extent must be at least 4");
    require(tiles >= 0 && tiles <= 1000, "E6 tiles must lie in 0..1000");
    require(segments >= 1 && segments <= 100, "E6 segments must lie in 1..100");
    require(r > 2.0, "E6 needs r > 2");
    e.distribution = "indicators of random unions of segments; random unit-scale tri-tiles";
    e.trial = [=](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const GridSignal like(0.0, h, static_cast<std::size_t>(size));
        const auto extent = static_cast<std::int64_t>(std::floor(like.extent()));
        std::vector<TriTile> P;
        for (std::int64_t t = 0; t < tiles; ++t) {
            const std::int64_t sgn = rng() % 2 ? 1 : -1;
            const Nu nu{static_cast<int>(rng() % 5), static_cast<int>(rng() % 5), 16 * sgn, 0};
            const std::int64_t n = -sgn * (4 + static_cast<std::int64_t>(rng() % 9));
            P.push_back(TriTile{nu, 0, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(extent)), n});
        }
        std::array<double, 3> meas{};
        std::array<GridSignal, 3> f;
        for (int i = 0; i < 3; ++i) {
            f[i] = GridSignal(like.origin(), h, like.size());
            for (std::int64_t s = 0; s < segments; ++s) {
                const std::size_t a = rng() % like.size(), len = 1 + rng() % (like.size() / 8);
                for (std::size_t q = a; q < std::min(a + len, like.size()); ++q) f[i][q] = 1.0;
            }
            double c = 0.0;
            for (std::size_t q = 0; q < like.size(); ++q) c += std::abs(f[i][q]);
            meas[i] = c * h;
        }
        ModulationData mod;
        if (mode != "none") {
            GridSignal u(like.origin(), h, like.size());
            std::uniform_real_distribution<double> th(0.0, 2.0 * kPi);
            for (std::size_t q = 0; q < u.size(); ++q) u[q] = std::polar(1.0, th(rng));
            if (mode == "variation") {
                mod.mode = Modulation::variation;
                mod.r = r;
                mod.breaks = {-1, 1};
                mod.a = {u};
            } else {
                mod.mode = Modulation::square;
                mod.d[0] = u;
            }
        }
        const cplx lam = model_trilinear_form(P, f[0], f[1], f[2], mod);
        ordered_json rec;
        rec["lambda_abs"] = std::abs(lam);
        for (int i = 0; i < 3; ++i) rec["measure_F" + std::to_string(i + 1)] = meas[i];
        for (std::size_t v = 0; v < kHexagon.size(); ++v)
            rec["ratio_A" + std::to_string(v + 1)] = restricted_type_ratio(lam, meas, kHexagon[v]);
        return rec;
    };
    e.aggregate = [](const Records& recs, ordered_json& agg, ordered_json& acc) {
        ordered_json mx = ordered_json::array();
        for (std::size_t v = 0; v < kHexagon.size(); ++v) {
            double m = 0.0;
            for (const auto& r2 : recs) m = std::max(m, r2["ratio_A" + std::to_string(v + 1)].get<double>());
            mx.push_back(m);
        }
        agg["vertices"] = kHexagon;
        agg["max_ratio"] = mx;
        acc = {{"criterion", "reported only"}, {"passed", true}};
        return true;
    };
    return e;
}

// E7: ||V^r_k (zeta_k * f)||_{L^s} / ||f||_s for the Gaussian zeta.
Experiment make_e7(Params& p) {
    Experiment e;
    const std::int64_t size = p.integer("grid_size", 4096);
    const double h = p.real("spacing", 1.0 / 16);
    const std::int64_t kmin = p.integer("kmin", -4), kmax = p.integer("kmax", 4);
    const double r = p.real("r", 3.0), s = p.real("s", 2.0), band = p.real("band", 6.0);
    require(size >= 64 && size <= (1 << 20) && h > 0.0, "E7 needs a grid of 64..2^20 points with positive spacing");
    require(kmin <= kmax && kmax - kmin <= 40, "E7 needs kmin <= kmax with at most 41 scales");
    require(r > 2.0, "E7 needs r > 2");
    require(s > 1.0, "E7 needs 1 < s < inf");
    require(band > 0.0 && band <= 0.5 / h, "E7 band must lie inside the grid band");
    e.distribution = "gaussian band-limited f";
    e.trial = [=](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const GridSignal like(0.0, h, static_cast<std::size_t>(size));
        const GridSignal f = band_limited_noise(rng, like, band);
        const GridSignal F = spectrum(f);
        std::vector<GridSignal> smooth;
        for (std::int64_t k = kmin; k <= kmax; ++k) {
            GridSignal G = F;
            const double d = std::ldexp(1.0, static_cast<int>(k));
            for (std::size_t q = 0; q < G.size(); ++q) G[q] *= std::exp(-kPi * d * d * G.x(q) * G.x(q));
            smooth.push_back(inverse_spectrum(G, f.origin()));
        }
        std::vector<cplx> seq(smooth.size());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            for (std::size_t q = 0; q < smooth.size(); ++q) seq[q] = smooth[q][i];
            num += std::pow(var_norm(seq, r, VariationMode::full).value, s);
            den += std::pow(std::abs(f[i]), s);
        }
        return ordered_json{{"ratio", std::pow(num / den, 1.0 / s)}};
    };
    e.aggregate = [](const Records& recs, ordered_json& agg, ordered_json& acc) {
        double m = 0.0;
        for (const auto& r2 : recs) m = std::max(m, r2["ratio"].get<double>());
        agg["max_ratio"] = m;
        acc = {{"criterion", "reported only"}, {"passed", true}};
        return true;
    };
    return e;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string csv_value(const ordered_json& v) {
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    return v.dump();
}

}  // namespace

Exponents make_exponents(double p1, double p2) {
    if (!(p1 > 1.0) || !(p2 > 1.0)) throw ConfigError("exponents need 1 < p1, p2 <= inf");
    const double inv = (std::isinf(p1) ? 0.0 : 1.0 / p1) + (std::isinf(p2) ? 0.0 : 1.0 / p2);
    if (!(inv > 0.0)) throw ConfigError("q = inf is outside the range 2/3 < q < inf");
    const double q = 1.0 / inv;
    if (!(q > 2.0 / 3.0)) throw ConfigError("q = " + std::to_string(q) + " is outside the range 2/3 < q < inf");
    return {p1, p2, q};
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
    return splitmix64(master_seed ^ splitmix64(trial));
}

Observable random_observable(std::mt19937_64& rng, std::size_t n, const std::string& distribution) {
    Observable f(n);
    if (distribution == "ternary") {
        for (auto& v : f) v = static_cast<double>(static_cast<int>(rng() % 3) - 1);
    } else if (distribution == "bernoulli") {
        for (auto& v : f) v = (rng() & 1) ? 1.0 : -1.0;
    } else if (distribution == "gaussian") {
        std::normal_distribution<double> nd;
        for (auto& v : f) v = nd(rng);
    } else {
        throw ConfigError("unknown distribution " + distribution);
    }
    return f;
}

RotationDraw draw_rotation_inputs(std::uint64_t seed, std::int64_t n, std::int64_t fixed_step,
                                  const std::string& distribution) {
    std::mt19937_64 rng(seed);
    RotationDraw d;
    d.step = fixed_step;
    while (d.step == 0) {
        const auto s = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n - 1));
        if (std::gcd(s, n) == 1) d.step = s;
    }
    d.f1 = random_observable(rng, static_cast<std::size_t>(n), distribution);
    d.f2 = random_observable(rng, static_cast<std::size_t>(n), distribution);
    return d;
}

std::vector<double> lambda_grid(int steps) {
    std::vector<double> l;
    for (int j = 0; j <= steps; ++j) l.push_back(std::exp2(0.5 * j));
    return l;
}

GrowthFit fit_growth(std::span<const std::pair<double, double>> points) {
    std::set<double> xs;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) domain_fail("fit_growth needs positive x and y");
        xs.insert(x);
    }
    if (xs.size() < 2) domain_fail("fit_growth needs at least two distinct x");
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    GrowthFit f;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    const double res = syy - f.exponent * sxy;
    f.r_squared = syy <= 1e-300 ? 1.0 : std::max(0.0, 1.0 - res / syy);
    return f;
}

ExperimentConfig parse_config(const ordered_json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (k != "experiment" && k != "trials" && k != "seed" && k != "params") throw ConfigError("unknown key " + k);
    ExperimentConfig c;
    if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("experiment must be a string");
    c.experiment = j["experiment"].get<std::string>();
    static const std::set<std::string> known{"E1", "E2", "E3", "E4", "E5", "E6", "E7"};
    if (!known.count(c.experiment)) throw ConfigError("unknown experiment " + c.experiment);
    if (j.contains("trials")) {
        const auto& t = j["trials"];
        if (!t.is_number_unsigned() && !(t.is_number_integer() && t.get<std::int64_t>() >= 0))
            throw ConfigError("trials must be a nonnegative integer");
        c.trials = t.get<std::uint64_t>();
        if (c.trials > kMaxTrials) throw ConfigError("trials exceeds " + std::to_string(kMaxTrials));
    }
    if (j.contains("seed")) {
        const auto& s = j["seed"];
        if (s.is_number_unsigned()) {
            c.master_seed = s.get<std::uint64_t>();
        } else if (s.is_number_integer()) {
            throw ConfigError("seed must be nonnegative");
        } else if (s.is_number_float()) {
            throw ConfigError("seed overflows 64 bits or is not an integer");
        } else if (s.is_string()) {
            const std::string str = s.get<std::string>();
            const auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), c.master_seed);
            if (ec == std::errc::result_out_of_range) throw ConfigError("seed overflows 64 bits");
            if (ec != std::errc() || ptr != str.data() + str.size() || str.empty())
                throw ConfigError("seed string must be a decimal integer");
        } else {
            throw ConfigError("seed must be an unsigned integer");
        }
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("params must be an object");
        c.params = j["params"];
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

Report run_experiment(const ExperimentConfig& cfg) {
    Params p(cfg.params);
    Experiment e;
    if (cfg.experiment == "E1") e = make_e1(p);
    else if (cfg.experiment == "E2") e = make_e2(p);
    else if (cfg.experiment == "E3") e = make_e3(p);
    else if (cfg.experiment == "E4") e = make_e4(p);
    else if (cfg.experiment == "E5") e = make_e5(p);
    else if (cfg.experiment == "E6") e = make_e6(p);
    else if (cfg.experiment == "E7") e = make_e7(p);
    else throw ConfigError("unknown experiment " + cfg.experiment);
    p.finish();
    if (cfg.trials > kMaxTrials) throw ConfigError("trials exceeds " + std::to_string(kMaxTrials));

    Records recs(cfg.trials);
    try {
        parallel_for(recs.size(), [&](std::size_t t) {
            const std::uint64_t seed = trial_seed(cfg.master_seed, t);
            ordered_json rec{{"trial", static_cast<std::uint64_t>(t)}, {"seed", seed}};
            const ordered_json body = e.trial(seed);
            for (const auto& [k, v] : body.items()) rec[k] = v;
            recs[t] = std::move(rec);
        });
    } catch (const std::domain_error& err) {
        throw ConfigError(std::string("experiment parameters are outside a module's domain: ") + err.what());
    }

    Report rep;
    ordered_json& j = rep.json;
    j["library"] = "varlab";
    j["version"] = kLibraryVersion;
    j["experiment"] = cfg.experiment;
    j["config"] = {{"experiment", cfg.experiment},
                   {"trials", cfg.trials},
                   {"seed", cfg.master_seed},
                   {"params", p.echo()}};
    j["distribution"] = e.distribution;
    j["trials"] = recs;
    ordered_json agg = nullptr, acc = ordered_json::object();
    if (recs.empty()) {
        acc = {{"criterion", "no trials"}, {"passed", true}};
    } else {
        agg = ordered_json::object();
        rep.passed = e.aggregate(recs, agg, acc);
    }
    j["aggregates"] = agg;
    j["acceptance"] = acc;

    std::vector<std::string> cols{"trial", "seed"};
    if (!recs.empty()) {
        cols.clear();
        for (const auto& [k, v] : recs.front().items()) cols.push_back(k);
    }
    std::string csv;
    for (std::size_t c = 0; c < cols.size(); ++c) csv += (c ? "," : "") + cols[c];
    csv += "\n";
    for (const auto& r : recs) {
        for (std::size_t c = 0; c < cols.size(); ++c) csv += (c ? "," : "") + csv_value(r[cols[c]]);
        csv += "\n";
    }
    rep.csv = std::move(csv);
    return rep;
}

void write_report(const Report& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream js(std::filesystem::path(dir) / "report.json", std::ios::binary);
    js << r.json.dump(2) << "\n";
    std::ofstream cs(std::filesystem::path(dir) / "report.csv", std::ios::binary);
    cs << r.csv;
    if (!js || !cs) throw std::runtime_error("cannot write report into " + dir);
}

}  // namespace varlab
