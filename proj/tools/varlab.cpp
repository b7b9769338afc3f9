#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "varlab/dynamics.hpp"
#include "varlab/harness.hpp"
#include "varlab/io.hpp"
#include "varlab/kernels.hpp"
#include "varlab/projections.hpp"
#include "varlab/sequence.hpp"
#include "varlab/size.hpp"
#include "varlab/timefreq.hpp"
#include "varlab/wavepackets.hpp"

using namespace varlab;
using io::json;

namespace {

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void print_csv_row(double x, cplx z) { std::printf("%.17g,%.17g,%.17g\n", x, z.real(), z.imag()); }

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config is missing \"") + key + "\"");
    return j.at(key);
}

int get_int(const json& j, const char* key, std::optional<int> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(std::string("config is missing \"") + key + "\"");
    }
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("\"") + key + "\" must be an integer");
    return j.at(key).get<int>();
}

json fluct_json(const FluctuationCount& f) {
    json iv = json::array();
    for (const auto& i : f.intervals) iv.push_back({i.begin, i.end});
    return {{"count", f.count}, {"threshold", f.threshold}, {"intervals", iv}};
}

// --- sequences -------------------------------------------------------------------------------

struct SeqOpts {
    std::string input;
    double r = 2.0;
    bool semi = false;
    std::optional<double> tau, lambda;
    bool strict = false;
};

int run_varnorm(const SeqOpts& o) {
    const auto s = io::read_samples_csv(o.input);
    const auto v = var_norm(s.values, o.r, o.semi ? VariationMode::semi : VariationMode::full);
    json labels = json::array();
    for (auto i : v.witness) labels.push_back(s.t[i]);
    print_json({{"r", o.r}, {"mode", o.semi ? "semi" : "full"}, {"value", v.value}, {"witness", v.witness},
                {"witness_t", labels}});
    return 0;
}

int run_fluct(const SeqOpts& o) {
    if (o.tau.has_value() == o.lambda.has_value()) throw ConfigError("give exactly one of --tau and --lambda");
    const auto s = io::read_samples_csv(o.input);
    const Threshold cmp = o.strict ? Threshold::strictly_above : Threshold::at_least;
    const auto f = o.tau ? fluctuation_count(s.values, *o.tau, cmp) : fluctuations_at_scale(s.values, *o.lambda, cmp);
    print_json(fluct_json(f));
    return 0;
}

// --- ergodic ---------------------------------------------------------------------------------

struct ErgodicOpts {
    std::int64_t n = 0, step = 1, x = 0;
    std::size_t kmax = 1;
    std::string f1, f2, summary;
    std::optional<double> varnorm, fluct;
};

Observable read_observable(const std::string& path, std::int64_t n) {
    const auto s = io::read_samples_csv(path);
    if (static_cast<std::int64_t>(s.values.size()) != n)
        throw ConfigError(path + " must hold exactly N = " + std::to_string(n) + " samples");
    return s.values;
}

int run_ergodic(const ErgodicOpts& o) {
    const CyclicSystem sys(o.n, o.step);
    const auto series =
        bilinear_average_series(sys, read_observable(o.f1, o.n), read_observable(o.f2, o.n), o.x, o.kmax);
    std::printf("k,re,im\n");
    for (std::size_t k = 0; k < series.size(); ++k) print_csv_row(static_cast<double>(k + 1), series[k]);
    json sum{{"N", o.n}, {"step", o.step}, {"x", o.x}, {"kmax", o.kmax}};
    if (o.varnorm) sum["varnorm"] = {{"r", *o.varnorm}, {"value", var_norm(series, *o.varnorm, VariationMode::full).value}};
    if (o.fluct) sum["fluctuations"] = fluct_json(fluctuation_count(series, *o.fluct));
    if (!o.summary.empty()) {
        std::ofstream out(o.summary);
        out << sum.dump(2) << "\n";
    } else {
        std::cerr << sum.dump(2) << "\n";
    }
    return 0;
}

// --- kernels ---------------------------------------------------------------------------------

struct KernelOpts {
    std::string kernel = "gaussian";
    double alpha = 0.1;
    int n0 = 3;
    double t = 1.0;
    std::string f1, f2;
};

KernelProfile load_kernel(const KernelOpts& o) {
    if (std::filesystem::exists(o.kernel)) return load_kernel_csv(o.kernel);
    return builtin_kernel(o.kernel, o.alpha);
}

int run_kernel(const std::string& action, const KernelOpts& o) {
    const KernelProfile k = load_kernel(o);
    if (action == "check") {
        const auto c = check_kernel_conditions(k, o.n0);
        json g = json::array();
        for (bool b : c.growing) g.push_back(b);
        print_json({{"kernel", k.name}, {"constants", c.constants}, {"growing", g}, {"ok", c.ok()}});
        return c.ok() ? 0 : 2;
    }
    if (action == "decompose") {
        const auto d = decompose_kernel(k);
        json pieces = json::array();
        for (const auto& p : d.pieces) pieces.push_back({{"j", p.j}, {"weight", p.weight}, {"support_ok", p.support_ok}});
        print_json({{"kernel", k.name},
                    {"has_near_part", d.has_near_part},
                    {"zero_plus", io::to_json(d.zero_plus)},
                    {"zero_minus", io::to_json(d.zero_minus)},
                    {"pieces", pieces},
                    {"reconstruction_error", d.reconstruction_error},
                    {"telescoping_error", d.telescoping_error},
                    {"truncation_tail", d.truncation_tail}});
        return 0;
    }
    if (o.f1.empty() || o.f2.empty()) throw ConfigError("kernel apply needs --f1 and --f2");
    const auto r = bilinear_apply(k, o.t, io::read_signal_csv(o.f1), io::read_signal_csv(o.f2));
    print_json({{"kernel", k.name},
                {"t", o.t},
                {"deviation", r.deviation},
                {"direct", io::to_json(r.direct)},
                {"spectral", io::to_json(r.spectral)}});
    return 0;
}

// --- tiles -----------------------------------------------------------------------------------

struct TileOpts {
    std::string input;
    int stride = TileParams::desk().stride;
    std::optional<std::int64_t> e;
    double A = 4.0;
};

TileParams tile_params(const TileOpts& o) {
    TileParams p = TileParams::desk();
    p.stride = o.stride;
    return p;
}

std::vector<Tree> read_trees(const json& j, const TileParams& p) {
    std::vector<Tree> out;
    for (const auto& t : require(j, "trees")) out.push_back(io::tree_from_json(t, p));
    return out;
}

int run_tiles(const std::string& action, const TileOpts& o) {
    const json in = io::load_json(o.input);
    const TileParams params = tile_params(o);
    if (action == "relation") {
        const Tile q = io::tile_from_json(require(in, "q")), p = io::tile_from_json(require(in, "p"));
        const std::int64_t e = o.e ? *o.e : (in.contains("e") ? in.at("e").get<std::int64_t>() : 0);
        print_json({{"less", tile_relation(q, p, TileOrder::less, e)},
                    {"less_equal", tile_relation(q, p, TileOrder::less_equal, e)},
                    {"lesssim", tile_relation(q, p, TileOrder::lesssim, e)},
                    {"lesssim_prime", tile_relation(q, p, TileOrder::lesssim_prime, e)}});
        return 0;
    }
    if (action == "classify") {
        const auto f = classify_tree(io::tree_from_json(in, params));
        print_json({{"overlapping", f.overlapping}, {"lacunary", f.lacunary}, {"sign", f.sign}});
        return 0;
    }
    if (action == "disjoint") {
        const auto v = strongly_j_disjoint(read_trees(in, params), get_int(in, "j"));
        json w = json::array();
        for (const auto& p : v.witness) w.push_back(io::to_json(p));
        print_json({{"ok", v.ok}, {"condition", v.condition}, {"witness", w}, {"message", v.message}});
        return 0;
    }
    if (action == "stats") {
        const auto s = collection_stats(read_trees(in, params));
        json br = json::array();
        for (const auto& b : s.breaks) br.push_back(io::to_json(b));
        print_json({{"breaks", br},
                    {"counts", s.counts},
                    {"sup", s.sup},
                    {"mass", io::to_json(s.mass)},
                    {"bmo", io::to_json(s.bmo)}});
        return 0;
    }
    std::vector<RInterval> ivs;
    for (const auto& i : require(in, "intervals")) ivs.push_back(io::interval_from_json(i));
    const auto v = sparseness(ivs, Rational::from_double(o.A));
    json d = nullptr;
    if (v.d) d = *v.d;
    print_json({{"sparse", v.d.has_value()}, {"d", d}, {"violation", v.violation}});
    return 0;
}

// --- packets ---------------------------------------------------------------------------------

json analysis_json(const PacketAnalysis& a) {
    json c = json::array();
    for (const auto& [idx, v] : a.coefficients)
        c.push_back({{"m", idx.m}, {"n", idx.n}, {"j", idx.j}, {"re", v.real()}, {"im", v.imag()}});
    return {{"scale", a.scale},
            {"grid", {{"origin", a.grid.origin()}, {"spacing", a.grid.spacing()}, {"size", a.grid.size()}}},
            {"coefficients", c}};
}

GridSignal grid_from_json(const json& g) {
    const double h = require(g, "spacing").get<double>();
    const auto n = require(g, "size").get<std::size_t>();
    if (!(h > 0.0) || n == 0) throw ConfigError("grid needs positive spacing and size");
    return GridSignal(require(g, "origin").get<double>(), h, n);
}

ModulationData modulation_from_json(const json& j) {
    ModulationData m;
    const std::string mode = j.value("mode", "none");
    m.r = j.value("r", 3.0);
    if (mode == "variation") {
        m.mode = Modulation::variation;
        m.breaks = require(j, "breaks").get<std::vector<int>>();
        for (const auto& s : require(j, "a")) m.a.push_back(io::signal_from_json(s));
    } else if (mode == "square") {
        m.mode = Modulation::square;
        for (const auto& [k, s] : require(j, "d").items()) m.d[std::stoi(k)] = io::signal_from_json(s);
    } else if (mode != "none") {
        throw ConfigError("modulation mode must be none, variation or square");
    }
    return m;
}

int run_packets(const std::string& action, const std::string& config) {
    const json c = io::load_json(config);
    TileParams params = TileParams::desk();
    params.stride = get_int(c, "stride", params.stride);
    auto tiles = [&] {
        std::vector<TriTile> P;
        for (const auto& t : require(c, "tiles")) P.push_back(io::tritile_from_json(t, params));
        return P;
    };
    if (action == "analyze") {
        print_json(analysis_json(analyze(io::signal_from_json(require(c, "signal")), get_int(c, "scale"))));
        return 0;
    }
    if (action == "synthesize") {
        PacketAnalysis a;
        a.scale = get_int(c, "scale");
        a.grid = grid_from_json(require(c, "grid"));
        for (const auto& e : require(c, "coefficients"))
            a.coefficients[{e.at("m").get<std::int64_t>(), e.at("n").get<std::int64_t>(), e.at("j").get<int>()}] =
                io::complex_from_json(e);
        const GridSignal f = synthesize(a);
        std::printf("x,re,im\n");
        for (std::size_t i = 0; i < f.size(); ++i) print_csv_row(f.x(i), f[i]);
        return 0;
    }
    const int j = get_int(c, "j", 1);
    if (action == "size" || action == "increment") {
        const auto P = tiles();
        const auto coef = io::coefficients_from_json(require(c, "coefficients"), params);
        std::vector<TriTile> universe;
        if (c.contains("universe"))
            for (const auto& t : c.at("universe")) universe.push_back(io::tritile_from_json(t, params));
        if (action == "size") {
            const auto r = size(P, coef, j, universe);
            print_json({{"size", r.value}, {"witness", io::to_json(r.witness)}});
            return 0;
        }
        const auto r = size_increment(P, coef, j, require(c, "alpha").get<double>(), universe);
        json sel = json::array(), res = json::array();
        for (const auto& s : r.selected)
            sel.push_back({{"tree", io::to_json(s.tree)}, {"pass", s.pass}, {"primary", s.primary}});
        for (const auto& p : r.residual) res.push_back(io::to_json(p));
        print_json({{"selected", sel},
                    {"residual", res},
                    {"mass", io::to_json(r.mass)},
                    {"residual_size", r.residual_size},
                    {"disjoint", r.disjoint}});
        return 0;
    }
    if (action == "bessel") {
        const GridSignal like = grid_from_json(require(c, "grid"));
        const auto trees = read_trees(c, params);
        const auto b = io::coefficients_from_json(require(c, "coefficients"), params, j);
        print_json({{"ratio", bessel_ratio(trees, b, j, like)}});
        return 0;
    }
    const auto& sig = require(c, "signals");
    if (!sig.is_array() || sig.size() != 3) throw ConfigError("\"signals\" must hold f1, f2, f3");
    const auto mod = c.contains("modulation") ? modulation_from_json(c.at("modulation")) : ModulationData{};
    const cplx lam = model_trilinear_form(tiles(), io::signal_from_json(sig[0]), io::signal_from_json(sig[1]),
                                          io::signal_from_json(sig[2]), mod);
    print_json({{"lambda", io::to_json(lam)}, {"abs", std::abs(lam)}});
    return 0;
}

// --- projections -----------------------------------------------------------------------------

struct ProjectOpts {
    std::string freqs, input, summary;
    int kmin = 0, kmax = 4;
    double r = 3.0;
    bool semi = false;
};

int run_project(const ProjectOpts& o) {
    const FrequencySet xi(io::read_numbers(o.freqs));
    const GridSignal f = io::read_signal_csv(o.input);
    std::printf("k,component_count\n");
    for (int k = o.kmin; k <= o.kmax; ++k) std::printf("%d,%zu\n", k, component_count(xi, k));
    const double prof = variation_profile(f, xi, o.kmin, o.kmax, o.r, o.semi ? VariationMode::semi : VariationMode::full);
    json segs = json::array();
    const auto s = component_scales(xi, o.kmin, o.kmax);
    for (const auto& g : s) segs.push_back({{"k_begin", g.k_begin}, {"k_end", g.k_end}, {"count", g.count}});
    const json sum{{"N", xi.size()},
                   {"kmin", o.kmin},
                   {"kmax", o.kmax},
                   {"r", o.r},
                   {"mode", o.semi ? "semi" : "full"},
                   {"profile", prof},
                   {"l2_norm", f.l2_norm()},
                   {"segments", segs},
                   {"breakpoints", interior_breakpoints(s)}};
    if (!o.summary.empty()) {
        std::ofstream out(o.summary);
        out << sum.dump(2) << "\n";
    } else {
        std::cerr << sum.dump(2) << "\n";
    }
    return 0;
}

// --- harness ---------------------------------------------------------------------------------

int run_harness(const std::string& config, const std::string& out) {
    const Report r = run_experiment(load_config(config));
    write_report(r, out);
    std::cerr << "passed: " << (r.passed ? "yes" : "no") << ", report in " << out << "\n";
    return r.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"varlab: variation norms, ergodic averages and time-frequency experiments"};
    app.set_version_flag("--version", kLibraryVersion);
    app.require_subcommand(1);
    int rc = 0;

    SeqOpts seq;
    auto* vn = app.add_subcommand("varnorm", "r-variation norm of a sample sequence");
    vn->add_option("--input", seq.input, "CSV with rows t,re[,im]")->required();
    vn->add_option("--r", seq.r, "exponent r >= 1")->required();
    vn->add_flag("--semi", seq.semi, "increments only, without |a(N_0)|^r");
    vn->callback([&] { rc = run_varnorm(seq); });

    auto* fl = app.add_subcommand("fluct", "fluctuation count of a sample sequence");
    fl->add_option("--input", seq.input, "CSV with rows t,re[,im]")->required();
    fl->add_option("--tau", seq.tau, "jump threshold");
    fl->add_option("--lambda", seq.lambda, "threshold 1/lambda");
    fl->add_flag("--strict", seq.strict, "count jumps strictly above the threshold");
    fl->callback([&] { rc = run_fluct(seq); });

    ErgodicOpts erg;
    auto* er = app.add_subcommand("ergodic", "bilinear averages M_k(x) of a rotation on Z_N");
    er->add_option("--N", erg.n, "system size")->required();
    er->add_option("--step", erg.step, "rotation step");
    er->add_option("--f1", erg.f1, "CSV with N rows")->required();
    er->add_option("--f2", erg.f2, "CSV with N rows")->required();
    er->add_option("--x", erg.x, "starting point");
    er->add_option("--kmax", erg.kmax, "largest k")->required();
    er->add_option("--varnorm", erg.varnorm, "also report V^r with this r");
    er->add_option("--fluct", erg.fluct, "also report fluctuations at this threshold");
    er->add_option("--summary", erg.summary, "JSON summary path (default: stderr)");
    er->callback([&] { rc = run_ergodic(erg); });

    KernelOpts ker;
    std::string kaction;
    auto* ke = app.add_subcommand("kernel", "kernel conditions, decomposition and bilinear averages");
    ke->add_option("action", kaction, "check | decompose | apply")
        ->required()
        ->check(CLI::IsMember({"check", "decompose", "apply"}));
    ke->add_option("--kernel", ker.kernel, "gaussian, gaussian-derivative, abs-gaussian, box, mollified-box or a CSV");
    ke->add_option("--alpha", ker.alpha, "mollified-box transition width");
    ke->add_option("--n0", ker.n0, "highest derivative order to check");
    ke->add_option("--t", ker.t, "dilation t of B_t");
    ke->add_option("--f1", ker.f1, "signal CSV for apply");
    ke->add_option("--f2", ker.f2, "signal CSV for apply");
    ke->callback([&] { rc = run_kernel(kaction, ker); });

    TileOpts til;
    std::string taction;
    auto* ti = app.add_subcommand("tiles", "tile orders, tree classes, disjointness, counting stats, sparseness");
    ti->add_option("action", taction, "relation | classify | disjoint | stats | sparse")
        ->required()
        ->check(CLI::IsMember({"relation", "classify", "disjoint", "stats", "sparse"}));
    ti->add_option("--input", til.input, "JSON input")->required();
    ti->add_option("--stride", til.stride, "scale stride of the tri-tile family");
    ti->add_option("--e", til.e, "e used by the lesssim relations");
    ti->add_option("--A", til.A, "sparseness dilation A");
    ti->callback([&] { rc = run_tiles(taction, til); });

    std::string paction, pconfig;
    auto* pa = app.add_subcommand("packets", "wave-packet analysis, sizes, Bessel ratios and trilinear forms");
    pa->add_option("action", paction, "analyze | synthesize | size | increment | bessel | trilinear")
        ->required()
        ->check(CLI::IsMember({"analyze", "synthesize", "size", "increment", "bessel", "trilinear"}));
    pa->add_option("--config", pconfig, "JSON config")->required();
    pa->callback([&] { rc = run_packets(paction, pconfig); });

    ProjectOpts pro;
    auto* pr = app.add_subcommand("project", "multi-frequency projections and their variation profile");
    pr->add_option("--freqs", pro.freqs, "frequencies, comma or newline separated")->required();
    pr->add_option("--kmin", pro.kmin, "smallest k")->required();
    pr->add_option("--kmax", pro.kmax, "largest k")->required();
    pr->add_option("--r", pro.r, "exponent r > 2")->required();
    pr->add_option("--input", pro.input, "signal CSV with rows x,re[,im]")->required();
    pr->add_flag("--semi", pro.semi, "increments only");
    pr->add_option("--summary", pro.summary, "JSON summary path (default: stderr)");
    pr->callback([&] { rc = run_project(pro); });

    std::string hconfig, hout = "report";
    for (const char* name : {"run", "harness"}) {
        auto* h = app.add_subcommand(name, "run a seeded experiment (E1..E7) and write report.json / report.csv");
        h->add_option("--config", hconfig, "JSON experiment config")->required();
        h->add_option("--out", hout, "output directory");
        h->callback([&] { rc = run_harness(hconfig, hout); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
