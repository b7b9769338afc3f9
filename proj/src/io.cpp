#include "varlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace varlab::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r' || ch == ';') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return in;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::int64_t integer(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw ConfigError(std::string("field \"") + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

}  // namespace

SampleTable read_samples_csv(const std::string& path) {
    auto in = open(path);
    SampleTable t;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto cells = split(line);
        if (cells.empty()) continue;
        double v[3] = {0, 0, 0};
        bool numeric = cells.size() <= 3 && cells.size() >= 2;
        for (std::size_t c = 0; numeric && c < cells.size(); ++c) numeric = parse_double(cells[c], v[c]);
        if (!numeric) {
            if (t.t.empty() && row == 1) continue;
            throw ConfigError(path + ":" + std::to_string(row) + ": expected t,re[,im]");
        }
        t.t.push_back(v[0]);
        t.values.emplace_back(v[1], v[2]);
    }
    return t;
}

GridSignal read_signal_csv(const std::string& path) {
    const SampleTable s = read_samples_csv(path);
    if (s.t.size() < 2) throw ConfigError(path + ": a signal needs at least two samples");
    const double h = s.t[1] - s.t[0];
    if (!(h > 0.0)) throw ConfigError(path + ": t must increase");
    for (std::size_t i = 1; i < s.t.size(); ++i)
        if (std::abs(s.t[i] - s.t[0] - static_cast<double>(i) * h) > 1e-9 * std::max(1.0, std::abs(s.t[i])))
            throw ConfigError(path + ": t must be uniformly spaced");
    return GridSignal(s.t[0], h, s.values);
}

std::vector<double> read_numbers(const std::string& path) {
    auto in = open(path);
    std::vector<double> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        for (const auto& cell : split(line)) {
            double v;
            if (parse_double(cell, v))
                out.push_back(v);
            else if (row != 1)
                throw ConfigError(path + ":" + std::to_string(row) + ": not a number: " + cell);
        }
    }
    return out;
}

json load_json(const std::string& path) {
    auto in = open(path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Rational& r) { return {{"num", r.num()}, {"den", r.den()}}; }

json to_json(const RInterval& r) { return {{"lo", to_json(r.lo)}, {"hi", to_json(r.hi)}}; }

json to_json(const Tile& t) { return {{"time", to_json(t.time)}, {"freq", to_json(t.freq)}}; }

json to_json(const TriTile& p) {
    return {{"nu", {{"j1", p.nu.j1}, {"j2", p.nu.j2}, {"e", p.nu.e}, {"i", p.nu.i}}},
            {"scale", p.scale},
            {"m", p.m},
            {"n", p.n}};
}

json to_json(const Tree& t) {
    json j{{"top", to_json(t.top)}, {"members", json::array()}};
    for (const auto& p : t.members) j["members"].push_back(to_json(p));
    if (t.overlap_index) j["overlap_index"] = *t.overlap_index;
    return j;
}

json to_json(const CoefficientMap& c) {
    json a = json::array();
    for (const auto& [p, v] : c.entries) a.push_back({{"tile", to_json(p)}, {"re", v.real()}, {"im", v.imag()}});
    return a;
}

json to_json(const GridSignal& f) {
    json v = json::array();
    for (const auto& z : f.values()) v.push_back(to_json(z));
    return {{"origin", f.origin()}, {"spacing", f.spacing()}, {"values", v}};
}

cplx complex_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.contains("re"))
        return {field(j, "re").get<double>(), j.contains("im") ? j.at("im").get<double>() : 0.0};
    throw ConfigError("expected a number, [re, im] or {\"re\", \"im\"}");
}

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    const std::int64_t d = integer(j, "den");
    if (d == 0) throw ConfigError("zero denominator");
    return Rational(integer(j, "num"), d);
}

RInterval interval_from_json(const json& j) {
    RInterval r{rational_from_json(field(j, "lo")), rational_from_json(field(j, "hi"))};
    if (r.empty()) throw ConfigError("interval with lo >= hi");
    return r;
}

Tile tile_from_json(const json& j) { return {interval_from_json(field(j, "time")), interval_from_json(field(j, "freq"))}; }

TriTile tritile_from_json(const json& j, const TileParams& params) {
    const json& nu = field(j, "nu");
    const Nu v{static_cast<int>(integer(nu, "j1")), static_cast<int>(integer(nu, "j2")), integer(nu, "e"),
               static_cast<int>(integer(nu, "i"))};
    return make_tritile(v, static_cast<int>(integer(j, "scale")), integer(j, "m"), integer(j, "n"), params);
}

Tree tree_from_json(const json& j, const TileParams& params) {
    Tree t;
    t.top = tritile_from_json(field(j, "top"), params);
    for (const auto& p : field(j, "members")) t.members.push_back(tritile_from_json(p, params));
    if (j.contains("overlap_index")) t.overlap_index = static_cast<int>(integer(j, "overlap_index"));
    return t;
}

CoefficientMap coefficients_from_json(const json& j, const TileParams& params, int leg) {
    if (!j.is_array()) throw ConfigError("coefficients must be an array");
    CoefficientMap c;
    c.leg = leg;
    for (const auto& e : j) c.entries[tritile_from_json(field(e, "tile"), params)] = complex_from_json(e);
    return c;
}

GridSignal signal_from_json(const json& j) {
    if (j.is_string()) return read_signal_csv(j.get<std::string>());
    if (j.is_object() && j.contains("csv")) return read_signal_csv(field(j, "csv").get<std::string>());
    const double h = field(j, "spacing").get<double>();
    if (!(h > 0.0)) throw ConfigError("spacing must be positive");
    std::vector<cplx> v;
    for (const auto& z : field(j, "values")) v.push_back(complex_from_json(z));
    if (v.empty()) throw ConfigError("a signal needs samples");
    return GridSignal(field(j, "origin").get<double>(), h, std::move(v));
}

}  // namespace varlab::io
