#include "varlab/size.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace varlab {

const cplx& CoefficientMap::at(const TriTile& p) const {
    auto it = entries.find(p);
    if (it == entries.end()) domain_fail("missing coefficient for tri-tile " + p.str());
    return it->second;
}

namespace {

std::vector<TriTile> canonical(std::span<const TriTile> v) {
    std::vector<TriTile> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<TriTile> merged_universe(std::span<const TriTile> P, std::span<const TriTile> U) {
    std::vector<TriTile> all(P.begin(), P.end());
    all.insert(all.end(), U.begin(), U.end());
    return canonical(all);
}

// Relation tables between tops (rows) and tiles (columns).
struct Relations {
    std::size_t cols = 0;
    std::vector<char> same;
    std::array<std::vector<char>, 3> over;  // P_i < top_i
    std::vector<char> lac;                  // P_j lesssim' top_j
    std::vector<char> jless;                // P_j < top_j

    Relations(std::span<const TriTile> tops, std::span<const TriTile> tiles, int j) : cols(tiles.size()) {
        const std::size_t n = tops.size() * tiles.size();
        same.assign(n, 0);
        lac.assign(n, 0);
        for (auto& o : over) o.assign(n, 0);
        jless.assign(n, 0);
        auto legs = [](std::span<const TriTile> v) {
            std::vector<std::array<Tile, 3>> out(v.size());
            for (std::size_t k = 0; k < v.size(); ++k)
                for (int i = 1; i <= 3; ++i) out[k][i - 1] = v[k].tile(i);
            return out;
        };
        const auto top_legs = legs(tops);
        const auto tile_legs = legs(tiles);
        for (std::size_t a = 0; a < tops.size(); ++a) {
            const std::int64_t e = tops[a].nu.e;
            for (std::size_t b = 0; b < tiles.size(); ++b) {
                const std::size_t k = a * cols + b;
                if (tiles[b].nu != tops[a].nu) domain_fail("tri-tiles from different P_nu");
                same[k] = tiles[b] == tops[a];
                if (!tile_legs[b][0].time.proper_subset_of(top_legs[a][0].time)) continue;
                for (int i = 1; i <= 3; ++i)
                    over[i - 1][k] = tile_relation(tile_legs[b][i - 1], top_legs[a][i - 1], TileOrder::less, e);
                lac[k] = tile_relation(tile_legs[b][j - 1], top_legs[a][j - 1], TileOrder::lesssim_prime, e);
                jless[k] = over[j - 1][k];
            }
        }
    }
    std::size_t at(std::size_t a, std::size_t b) const { return a * cols + b; }
};

/// inf of eps_{i,j} * x over x in 3 omega_{top_j}: monotone under P'_j < top_j.
Rational selection_key(const TriTile& top, int i, int j) {
    const RInterval w = top.freq(j).dilate(3);
    return lacunary_sign(i, j, top.nu.e) > 0 ? w.lo : -w.hi;
}

double normalized(double sum, const TriTile& top) { return sum / top.time().length().to_double(); }

}  // namespace

SizeResult size(std::span<const TriTile> P, const CoefficientMap& c, int j, std::span<const TriTile> universe) {
    if (j < 1 || j > 3) domain_fail("leg index must be 1, 2 or 3");
    const auto tiles = canonical(P);
    SizeResult out;
    out.universe = merged_universe(tiles, universe);
    std::vector<double> w(tiles.size());
    for (std::size_t b = 0; b < tiles.size(); ++b) w[b] = std::norm(c.at(tiles[b]));
    if (tiles.empty()) return out;

    const Relations rel(out.universe, tiles, j);
    double best = -1.0;
    for (std::size_t a = 0; a < out.universe.size(); ++a) {
        for (int i = 1; i <= 3; ++i) {
            if (i == j) continue;
            double s = 0.0;
            for (std::size_t b = 0; b < tiles.size(); ++b) {
                const std::size_t k = rel.at(a, b);
                if (rel.same[k] || (rel.over[i - 1][k] && rel.lac[k])) s += w[b];
            }
            const double v = normalized(s, out.universe[a]);
            if (v > best) {
                best = v;
                Tree t{out.universe[a], {}, i};
                for (std::size_t b = 0; b < tiles.size(); ++b) {
                    const std::size_t k = rel.at(a, b);
                    if (rel.same[k] || (rel.over[i - 1][k] && rel.lac[k])) t.members.push_back(tiles[b]);
                }
                out.witness = std::move(t);
            }
        }
    }
    out.value = std::sqrt(best);
    return out;
}

SizeIncrement size_increment(std::span<const TriTile> P, const CoefficientMap& c, int j, double alpha,
                             std::span<const TriTile> universe) {
    if (!(alpha > 0.0)) domain_fail("alpha must be positive");
    const auto tiles = canonical(P);
    const auto tops = merged_universe(tiles, universe);
    const double initial = size(tiles, c, j, tops).value;
    if (initial > alpha * (1.0 + kSizeSlack)) domain_fail("size exceeds alpha");

    std::vector<double> w(tiles.size());
    for (std::size_t b = 0; b < tiles.size(); ++b) w[b] = std::norm(c.at(tiles[b]) / alpha);
    const Relations rel(tops, tiles, j);

    std::vector<char> alive(tiles.size(), 1);
    SizeIncrement out;
    std::string failure;
    for (int i = 1; i <= 3; ++i) {
        if (i == j) continue;
        std::vector<Tree> primaries;
        while (true) {
            std::ptrdiff_t pick = -1;
            Rational pick_key;
            for (std::size_t a = 0; a < tops.size(); ++a) {
                double s = 0.0;
                for (std::size_t b = 0; b < tiles.size(); ++b) {
                    const std::size_t k = rel.at(a, b);
                    if (alive[b] && (rel.same[k] || rel.over[i - 1][k])) s += w[b];
                }
                if (!(normalized(s, tops[a]) > 0.25)) continue;
                const Rational key = selection_key(tops[a], i, j);
                bool better = pick < 0 || pick_key < key;
                if (!better && key == pick_key) {
                    const RInterval I = tops[a].time(), J = tops[static_cast<std::size_t>(pick)].time();
                    better = J.length() < I.length() || (I.length() == J.length() && I.lo < J.lo);
                }
                if (better) {
                    pick = static_cast<std::ptrdiff_t>(a);
                    pick_key = key;
                }
            }
            if (pick < 0) break;
            const auto a = static_cast<std::size_t>(pick);
            Tree T{tops[a], {}, i};
            Tree S{tops[a], {}, j};
            for (std::size_t b = 0; b < tiles.size(); ++b) {
                const std::size_t k = rel.at(a, b);
                if (alive[b] && (rel.same[k] || rel.over[i - 1][k])) {
                    T.members.push_back(tiles[b]);
                    alive[b] = 0;
                }
            }
            for (std::size_t b = 0; b < tiles.size(); ++b) {
                const std::size_t k = rel.at(a, b);
                if (alive[b] && (rel.same[k] || rel.jless[k])) {
                    S.members.push_back(tiles[b]);
                    alive[b] = 0;
                }
            }
            out.mass += T.top.time().length();
            primaries.push_back(T);
            out.selected.push_back({std::move(T), i, true});
            if (!S.members.empty()) {
                out.mass += S.top.time().length();
                out.selected.push_back({std::move(S), i, false});
            }
        }
        if (auto v = strongly_j_disjoint(primaries, j); !v.ok && out.disjoint) {
            out.disjoint = false;
            failure = "condition " + std::to_string(v.condition) + ": " + v.message;
            for (const auto& w : v.witness) failure += " " + w.str();
        }
    }
    for (std::size_t b = 0; b < tiles.size(); ++b)
        if (alive[b]) out.residual.push_back(tiles[b]);
    out.residual_size = size(out.residual, c, j, tops).value;
    if (out.residual_size > 0.5 * alpha * (1.0 + kSizeSlack))
        throw std::logic_error("size_increment: residual size exceeds alpha/2");
    if (!out.disjoint) throw std::logic_error("size_increment: selected trees are not strongly j-disjoint (" + failure + ")");
    return out;
}

}  // namespace varlab
