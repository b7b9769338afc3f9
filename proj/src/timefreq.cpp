#include "varlab/timefreq.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "varlab/common.hpp"

namespace varlab {

namespace {

int mod(int a, int b) { return ((a % b) + b) % b; }

Rational alternating_third(int scale) { return (scale % 2 == 0) ? Rational(1, 3) : Rational(-1, 3); }

RInterval scaled(int scale, const Rational& start, const Rational& len) {
    const Rational s = Rational::pow2(scale);
    return {s * start, s * (start + len)};
}

}  // namespace

RInterval GridInterval::interval() const {
    Rational off;
    switch (family) {
        case GridFamily::standard: off = 0; break;
        case GridFamily::shifted:
            if (mod(scale, 4) != mod(residue, 4)) domain_fail("shifted grid scale must match residue mod 4");
            off = Rational(shift, 5);
            break;
        case GridFamily::alternating_plus: off = alternating_third(scale); break;
        case GridFamily::alternating_minus: off = -alternating_third(scale); break;
    }
    return scaled(scale, Rational(position) + off, 1);
}

Regularity d_regular(const RInterval& I) {
    if (I.empty()) domain_fail("d_regular needs a nonempty interval");
    Regularity out;
    const RInterval big = I.dilate(3);
    const int k0 = static_cast<int>(std::floor(std::log2(I.length().to_double())));
    for (int d = 0; d < 3; ++d) {
        for (int k = k0 - 1; k <= k0 + 3 && !out.witness[d]; ++k) {
            const Rational len = Rational::pow2(k);
            if (len < I.length() || big.length() < len) continue;
            Rational off = 0;
            if (d == 1) off = alternating_third(k);
            if (d == 2) off = -alternating_third(k);
            const std::int64_t m = (I.lo / len - off).floor();
            const RInterval J = scaled(k, Rational(m) + off, 1);
            if (I.subset_of(J) && J.subset_of(big)) out.witness[d] = J;
        }
        if (out.witness[d] && !out.d) out.d = d;
    }
    return out;
}

bool tile_relation(const Tile& q, const Tile& p, TileOrder rel, std::int64_t e) {
    switch (rel) {
        case TileOrder::less:
            return q.time.proper_subset_of(p.time) && p.freq.dilate(3).proper_subset_of(q.freq.dilate(3));
        case TileOrder::less_equal: return q == p || tile_relation(q, p, TileOrder::less, e);
        case TileOrder::lesssim: {
            const Rational c = Rational(10) * Rational(e).abs();
            return q.time.subset_of(p.time) && p.freq.subset_of(q.freq.dilate(c));
        }
        case TileOrder::lesssim_prime:
            return tile_relation(q, p, TileOrder::lesssim, e) && !q.freq.dilate(10).intersects(p.freq.dilate(10));
    }
    return false;
}

TileParams TileParams::desk() { return {8, 16, 64}; }

RInterval TriTile::time() const {
    const Rational s = Rational::pow2(-scale);
    return {s * Rational(m), s * Rational(m + 1)};
}

RInterval TriTile::freq(int leg) const {
    switch (leg) {
        case 1: return scaled(scale, Rational(n) + Rational(nu.j1, 5), 1);
        case 2: return scaled(scale, Rational(n + nu.e) + Rational(nu.j2, 5), 1);
        case 3: return scaled(scale, Rational(2 * n + nu.e + 1) + Rational(nu.j1 + nu.j2, 5), 1);
        default: domain_fail("tri-tile legs are 1, 2, 3");
    }
}

std::string TriTile::str() const {
    return "{nu=(" + std::to_string(nu.j1) + "," + std::to_string(nu.j2) + "," + std::to_string(nu.e) + "," +
           std::to_string(nu.i) + "), s=" + std::to_string(scale) + ", m=" + std::to_string(m) +
           ", n=" + std::to_string(n) + "}";
}

TriTile make_tritile(const Nu& nu, int scale, std::int64_t m, std::int64_t n, const TileParams& params) {
    if (nu.j1 < 0 || nu.j1 > 4 || nu.j2 < 0 || nu.j2 > 4) domain_fail("j1, j2 must lie in 0..4");
    const std::int64_t ae = nu.e < 0 ? -nu.e : nu.e;
    if (ae < params.e_min || ae > params.e_max) domain_fail("|e| outside the configured range");
    if (nu.i < 0 || nu.i >= params.stride) domain_fail("nu.i must lie in [0, stride)");
    if (mod(scale, params.stride) != nu.i) domain_fail("tile scale not congruent to nu.i");
    return TriTile{nu, scale, m, n};
}

int lacunary_sign(int i, int j, std::int64_t e) {
    const int s = (e > 0) - (e < 0);
    if ((i == 1 && j == 2) || (i == 1 && j == 3) || (i == 3 && j == 2)) return s;
    if ((i == 2 && j == 1) || (i == 3 && j == 1) || (i == 2 && j == 3)) return -s;
    return 0;
}

bool Tree::has_top_member() const { return std::find(members.begin(), members.end(), top) != members.end(); }

namespace {

void require_common_nu(const Tree& t) {
    for (const auto& p : t.members)
        if (p.nu != t.top.nu) domain_fail("tree mixes tri-tiles from different P_nu");
}

}  // namespace

bool is_overlapping(const Tree& t, int i) {
    for (const auto& p : t.members)
        if (p != t.top && !tile_relation(p.tile(i), t.top.tile(i), TileOrder::less, t.top.nu.e)) return false;
    return true;
}

bool is_lacunary(const Tree& t, int j) {
    for (const auto& p : t.members)
        if (p != t.top && !tile_relation(p.tile(j), t.top.tile(j), TileOrder::lesssim_prime, t.top.nu.e))
            return false;
    return true;
}

TreeFlags classify_tree(const Tree& t) {
    require_common_nu(t);
    TreeFlags f;
    for (int i = 1; i <= 3; ++i) {
        f.overlapping[i - 1] = is_overlapping(t, i);
        f.lacunary[i - 1] = is_lacunary(t, i);
    }
    for (int j = 1; j <= 3; ++j) {
        if (!f.lacunary[j - 1]) continue;
        for (int i = 1; i <= 3; ++i)
            if (i != j && f.overlapping[i - 1]) {
                f.sign[j - 1] = lacunary_sign(i, j, t.top.nu.e);
                break;
            }
    }
    return f;
}

DisjointnessVerdict strongly_j_disjoint(std::span<const Tree> trees, int j) {
    if (j < 1 || j > 3) domain_fail("leg index must be 1, 2 or 3");
    for (const auto& t : trees) {
        require_common_nu(t);
        if (!trees.empty() && t.top.nu != trees.front().top.nu) domain_fail("trees from different P_nu");
    }
    auto fail = [](int c, std::vector<TriTile> w, std::string msg) {
        return DisjointnessVerdict{false, c, std::move(w), std::move(msg)};
    };
    for (const auto& t : trees)
        if (!is_lacunary(t, j)) return fail(1, {t.top}, "tree is not j-lacunary");

    const std::int64_t e = trees.empty() ? 0 : trees.front().top.nu.e;
    for (std::size_t a = 0; a < trees.size(); ++a) {
        for (std::size_t b = 0; b < trees.size(); ++b) {
            if (a == b) continue;
            const Tree& T = trees[a];
            const Tree& U = trees[b];
            const RInterval IT = T.top.time();
            const Tile topj = T.top.tile(j);
            for (const auto& q : U.members) {
                const Tile qj = q.tile(j);
                if (a < b && std::find(T.members.begin(), T.members.end(), q) != T.members.end())
                    return fail(2, {q}, "trees share a tri-tile");
                if (tile_relation(qj, topj, TileOrder::less_equal, e))
                    return fail(4, {q, T.top}, "P'_j <= (P_T)_j across trees");
                for (const auto& p : T.members) {
                    const Tile pj = p.tile(j);
                    if (pj.freq.proper_subset_of(qj.freq) && q.time().intersects(IT))
                        return fail(3, {p, q}, "nested j-legs with I_P' meeting I_T");
                }
            }
        }
    }
    for (std::size_t a = 0; a < trees.size(); ++a)
        for (std::size_t b = a + 1; b < trees.size(); ++b)
            for (const auto& p : trees[a].members)
                for (const auto& q : trees[b].members) {
                    const Tile pj = p.tile(j), qj = q.tile(j);
                    if (pj.time.intersects(qj.time) && pj.freq.intersects(qj.freq))
                        return fail(5, {p, q}, "j-tiles from distinct trees intersect");
                }
    return {};
}

bool is_dyadic(const RInterval& I) {
    const Rational len = I.length();
    if (len.sign() <= 0) return false;
    auto pow2 = [](std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; };
    if (!(pow2(len.num()) && len.den() == 1) && !(len.num() == 1 && pow2(len.den()))) return false;
    return (I.lo / len).den() == 1;
}

CollectionStats collection_stats(std::span<const Tree> trees) {
    CollectionStats out;
    if (trees.empty()) return out;
    std::vector<RInterval> tops;
    for (const auto& t : trees) tops.push_back(t.top.time());

    std::set<Rational> pts;
    for (const auto& I : tops) {
        pts.insert(I.lo);
        pts.insert(I.hi);
        out.mass += I.length();
    }
    out.breaks.assign(pts.begin(), pts.end());
    for (std::size_t k = 0; k + 1 < out.breaks.size(); ++k) {
        const RInterval seg{out.breaks[k], out.breaks[k + 1]};
        std::int64_t c = 0;
        for (const auto& I : tops) c += seg.subset_of(I) ? 1 : 0;
        out.counts.push_back(c);
        out.sup = std::max(out.sup, c);
    }

    std::set<RInterval> cands;
    for (const auto& I : tops) {
        RInterval J = I;
        while (true) {
            cands.insert(J);
            if (out.mass < J.length()) break;
            const Rational len2 = J.length() * Rational(2);
            const std::int64_t m = (J.lo / len2).floor();
            J = {len2 * Rational(m), len2 * Rational(m + 1)};
        }
    }
    for (const auto& J : cands) {
        Rational s;
        for (const auto& I : tops)
            if (I.subset_of(J)) s += I.length();
        out.bmo = max(out.bmo, s / J.length());
    }
    return out;
}

SparsenessVerdict sparseness(std::span<const RInterval> intervals, const Rational& A) {
    if (!(Rational(1) < A)) domain_fail("sparseness requires A > 1");
    SparsenessVerdict out;
    for (const auto& I : intervals)
        if (!is_dyadic(I)) {
            out.violation = "interval " + I.str() + " is not dyadic";
            return out;
        }
    std::array<bool, 3> common{true, true, true};
    for (const auto& I : intervals) {
        const Regularity r = d_regular(I.dilate(A));
        for (int d = 0; d < 3; ++d) common[d] = common[d] && r.witness[d].has_value();
    }
    std::optional<int> d;
    for (int k = 0; k < 3 && !d; ++k)
        if (common[k]) d = k;
    if (!d) {
        out.violation = "no common regularity class for the dilates AI";
        return out;
    }
    const Rational hundred_a = Rational(100) * A;
    for (std::size_t a = 0; a < intervals.size(); ++a) {
        for (std::size_t b = 0; b < intervals.size(); ++b) {
            const RInterval& I = intervals[a];
            const RInterval& J = intervals[b];
            if (a == b || I == J) continue;
            if (J.length() < I.length()) {
                const Rational ratio = I.length() / J.length();
                int k = 0;
                for (Rational q = ratio; Rational(1) < q; q = q / Rational(2)) ++k;
                if (Rational(k) < hundred_a) {
                    out.violation = "length ratio of " + I.str() + " and " + J.str() + " below 2^(100A)";
                    return out;
                }
            } else if (I.length() == J.length()) {
                const Rational dist = max(Rational(0), max(I.lo, J.lo) - min(I.hi, J.hi));
                if (dist < hundred_a * J.length()) {
                    out.violation = "equal intervals " + I.str() + " and " + J.str() + " closer than 100A|I|";
                    return out;
                }
            }
        }
    }
    out.d = d;
    return out;
}

}  // namespace varlab
