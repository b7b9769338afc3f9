#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "varlab/rational.hpp"

namespace varlab {

enum class GridFamily { standard, shifted, alternating_plus, alternating_minus };

/// Element of one of the grids G_0, G_{l,t}, G_1, G_2.
struct GridInterval {
    GridFamily family = GridFamily::standard;
    int shift = 0;    // l, shifted family only
    int residue = 0;  // t, shifted family only
    int scale = 0;
    std::int64_t position = 0;

    /// Throws when the scale is not congruent to the residue (mod 4) for the shifted family.
    RInterval interval() const;
};

struct Regularity {
    std::optional<int> d;
    /// Witness J for d = 0, 1, 2 when feasible.
    std::array<std::optional<RInterval>, 3> witness;
};

/// Least d with some J in G_d such that I is inside J and J is inside 3I.
Regularity d_regular(const RInterval& I);

/// Time-frequency rectangle of area one.
struct Tile {
    RInterval time;
    RInterval freq;
    friend bool operator==(const Tile&, const Tile&) = default;
};

enum class TileOrder { less, less_equal, lesssim, lesssim_prime };

/// Whether `q` relates to `p` (read: q rel p). `e` feeds the 10|e| dilation of the lesssim relations.
bool tile_relation(const Tile& q, const Tile& p, TileOrder rel, std::int64_t e);

struct TileParams {
    int stride = 4000;
    std::int64_t e_min = 498;
    std::int64_t e_max = 4002;

    static TileParams full() { return {}; }
    /// Small-scale parameters used by tests and experiments.
    static TileParams desk();
};

struct Nu {
    int j1 = 0;
    int j2 = 0;
    std::int64_t e = 0;
    int i = 0;
    friend auto operator<=>(const Nu&, const Nu&) = default;
};

/// Element of P_nu. Time interval [2^-s m, 2^-s (m+1)) for scale s congruent to nu.i.
struct TriTile {
    Nu nu;
    int scale = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;

    RInterval time() const;
    /// Frequency interval of leg k = 1, 2, 3.
    RInterval freq(int leg) const;
    Tile tile(int leg) const { return {time(), freq(leg)}; }
    std::string str() const;

    friend auto operator<=>(const TriTile&, const TriTile&) = default;
};

/// Validates the nu ranges and the scale residue.
TriTile make_tritile(const Nu& nu, int scale, std::int64_t m, std::int64_t n, const TileParams& params);

/// sgn(c(omega_{P_j}) - c(omega_{(P_T)_j})) for an i-overlapping tree, from the sign of e.
int lacunary_sign(int i, int j, std::int64_t e);

struct Tree {
    TriTile top;
    std::vector<TriTile> members;
    std::optional<int> overlap_index;

    bool has_top_member() const;
};

struct TreeFlags {
    std::array<bool, 3> overlapping{};
    std::array<bool, 3> lacunary{};
    /// epsilon_{i,j} for the first overlapping i != j, indexed by j - 1 (0 when not lacunary).
    std::array<int, 3> sign{};
};

TreeFlags classify_tree(const Tree& t);

bool is_overlapping(const Tree& t, int i);
bool is_lacunary(const Tree& t, int j);

struct DisjointnessVerdict {
    bool ok = true;
    /// 1..4 for the definition, 5 for the derived rectangle disjointness
    int condition = 0;
    std::vector<TriTile> witness;
    std::string message;
};

DisjointnessVerdict strongly_j_disjoint(std::span<const Tree> trees, int j);

struct CollectionStats {
    /// Breakpoints x_0 < x_1 < ... and the count on [x_k, x_{k+1}).
    std::vector<Rational> breaks;
    std::vector<std::int64_t> counts;
    std::int64_t sup = 0;
    Rational mass;
    Rational bmo;
};

CollectionStats collection_stats(std::span<const Tree> trees);

struct SparsenessVerdict {
    std::optional<int> d;
    std::string violation;
};

/// (A, d)-sparseness of a family of dyadic intervals.
SparsenessVerdict sparseness(std::span<const RInterval> intervals, const Rational& A);

/// Dyadic intervals (standard grid) only.
bool is_dyadic(const RInterval& I);

}  // namespace varlab
