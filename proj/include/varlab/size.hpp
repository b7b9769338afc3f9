#pragma once

#include <map>
#include <span>
#include <vector>

#include "varlab/common.hpp"
#include "varlab/timefreq.hpp"

namespace varlab {

enum class Modulation { none, variation, square };

/// Coefficients <f, phi_{P,leg}> keyed by tri-tile.
struct CoefficientMap {
    std::map<TriTile, cplx> entries;
    int leg = 1;
    Modulation modulation = Modulation::none;

    const cplx& at(const TriTile& p) const;
};

struct SizeResult {
    double value = 0.0;
    Tree witness;
    /// Tops considered, in canonical order.
    std::vector<TriTile> universe;
};

/// sup over j-lacunary trees in P with tops from universe (plus P) of ((1/|I_T|) sum |c_P|^2)^(1/2).
SizeResult size(std::span<const TriTile> P, const CoefficientMap& c, int j,
                std::span<const TriTile> universe = {});

struct SelectedTree {
    Tree tree;
    /// overlapping direction i of the pass this tree came from
    int pass = 0;
    /// true for the i-overlapping T_k, false for the companion j-overlapping S_k
    bool primary = true;
};

struct SizeIncrement {
    std::vector<SelectedTree> selected;
    std::vector<TriTile> residual;
    Rational mass;
    double residual_size = 0.0;
    /// strongly_j_disjoint verdict on the primary trees of each pass
    bool disjoint = true;
};

/// Greedy stopping-time tree selection; postconditions are checked before returning.
SizeIncrement size_increment(std::span<const TriTile> P, const CoefficientMap& c, int j, double alpha,
                             std::span<const TriTile> universe = {});

/// Relative slack used when comparing floating sizes against alpha.
inline constexpr double kSizeSlack = 1e-12;

}  // namespace varlab
