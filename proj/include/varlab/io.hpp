#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "varlab/rational.hpp"
#include "varlab/signal.hpp"
#include "varlab/size.hpp"
#include "varlab/timefreq.hpp"

namespace varlab::io {

using json = nlohmann::ordered_json;

/// Rows "t,re[,im]"; a non-numeric first row is a header.
struct SampleTable {
    std::vector<double> t;
    std::vector<cplx> values;
};

SampleTable read_samples_csv(const std::string& path);
/// Uniformly spaced t required.
GridSignal read_signal_csv(const std::string& path);
/// Real numbers separated by commas, whitespace or newlines; non-numeric tokens on the first line are a header.
std::vector<double> read_numbers(const std::string& path);

json load_json(const std::string& path);

json to_json(cplx z);
json to_json(const Rational& r);
json to_json(const RInterval& r);
json to_json(const Tile& t);
json to_json(const TriTile& p);
json to_json(const Tree& t);
json to_json(const CoefficientMap& c);
json to_json(const GridSignal& f);

cplx complex_from_json(const json& j);
/// {"num", "den"} or an integer
Rational rational_from_json(const json& j);
RInterval interval_from_json(const json& j);
Tile tile_from_json(const json& j);
/// {"nu": {"j1", "j2", "e", "i"}, "scale", "m", "n"}, validated against params
TriTile tritile_from_json(const json& j, const TileParams& params);
/// {"top", "members", "overlap_index"?}
Tree tree_from_json(const json& j, const TileParams& params);
/// [{"tile", "re", "im"}]
CoefficientMap coefficients_from_json(const json& j, const TileParams& params, int leg = 1);
/// {"origin", "spacing", "values": [re | [re, im]]}, {"csv": path}, or a path string
GridSignal signal_from_json(const json& j);

}  // namespace varlab::io
