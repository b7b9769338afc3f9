#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "varlab/common.hpp"
#include "varlab/dynamics.hpp"

namespace varlab {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = "1.0.0";

/// Exponents with 1/q = 1/p1 + 1/p2, 2/3 < q < inf, 1 < p1, p2 <= inf (inf as +infinity).
struct Exponents {
    double p1 = 4.0;
    double p2 = 4.0;
    double q = 2.0;
};

/// Throws ConfigError outside the admissible range.
Exponents make_exponents(double p1, double p2);

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t trials = 0;
    std::uint64_t master_seed = 0;
    /// experiment parameters as given; defaults are filled in by run_experiment
    ordered_json params = ordered_json::object();
};

/// Keys: experiment ("E1".."E7"), trials, seed (unsigned 64-bit, number or decimal string), params.
ExperimentConfig parse_config(const ordered_json& j);
ExperimentConfig load_config(const std::string& path);

struct Report {
    ordered_json json;
    std::string csv;
    bool passed = true;
};

/// Runs every trial with seed trial_seed(master_seed, t) and aggregates the records.
Report run_experiment(const ExperimentConfig& cfg);

/// Writes report.json and report.csv into `dir`.
void write_report(const Report& r, const std::string& dir);

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);

/// Random observable: "ternary" (uniform on {-1,0,1}), "bernoulli" (+-1) or "gaussian".
Observable random_observable(std::mt19937_64& rng, std::size_t n, const std::string& distribution);

/// Inputs of one fluctuation/variation trial, drawn in this order: step, f1, f2.
struct RotationDraw {
    std::int64_t step = 1;
    Observable f1;
    Observable f2;
};

/// step = fixed_step when nonzero, else uniform over units of Z_n.
RotationDraw draw_rotation_inputs(std::uint64_t seed, std::int64_t n, std::int64_t fixed_step,
                                  const std::string& distribution);

/// lambda_j = 2^{j/2}, j = 0..steps
std::vector<double> lambda_grid(int steps);

struct GrowthFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

/// Least squares on (log x, log y).
GrowthFit fit_growth(std::span<const std::pair<double, double>> points);

}  // namespace varlab
