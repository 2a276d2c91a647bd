#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ersatz/estimates.hpp"
#include "ersatz/solver.hpp"

namespace ersatz {

struct TableRowSpec {
    int group = 0;
    std::vector<double> a, b;
    double c = 0.0, f = 0.0;
};

/// Structured text configuration for an experiment run.  Unknown keys or
/// sections are errors; parse failures carry the offending line number.
struct ExperimentConfig {
    // [domain]
    std::string domain_kind = "box";  // box | ball | torus
    int dim = 1;
    std::vector<double> lower, upper, center, period;
    double radius = 0.0;

    // [grid]
    std::vector<double> h_list;

    // [params]
    double delta = 0.5;
    std::optional<double> hat_delta;  // nullopt = auto search
    std::vector<double> k_list;
    double k0 = 0.0;

    // [hamiltonian]
    std::string ham_type = "linear";  // linear | bellman | isaacs | diffusion
    std::vector<double> nu, drift;
    double zeroth = 0.0;
    double source = 0.0;  // constant source term
    std::vector<TableRowSpec> rows;
    std::vector<double> diffusion_matrix;  // row-major d x d constant field

    // [data]
    std::string g_kind = "constant";  // quadratic | trig | constant
    std::vector<double> g_matrix, g_shift, g_freq;
    double g_value = 0.0;
    double g_time_linear = 0.0;

    // [time]
    double horizon = 1.0;
    std::string step = "auto";  // auto | a fixed tau value
    double safety = 0.9;

    // [run]
    std::string mode = "cylinder";  // cylinder | whole-space
    std::string store = "full";     // full | final
    std::uint64_t seed = 1;
    double holder_alpha = 0.5;

    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    /// Canonical serialization; parse_text(print()) round-trips.
    std::string print() const;
    /// FNV-1a hash of the canonical serialization.
    std::uint64_t hash() const;
};

/// A grid plus a ready-to-run solve configuration built from a config.
struct BuiltProblem {
    std::shared_ptr<Grid> grid;
    SolveConfig config;     // grid pointer refers to `grid`
    double hat_delta_used = 0.0;
};

BuiltProblem build_problem(const ExperimentConfig& cfg, double h, double big_k);

/// Resolved hat_delta (explicit value or feasible search result).
double resolve_hat_delta(const ExperimentConfig& cfg);

}  // namespace ersatz
