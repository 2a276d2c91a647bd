#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ersatz/solver.hpp"

namespace ersatz {

/// Measured diagnostic constants of a computed trajectory.
struct EstimateReport {
    // sup over nodes with rho > 0 of |v - g| / rho (omitted on the torus)
    std::optional<double> boundary_wedge_constant;
    // sup over steps and nodes of |v(t+tau) - v(t)| / tau
    double time_diff_sup = 0.0;
    // sup over interior nodes of sum_k |delta_{h,l_k} v|
    double first_diff_sup = 0.0;
    // sup of (rho - 6 lambda h)^+ |Delta_{h,l_k} v| (omitted on the torus)
    std::optional<double> weighted_second_diff_sup;
    // sup of sum_k |Delta_{h,l_k} v| (torus mode)
    std::optional<double> global_second_diff_sup;
    // measured M with |v(t,x) - v(t,y)| <= M (|x-y| + h) over sampled pairs
    double lipschitz_modulus = 0.0;
    // sampled sup of |v(t,x) - v(s,y)| / (|t-s|^(alpha/2) + |x-y|^alpha)
    double holder_quotient = 0.0;
    double holder_alpha = 0.5;
    // share of (interior node, step) pairs on the P branch
    double active_set_fraction = 0.0;

    /// Flat key-value text block.
    std::string to_text() const;
    /// One CSV row per field: name,value.
    std::string to_csv() const;
};

struct MeasureOptions {
    double holder_alpha = 0.5;
    std::uint64_t seed = 1;
    std::int64_t sample_pairs = 1000000;
};

/// Exhaustive sweep over stored (node, step) pairs; the Lipschitz and
/// Hoelder fields use a seeded pair sample.  Deterministic.
EstimateReport measure(const Trajectory& traj, const SolveConfig& config,
                       const MeasureOptions& options = {});

struct InterpolationCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// Discrete interpolation inequality on a sequence w(-r-1..r+1):
/// |w(1)-w(0)| <= (r/2) max |w(i+1)-2w(i)+w(i-1)| + (4/r) max |w(i)|,
/// both maxima over |i| <= r.
InterpolationCheck interpolation_inequality_check(std::span<const double> w, int r);

struct MaxPrincipleSpec {
    const Grid* grid = nullptr;
    std::vector<double> a;  // m nonnegative second-difference weights
    std::vector<double> b;  // d first-difference coefficients, h b_k^- <= a_k
    double c = 0.0;         // zeroth-order coefficient, >= 0
    DataFn eta;             // free term
    DataFn data;            // terminal and lateral data
    double horizon = 0.0;
};

struct MaxPrincipleResult {
    bool pass = false;
    double sup_v = 0.0;
    double bound = 0.0;
    int violating_node = -1;
};

/// Marches the linear scheme dv/dt + sum a_k Delta_k v + sum b_k delta_k v
/// - c v = -eta and asserts v <= T sup eta^+ + sup boundary v^+.
MaxPrincipleResult max_principle_check(const MaxPrincipleSpec& spec);

struct BoundednessTable {
    std::vector<std::string> fields;
    std::vector<std::vector<double>> values;  // per field, per level
    std::vector<bool> flagged;                // growth > factor per halving
};

/// Flags report fields growing faster than `factor` per refinement level.
BoundednessTable refinement_boundedness(const std::vector<EstimateReport>& reports,
                                        double factor = 1.5);

}  // namespace ersatz
