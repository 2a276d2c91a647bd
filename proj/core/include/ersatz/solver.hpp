#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ersatz/grid.hpp"
#include "ersatz/hamiltonian.hpp"

namespace ersatz {

using DataFn = std::function<double(double t, std::span<const double> x)>;

enum class SolveMode { Cylinder, WholeSpace };
enum class StorePolicy { Full, FinalSlice };

struct StepPolicy {
    enum class Kind { AutoCfl, Fixed } kind = Kind::AutoCfl;
    double safety = 0.9;  // for AutoCfl, in (0,1]
    double tau = 0.0;     // for Fixed
};

struct SolveConfig {
    const Grid* grid = nullptr;
    ErsatzOperator op;
    DataFn g;  // terminal and lateral boundary data
    double horizon = 0.0;
    StepPolicy step;
    SolveMode mode = SolveMode::Cylinder;
    StorePolicy store = StorePolicy::Full;
};

/// Time-indexed grid functions plus per-step diagnostics.
struct Trajectory {
    std::vector<double> times;  // ascending, t_0 = 0, t_N = T
    std::vector<GridFunction> slices;
    std::vector<std::vector<std::uint8_t>> branch_p;  // per stored slice
    double tau = 0.0;
    int steps = 0;
    std::vector<std::int64_t> p_counts;  // P-branch activations per step
    std::int64_t interior_evals = 0;

    const GridFunction& final_slice() const { return slices.front(); }
    double active_set_fraction() const {
        std::int64_t total = 0;
        for (auto c : p_counts) total += c;
        return interior_evals > 0 ? double(total) / double(interior_evals) : 0.0;
    }
};

/// Monotone explicit time step: safety / (2 m Lz / h^2 + d Lg / h + L0).
double cfl_time_step(double lz, double lgrad, double lu0, int m, int d, double h,
                     double safety);

/// As above with bounds taken from the operator; the z constant covers
/// both the Hamiltonian window and the slope of the cutoff operator.
double cfl_time_step(const ErsatzOperator& op, double h, double safety);

/// Marches the terminal-boundary-value problem backward from t = T.
Trajectory solve(const SolveConfig& config);

/// Sup over interior nodes and steps of the scheme residual
/// |(v(t_{i+1}) - v(t_i)) / tau_i + H_{K,h}[v(t_{i+1})]|.
double residual_sup(const Trajectory& traj, const SolveConfig& config);

/// Re-solves the interval adjacent to t = 0 by fixed-point iteration with
/// midpoint quadrature; an independent stepper for cross-validation.
GridFunction picard_final_interval(const Trajectory& traj, const SolveConfig& config,
                                   int iterations = 50);

struct KSweepEntry {
    double k = 0.0;
    Trajectory traj;
    double sup_diff_prev = 0.0;      // uniform Cauchy increment
    double max_pos_increment = 0.0;  // pointwise max of (v_{K'} - v_K)^+
};

/// Solves for each K in ascending order and reports the monotone
/// convergence diagnostics; throws monotonicity-check-failed when a
/// positive increment exceeds `tolerance`.
std::vector<KSweepEntry> k_sweep(const SolveConfig& config,
                                 const std::vector<double>& k_values,
                                 double tolerance = 1e-9, int threads = 1);

struct ConvergenceTable {
    std::vector<double> h;
    std::vector<double> sup_diff;  // between successive levels, size n-1
    std::vector<double> order;     // log2(e_i / e_{i+1}), size n-2
};

/// Solves across descending spacings and compares t = 0 slices on the
/// coarsest lattice.  `on_level`, when set, receives each trajectory.
ConvergenceTable h_refine(
    const SolveConfig& config, const std::vector<double>& h_values,
    const std::function<void(double h, const Grid& grid, const Trajectory&)>&
        on_level = nullptr,
    int threads = 1);

}  // namespace ersatz
