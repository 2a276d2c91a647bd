#include "ersatz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <future>

namespace ersatz {

double cfl_time_step(double lz, double lgrad, double lu0, int m, int d, double h,
                     double safety) {
    if (!(safety > 0.0 && safety <= 1.0))
        throw Error(errc::invalid_spec, "CFL safety factor must lie in (0,1]");
    double denom = 2.0 * m * lz / (h * h) + d * lgrad / h + lu0;
    if (!(denom > 0.0))
        throw Error(errc::invalid_spec, "Lipschitz bounds give no step restriction");
    return safety / denom;
}

double cfl_time_step(const ErsatzOperator& op, double h, double safety) {
    double lz = std::max(op.ham.bounds.z_hi, 2.0 / op.params.hat_delta);
    return cfl_time_step(lz, op.ham.bounds.grad, op.ham.bounds.u0,
                         op.stencil.size(), op.stencil.dim, h, safety);
}

namespace {

void validate(const SolveConfig& config) {
    if (!config.grid) throw Error(errc::invalid_spec, "solve needs a grid");
    if (!config.g) throw Error(errc::invalid_spec, "solve needs boundary data");
    if (!(config.horizon > 0.0))
        throw Error(errc::invalid_spec, "horizon must be positive");
    config.op.params.validate();
    const Grid& grid = *config.grid;
    if (grid.stencil().size() != config.op.stencil.size() ||
        grid.stencil().dim != config.op.stencil.dim)
        throw Error(errc::dimension_mismatch, "grid and operator stencils differ");
    bool torus = grid.domain().kind == Domain::Kind::Torus;
    if (config.mode == SolveMode::WholeSpace && !torus)
        throw Error(errc::invalid_spec, "whole-space mode needs a torus domain");
    if (config.mode == SolveMode::Cylinder) {
        if (torus) throw Error(errc::invalid_spec, "cylinder mode needs a bounded domain");
        if (grid.interior_count() == 0)
            throw Error(errc::grid_too_coarse, "no interior nodes at this spacing");
    }
}

double pick_tau(const SolveConfig& config) {
    double bound = cfl_time_step(config.op, config.grid->h(), 1.0);
    if (config.step.kind == StepPolicy::Kind::Fixed) {
        if (!(config.step.tau > 0.0) || config.step.tau > bound * (1.0 + 1e-12))
            throw Error(errc::refuse_to_step,
                        fmt::format("fixed tau {} violates the monotonicity bound {}",
                                    config.step.tau, bound));
        return config.step.tau;
    }
    return cfl_time_step(config.op, config.grid->h(), config.step.safety);
}

}  // namespace

Trajectory solve(const SolveConfig& config) {
    validate(config);
    const Grid& grid = *config.grid;
    const int n = grid.node_count();
    const int d = grid.dim();
    const int m = grid.stencil().size();

    Trajectory traj;
    traj.tau = pick_tau(config);

    GridFunction cur(grid);
    for (int i = 0; i < n; ++i) cur[i] = config.g(config.horizon, grid.coord(i));

    const bool full = config.store == StorePolicy::Full;
    std::vector<double> rev_times{config.horizon};
    std::vector<GridFunction> rev_slices;
    std::vector<std::vector<std::uint8_t>> rev_flags;
    if (full) {
        rev_slices.push_back(cur);
        rev_flags.emplace_back(n, 0);
    }

    std::vector<double> grad(d), z(m);
    double t = config.horizon;
    GridFunction next(grid);
    std::vector<std::uint8_t> flags(n, 0);
    while (t > 0.0) {
        double dt = std::min(traj.tau, t);
        double t_next = t - dt;
        if (t_next < 1e-15) t_next = 0.0;
        std::int64_t p_count = 0;
        std::fill(flags.begin(), flags.end(), 0);
        for (int i = 0; i < n; ++i) {
            if (!grid.is_interior(i)) {
                next[i] = config.g(t_next, grid.coord(i));
                continue;
            }
            diff_vectors(cur, i, grad, z);
            ErsatzValue ev =
                ersatz_eval(config.op, cur[i], grad, z, t, grid.coord(i));
            next[i] = cur[i] + dt * ev.value;
            if (ev.branch == Branch::P) {
                flags[i] = 1;
                ++p_count;
            }
            if (!std::isfinite(next[i]))
                throw Error(errc::divergence_detected,
                            fmt::format("non-finite value at step {} (t={})",
                                        traj.steps, t_next));
        }
        traj.p_counts.push_back(p_count);
        traj.interior_evals += grid.interior_count();
        ++traj.steps;
        cur.values.swap(next.values);
        t = t_next;
        rev_times.push_back(t);
        if (full) {
            rev_slices.push_back(cur);
            rev_flags.push_back(flags);
        }
    }

    if (!full) {
        traj.times = {0.0, config.horizon};
        traj.slices.push_back(std::move(cur));
        GridFunction terminal(grid);
        for (int i = 0; i < n; ++i)
            terminal[i] = config.g(config.horizon, grid.coord(i));
        traj.slices.push_back(std::move(terminal));
        traj.branch_p.push_back(flags);
        traj.branch_p.emplace_back(n, 0);
        std::reverse(traj.p_counts.begin(), traj.p_counts.end());
        return traj;
    }

    std::reverse(rev_times.begin(), rev_times.end());
    std::reverse(rev_slices.begin(), rev_slices.end());
    std::reverse(rev_flags.begin(), rev_flags.end());
    std::reverse(traj.p_counts.begin(), traj.p_counts.end());
    traj.times = std::move(rev_times);
    traj.slices = std::move(rev_slices);
    traj.branch_p = std::move(rev_flags);
    return traj;
}

double residual_sup(const Trajectory& traj, const SolveConfig& config) {
    if (traj.slices.size() != traj.times.size() ||
        static_cast<int>(traj.times.size()) != traj.steps + 1)
        throw Error(errc::insufficient_data, "residual needs a full trajectory");
    const Grid& grid = *config.grid;
    const int d = grid.dim();
    const int m = grid.stencil().size();
    std::vector<double> grad(d), z(m);
    double sup = 0.0;
    for (size_t i = 0; i + 1 < traj.times.size(); ++i) {
        double tau_i = traj.times[i + 1] - traj.times[i];
        const GridFunction& lo = traj.slices[i];
        const GridFunction& hi = traj.slices[i + 1];
        for (int node = 0; node < grid.node_count(); ++node) {
            if (!grid.is_interior(node)) continue;
            diff_vectors(hi, node, grad, z);
            ErsatzValue ev = ersatz_eval(config.op, hi[node], grad, z,
                                         traj.times[i + 1], grid.coord(node));
            sup = std::max(sup,
                           std::abs((hi[node] - lo[node]) / tau_i + ev.value));
        }
    }
    return sup;
}

GridFunction picard_final_interval(const Trajectory& traj, const SolveConfig& config,
                                   int iterations) {
    if (traj.slices.size() != traj.times.size() || traj.slices.size() < 2)
        throw Error(errc::insufficient_data, "Picard cross-check needs a full trajectory");
    const Grid& grid = *config.grid;
    const int d = grid.dim();
    const int m = grid.stencil().size();
    const double t0 = traj.times[0];
    const double dt = traj.times[1] - t0;
    const double t_mid = t0 + 0.5 * dt;
    const GridFunction& upper = traj.slices[1];

    GridFunction v = upper;
    GridFunction mid(grid);
    std::vector<double> grad(d), z(m);
    for (int it = 0; it < iterations; ++it) {
        for (int i = 0; i < grid.node_count(); ++i)
            mid[i] = 0.5 * (v[i] + upper[i]);
        GridFunction fresh(grid);
        for (int i = 0; i < grid.node_count(); ++i) {
            if (!grid.is_interior(i)) {
                fresh[i] = config.g(t0, grid.coord(i));
                continue;
            }
            diff_vectors(mid, i, grad, z);
            ErsatzValue ev =
                ersatz_eval(config.op, mid[i], grad, z, t_mid, grid.coord(i));
            fresh[i] = upper[i] + dt * ev.value;
        }
        v = std::move(fresh);
    }
    return v;
}

std::vector<KSweepEntry> k_sweep(const SolveConfig& config,
                                 const std::vector<double>& k_values,
                                 double tolerance, int threads) {
    if (k_values.empty()) throw Error(errc::invalid_spec, "K sweep needs K values");
    for (size_t i = 0; i < k_values.size(); ++i) {
        if (!(k_values[i] > 0.0))
            throw Error(errc::invalid_spec, "K values must be positive");
        if (i > 0 && !(k_values[i] > k_values[i - 1]))
            throw Error(errc::invalid_spec, "K values must be ascending");
    }
    SampleSpec spec;
    CheckReport mono =
        check_monotone_in_u0(config.op.ham, config.grid->dim(), spec);
    if (!mono.pass)
        throw Error(errc::monotonicity_check_failed,
                    "Hamiltonian is not nonincreasing in u0");

    std::vector<KSweepEntry> out(k_values.size());
    auto run = [&](size_t i) {
        SolveConfig c = config;
        c.op.params.big_k = k_values[i];
        out[i].k = k_values[i];
        out[i].traj = solve(c);
    };
    if (threads <= 1) {
        for (size_t i = 0; i < k_values.size(); ++i) run(i);
    } else {
        std::vector<std::future<void>> pending;
        for (size_t i = 0; i < k_values.size(); ++i) {
            pending.push_back(std::async(std::launch::async, run, i));
            if (static_cast<int>(pending.size()) >= threads) {
                pending.front().get();
                pending.erase(pending.begin());
            }
        }
        for (auto& f : pending) f.get();
    }

    for (size_t i = 1; i < out.size(); ++i) {
        const auto& prev = out[i - 1].traj;
        const auto& next = out[i].traj;
        double sup = 0.0, pos = 0.0;
        for (size_t s = 0; s < prev.slices.size(); ++s)
            for (size_t node = 0; node < prev.slices[s].values.size(); ++node) {
                double diff = next.slices[s][static_cast<int>(node)] -
                              prev.slices[s][static_cast<int>(node)];
                sup = std::max(sup, std::abs(diff));
                pos = std::max(pos, diff);
            }
        out[i].sup_diff_prev = sup;
        out[i].max_pos_increment = std::max(pos, 0.0);
        if (out[i].max_pos_increment > tolerance)
            throw Error(errc::monotonicity_check_failed,
                        fmt::format("positive increment {} between K={} and K={}",
                                    out[i].max_pos_increment, out[i - 1].k,
                                    out[i].k));
    }
    return out;
}

ConvergenceTable h_refine(
    const SolveConfig& config, const std::vector<double>& h_values,
    const std::function<void(double h, const Grid& grid, const Trajectory&)>&
        on_level,
    int threads) {
    (void)threads;
    if (h_values.size() < 2)
        throw Error(errc::invalid_spec, "refinement needs at least two spacings");
    for (size_t i = 1; i < h_values.size(); ++i)
        if (!(h_values[i] < h_values[i - 1]))
            throw Error(errc::invalid_spec, "spacings must be descending");
    for (size_t i = 1; i < h_values.size(); ++i) {
        double r = h_values[0] / h_values[i];
        if (std::abs(r - std::llround(r)) > 1e-9)
            throw Error(errc::incompatible_refinement,
                        "finer lattices must nest inside the coarsest one");
    }

    ConvergenceTable table;
    table.h = h_values;
    Grid coarse(config.grid->domain(), config.grid->stencil(), h_values[0]);
    std::vector<std::vector<double>> restricted;

    std::vector<int> fine_idx(coarse.dim());
    for (double h : h_values) {
        Grid grid(config.grid->domain(), config.grid->stencil(), h);
        SolveConfig c = config;
        c.grid = &grid;
        Trajectory traj = solve(c);
        long long ratio = std::llround(h_values[0] / h);
        std::vector<double> values(coarse.node_count());
        for (int node = 0; node < coarse.node_count(); ++node) {
            auto idx = coarse.index(node);
            for (int a = 0; a < coarse.dim(); ++a)
                fine_idx[a] = static_cast<int>(idx[a] * ratio);
            int fid = grid.node_at(fine_idx);
            if (fid < 0)
                throw Error(errc::incompatible_refinement,
                            "coarse node missing on the fine lattice");
            values[node] = traj.final_slice()[fid];
        }
        restricted.push_back(std::move(values));
        if (on_level) on_level(h, grid, traj);
    }

    for (size_t i = 0; i + 1 < restricted.size(); ++i) {
        double e = 0.0;
        for (size_t node = 0; node < restricted[i].size(); ++node)
            e = std::max(e, std::abs(restricted[i][node] - restricted[i + 1][node]));
        table.sup_diff.push_back(e);
    }
    for (size_t i = 0; i + 1 < table.sup_diff.size(); ++i)
        table.order.push_back(std::log2(table.sup_diff[i] /
                                        std::max(table.sup_diff[i + 1], 1e-300)));
    return table;
}

}  // namespace ersatz
