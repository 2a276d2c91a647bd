#include "ersatz/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <ostream>
#include <sstream>

#include "ersatz/estimates.hpp"
#include "ersatz/output.hpp"

namespace ersatz {

namespace {

std::string fmt(double v) { return ::fmt::format("{:.17g}", v); }

int exit_code_for(const Error& e) {
    return e.code() == errc::divergence_detected ? kExitNumerical
                                                 : kExitValidation;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return kExitValidation;
    }
}

struct LoadedRun {
    ExperimentConfig cfg;
    double h = 0.0;
    double big_k = 0.0;
};

LoadedRun load_run(const DriverOptions& opt) {
    LoadedRun run;
    run.cfg = ExperimentConfig::load(opt.config_path);
    if (opt.seed) run.cfg.seed = *opt.seed;
    run.h = run.cfg.h_list.front();
    run.big_k = run.cfg.k_list.front();
    return run;
}

RunManifest make_manifest(const std::string& command, const LoadedRun& run,
                          double wall_seconds) {
    RunManifest m;
    m.command = command;
    m.config_hash = run.cfg.hash();
    m.tool_version = kToolVersion;
    m.seed = run.cfg.seed;
    m.h = run.h;
    m.big_k = run.big_k;
    m.wall_seconds = wall_seconds;
    return m;
}

double wall_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("ERSATZ_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

int cmd_solve(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        auto t0 = std::chrono::steady_clock::now();
        LoadedRun run = load_run(opt);
        BuiltProblem problem = build_problem(run.cfg, run.h, run.big_k);
        Trajectory traj = solve(problem.config);

        OutputBundle bundle;
        bundle.add("slice.csv", slice_csv(*problem.grid, traj));

        std::ostringstream rep;
        rep << "h " << fmt(run.h) << "\n";
        rep << "K " << fmt(run.big_k) << "\n";
        rep << "hat_delta " << fmt(problem.hat_delta_used) << "\n";
        rep << "tau " << fmt(traj.tau) << "\n";
        rep << "steps " << traj.steps << "\n";
        rep << "active_set_fraction " << fmt(traj.active_set_fraction()) << "\n";
        if (problem.config.store == StorePolicy::Full) {
            MeasureOptions mopt;
            mopt.holder_alpha = run.cfg.holder_alpha;
            mopt.seed = run.cfg.seed;
            EstimateReport estimates = measure(traj, problem.config, mopt);
            rep << "residual_sup " << fmt(residual_sup(traj, problem.config))
                << "\n";
            rep << estimates.to_text();
            bundle.add("estimates.csv", estimates.to_csv());
        }
        bundle.add("report.txt", rep.str());
        bundle.add("manifest.txt",
                   make_manifest("solve", run, wall_since(t0)).to_text());
        bundle.write_all(opt.out_dir);
        out << "solve: " << traj.steps << " steps, tau " << fmt(traj.tau)
            << ", outputs in " << opt.out_dir << "\n";
        return kExitOk;
    });
}

int cmd_sweep_k(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        auto t0 = std::chrono::steady_clock::now();
        LoadedRun run = load_run(opt);
        BuiltProblem problem = build_problem(run.cfg, run.h, run.big_k);
        auto entries = k_sweep(problem.config, run.cfg.k_list, 1e-9,
                               resolve_threads(opt.threads));

        OutputBundle bundle;
        bundle.add("sweep.csv", sweep_csv(entries));

        std::ostringstream rep;
        rep << "h " << fmt(run.h) << "\n";
        rep << "levels " << entries.size() << "\n";
        rep << "final_cauchy_increment "
            << fmt(entries.back().sup_diff_prev) << "\n";
        rep << "final_active_set_fraction "
            << fmt(entries.back().traj.active_set_fraction()) << "\n";
        bundle.add("report.txt", rep.str());
        bundle.add("manifest.txt",
                   make_manifest("sweep-k", run, wall_since(t0)).to_text());
        bundle.write_all(opt.out_dir);
        out << "sweep-k: " << entries.size() << " levels, final increment "
            << fmt(entries.back().sup_diff_prev) << "\n";
        return kExitOk;
    });
}

int cmd_refine_h(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        auto t0 = std::chrono::steady_clock::now();
        LoadedRun run = load_run(opt);
        BuiltProblem problem = build_problem(run.cfg, run.h, run.big_k);

        std::vector<EstimateReport> reports;
        MeasureOptions mopt;
        mopt.holder_alpha = run.cfg.holder_alpha;
        mopt.seed = run.cfg.seed;
        auto on_level = [&](double, const Grid& grid, const Trajectory& traj) {
            if (problem.config.store != StorePolicy::Full) return;
            SolveConfig level = problem.config;
            level.grid = &grid;
            reports.push_back(measure(traj, level, mopt));
        };
        ConvergenceTable table =
            h_refine(problem.config, run.cfg.h_list, on_level,
                     resolve_threads(opt.threads));

        OutputBundle bundle;
        bundle.add("convergence.csv", convergence_csv(table));

        std::ostringstream rep;
        rep << "K " << fmt(run.big_k) << "\n";
        rep << "levels " << table.h.size() << "\n";
        if (!table.sup_diff.empty())
            rep << "final_sup_diff " << fmt(table.sup_diff.back()) << "\n";
        if (!reports.empty()) {
            BoundednessTable bounded = refinement_boundedness(reports);
            for (size_t f = 0; f < bounded.fields.size(); ++f) {
                rep << bounded.fields[f];
                for (double v : bounded.values[f]) rep << " " << fmt(v);
                rep << (bounded.flagged[f] ? " GROWING" : " bounded") << "\n";
            }
        }
        bundle.add("report.txt", rep.str());
        bundle.add("manifest.txt",
                   make_manifest("refine-h", run, wall_since(t0)).to_text());
        bundle.write_all(opt.out_dir);
        out << "refine-h: " << table.h.size() << " levels\n";
        return kExitOk;
    });
}

int cmd_verify(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        auto t0 = std::chrono::steady_clock::now();
        LoadedRun run = load_run(opt);
        BuiltProblem problem = build_problem(run.cfg, run.h, run.big_k);
        const ErsatzOperator& op = problem.config.op;
        const int d = problem.grid->dim();

        SampleSpec spec;
        spec.seed = run.cfg.seed;
        CheckReport window =
            check_stencil_ellipticity(op.ham, d, op.params.hat_delta, spec);
        if (!window.pass)
            throw Error(errc::ellipticity_violation,
                        window.violations.empty() ? "slope outside the window"
                                                  : window.violations.front());
        CheckReport mono = check_monotone_in_u0(op.ham, d, spec);
        if (!mono.pass)
            throw Error(errc::monotonicity_check_failed,
                        mono.violations.empty() ? "increasing in u0"
                                                : mono.violations.front());
        double h_bar = check_growth_bound(op.ham, d, op.params.k0, spec);

        Trajectory traj = solve(problem.config);
        std::ostringstream rep;
        rep << "window_check pass\n";
        rep << "window_slopes " << fmt(window.min_observed) << " "
            << fmt(window.max_observed) << "\n";
        rep << "u0_monotonicity pass\n";
        rep << "growth_bound " << fmt(h_bar) << "\n";

        bool all_pass = true;
        if (problem.config.store == StorePolicy::Full) {
            double res = residual_sup(traj, problem.config);
            rep << "residual_sup " << fmt(res) << "\n";

            GridFunction picard = picard_final_interval(traj, problem.config);
            double pdiff = 0.0;
            for (int i = 0; i < problem.grid->node_count(); ++i)
                pdiff = std::max(pdiff,
                                 std::abs(picard[i] - traj.final_slice()[i]));
            rep << "picard_cross_check " << fmt(pdiff) << "\n";

            // sup |v| against the growth/cutoff a priori bound.
            double sup_v = 0.0, sup_g = 0.0;
            for (size_t s = 0; s < traj.slices.size(); ++s)
                for (int i = 0; i < problem.grid->node_count(); ++i) {
                    sup_v = std::max(sup_v, std::abs(traj.slices[s][i]));
                    sup_g = std::max(
                        sup_g, std::abs(problem.config.g(
                                   traj.times[s], problem.grid->coord(i))));
                }
            double bound =
                std::exp(op.ham.bounds.u0 * problem.config.horizon) *
                (problem.config.horizon * (h_bar + op.params.big_k) + sup_g);
            bool sup_ok = sup_v <= bound + 1e-9;
            rep << "sup_norm " << fmt(sup_v) << "\n";
            rep << "sup_norm_bound " << fmt(bound) << " "
                << (sup_ok ? "pass" : "FAIL") << "\n";
            all_pass = all_pass && sup_ok;

            MeasureOptions mopt;
            mopt.holder_alpha = run.cfg.holder_alpha;
            mopt.seed = run.cfg.seed;
            rep << measure(traj, problem.config, mopt).to_text();
        }

        OutputBundle bundle;
        bundle.add("verify.txt", rep.str());
        bundle.add("manifest.txt",
                   make_manifest("verify", run, wall_since(t0)).to_text());
        bundle.write_all(opt.out_dir);
        out << rep.str();
        if (!all_pass) {
            err << "error: " << errc::invalid_spec
                << ": a verification inequality failed\n";
            return kExitValidation;
        }
        return kExitOk;
    });
}

int cmd_decompose(const std::vector<double>& entries, double delta,
                  double hat_delta, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        double root = std::sqrt(static_cast<double>(entries.size()));
        int d = static_cast<int>(std::llround(root));
        if (static_cast<size_t>(d) * d != entries.size())
            throw Error(errc::invalid_dimension,
                        "matrix entries must form a square matrix");
        SymMatrix a(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                a.set(i, j, 0.5 * (entries[i * d + j] + entries[j * d + i]));
        if (!check_s_delta(a, delta / 4.0))
            err << "note: matrix is outside the delta/4 ellipticity class\n";

        StencilSet stencil = build_standard_stencil(d);
        std::vector<double> lambda = decompose_matrix(a, stencil, hat_delta);

        double residual = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < stencil.size(); ++k)
                    s += lambda[k] * stencil.vectors[k][i] * stencil.vectors[k][j];
                residual = std::max(residual, std::abs(s - a(i, j)));
            }

        out << "lambda";
        for (double l : lambda) out << " " << fmt(l);
        out << "\n";
        out << "residual " << fmt(residual) << "\n";
        return kExitOk;
    });
}

}  // namespace ersatz
