#include "ersatz/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>
#include <sstream>

namespace ersatz {

namespace {

std::string fmt(double v) { return ::fmt::format("{:.17g}", v); }

double node_distance(const Grid& grid, int a, int b) {
    auto xa = grid.coord(a);
    auto xb = grid.coord(b);
    double s = 0.0;
    for (int k = 0; k < grid.dim(); ++k) {
        double dk = std::abs(xa[k] - xb[k]);
        if (grid.domain().kind == Domain::Kind::Torus) {
            double p = grid.domain().period[k];
            dk = std::min(dk, p - dk);  // minimal image
        }
        s += dk * dk;
    }
    return std::sqrt(s);
}

}  // namespace

std::string EstimateReport::to_text() const {
    std::ostringstream os;
    if (boundary_wedge_constant)
        os << "boundary_wedge_constant " << fmt(*boundary_wedge_constant) << "\n";
    os << "time_diff_sup " << fmt(time_diff_sup) << "\n";
    os << "first_diff_sup " << fmt(first_diff_sup) << "\n";
    if (weighted_second_diff_sup)
        os << "weighted_second_diff_sup " << fmt(*weighted_second_diff_sup) << "\n";
    if (global_second_diff_sup)
        os << "global_second_diff_sup " << fmt(*global_second_diff_sup) << "\n";
    os << "lipschitz_modulus " << fmt(lipschitz_modulus) << "\n";
    os << "holder_alpha " << fmt(holder_alpha) << "\n";
    os << "holder_quotient " << fmt(holder_quotient) << "\n";
    os << "active_set_fraction " << fmt(active_set_fraction) << "\n";
    return os.str();
}

std::string EstimateReport::to_csv() const {
    std::ostringstream os;
    os << "field,value\r\n";
    auto row = [&](const char* name, double v) {
        os << name << "," << fmt(v) << "\r\n";
    };
    if (boundary_wedge_constant)
        row("boundary_wedge_constant", *boundary_wedge_constant);
    row("time_diff_sup", time_diff_sup);
    row("first_diff_sup", first_diff_sup);
    if (weighted_second_diff_sup)
        row("weighted_second_diff_sup", *weighted_second_diff_sup);
    if (global_second_diff_sup)
        row("global_second_diff_sup", *global_second_diff_sup);
    row("lipschitz_modulus", lipschitz_modulus);
    row("holder_alpha", holder_alpha);
    row("holder_quotient", holder_quotient);
    row("active_set_fraction", active_set_fraction);
    return os.str();
}

EstimateReport measure(const Trajectory& traj, const SolveConfig& config,
                       const MeasureOptions& options) {
    if (traj.slices.size() != traj.times.size() ||
        static_cast<int>(traj.times.size()) != traj.steps + 1)
        throw Error(errc::insufficient_data, "measure needs a full trajectory");
    const Grid& grid = *config.grid;
    const bool torus = grid.domain().kind == Domain::Kind::Torus;
    const int n = grid.node_count();
    const int m = grid.stencil().size();
    const int d = grid.dim();
    const double h = grid.h();
    const double lam = grid.stencil().radius;

    EstimateReport rep;
    rep.holder_alpha = options.holder_alpha;
    if (!torus) {
        rep.boundary_wedge_constant = 0.0;
        rep.weighted_second_diff_sup = 0.0;
    } else {
        rep.global_second_diff_sup = 0.0;
    }

    std::vector<double> grad(d), z(m);
    for (size_t s = 0; s < traj.slices.size(); ++s) {
        const GridFunction& v = traj.slices[s];
        const double t = traj.times[s];
        for (int i = 0; i < n; ++i) {
            if (!torus && grid.rho(i) > 0.0) {
                double gv = config.g(t, grid.coord(i));
                rep.boundary_wedge_constant =
                    std::max(*rep.boundary_wedge_constant,
                             std::abs(v[i] - gv) / grid.rho(i));
            }
            if (!grid.is_interior(i)) continue;
            double sum_first = 0.0, sum_second = 0.0, max_second = 0.0;
            for (int k = 0; k < m; ++k) {
                sum_first += std::abs(first_diff(v, k, i));
                double dd = std::abs(second_diff(v, k, i));
                sum_second += dd;
                max_second = std::max(max_second, dd);
            }
            rep.first_diff_sup = std::max(rep.first_diff_sup, sum_first);
            if (torus) {
                rep.global_second_diff_sup =
                    std::max(*rep.global_second_diff_sup, sum_second);
            } else {
                double w = std::max(grid.rho(i) - 6.0 * lam * h, 0.0);
                rep.weighted_second_diff_sup =
                    std::max(*rep.weighted_second_diff_sup, w * max_second);
            }
        }
        if (s + 1 < traj.slices.size()) {
            double tau = traj.times[s + 1] - traj.times[s];
            const GridFunction& w = traj.slices[s + 1];
            for (int i = 0; i < n; ++i)
                rep.time_diff_sup =
                    std::max(rep.time_diff_sup, std::abs(w[i] - v[i]) / tau);
        }
    }

    // Seeded pair sample for the modulus fields.
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> node_pick(0, n - 1);
    std::uniform_int_distribution<size_t> slice_pick(0, traj.slices.size() - 1);
    const std::int64_t pairs = std::min<std::int64_t>(
        options.sample_pairs,
        static_cast<std::int64_t>(traj.slices.size()) * n * 4);
    const double alpha = options.holder_alpha;
    for (std::int64_t p = 0; p < pairs; ++p) {
        size_t s1 = slice_pick(rng), s2 = slice_pick(rng);
        int n1 = node_pick(rng), n2 = node_pick(rng);
        double dist = node_distance(grid, n1, n2);
        double dv = std::abs(traj.slices[s1][n1] - traj.slices[s2][n2]);
        if (s1 == s2 && n1 != n2)
            rep.lipschitz_modulus =
                std::max(rep.lipschitz_modulus, dv / (dist + h));
        double dt = std::abs(traj.times[s1] - traj.times[s2]);
        double denom = std::pow(dt, alpha / 2.0) + std::pow(dist, alpha);
        if (denom > 0.0)
            rep.holder_quotient = std::max(rep.holder_quotient, dv / denom);
    }

    rep.active_set_fraction = traj.active_set_fraction();
    return rep;
}

InterpolationCheck interpolation_inequality_check(std::span<const double> w, int r) {
    if (r < 2) throw Error(errc::invalid_range, "interpolation check needs r >= 2");
    if (static_cast<int>(w.size()) < 2 * r + 3)
        throw Error(errc::invalid_range, "sequence must cover -r-1..r+1");
    auto at = [&](int i) { return w[static_cast<size_t>(i + r + 1)]; };
    double max_second = 0.0, max_abs = 0.0;
    for (int i = -r; i <= r; ++i) {
        max_second = std::max(max_second,
                              std::abs(at(i + 1) - 2.0 * at(i) + at(i - 1)));
        max_abs = std::max(max_abs, std::abs(at(i)));
    }
    InterpolationCheck out;
    out.lhs = std::abs(at(1) - at(0));
    out.rhs = 0.5 * r * max_second + 4.0 / r * max_abs;
    out.pass = out.lhs <= out.rhs + 1e-12;
    return out;
}

MaxPrincipleResult max_principle_check(const MaxPrincipleSpec& spec) {
    if (!spec.grid || !spec.eta || !spec.data || !(spec.horizon > 0.0))
        throw Error(errc::invalid_spec, "max principle check needs grid, eta, data, T");
    const Grid& grid = *spec.grid;
    const int m = grid.stencil().size();
    const int d = grid.dim();
    const double h = grid.h();
    if (static_cast<int>(spec.a.size()) != m || static_cast<int>(spec.b.size()) != d)
        throw Error(errc::dimension_mismatch, "coefficient sizes must match the stencil");
    for (double ak : spec.a)
        if (ak < 0.0)
            throw Error(errc::coefficient_conditions_violated, "a_k must be >= 0");
    for (int k = 0; k < d; ++k)
        if (h * std::max(-spec.b[k], 0.0) > spec.a[k] + 1e-15)
            throw Error(errc::coefficient_conditions_violated,
                        "h b_k^- <= a_k is required");
    if (spec.c < 0.0)
        throw Error(errc::coefficient_conditions_violated, "c must be >= 0");
    if (grid.interior_count() == 0)
        throw Error(errc::grid_too_coarse, "no interior nodes at this spacing");

    double sum_a = 0.0, sum_b = 0.0;
    for (double ak : spec.a) sum_a += ak;
    for (double bk : spec.b) sum_b += std::abs(bk);
    double denom = 2.0 * sum_a / (h * h) + sum_b / h + spec.c;
    double tau = denom > 0.0 ? 0.9 / denom : spec.horizon;

    const int n = grid.node_count();
    GridFunction cur(grid);
    double sup_eta_pos = 0.0, sup_boundary_pos = 0.0, sup_v = 0.0;
    int arg_v = -1;
    for (int i = 0; i < n; ++i) {
        cur[i] = spec.data(spec.horizon, grid.coord(i));
        sup_boundary_pos = std::max(sup_boundary_pos, cur[i]);
    }

    GridFunction next(grid);
    double t = spec.horizon;
    while (t > 0.0) {
        double dt = std::min(tau, t);
        double t_next = t - dt;
        if (t_next < 1e-15) t_next = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!grid.is_interior(i)) {
                next[i] = spec.data(t_next, grid.coord(i));
                sup_boundary_pos = std::max(sup_boundary_pos, next[i]);
                continue;
            }
            double lv = 0.0;
            for (int k = 0; k < m; ++k) lv += spec.a[k] * second_diff(cur, k, i);
            for (int k = 0; k < d; ++k) lv += spec.b[k] * first_diff(cur, k, i);
            lv -= spec.c * cur[i];
            double eta = spec.eta(t, grid.coord(i));
            sup_eta_pos = std::max(sup_eta_pos, eta);
            next[i] = cur[i] + dt * (lv + eta);
            if (next[i] > sup_v) {
                sup_v = next[i];
                arg_v = i;
            }
        }
        cur.values.swap(next.values);
        t = t_next;
    }

    MaxPrincipleResult out;
    out.sup_v = sup_v;
    out.bound = spec.horizon * sup_eta_pos + sup_boundary_pos;
    out.pass = sup_v <= out.bound + 1e-12;
    out.violating_node = out.pass ? -1 : arg_v;
    return out;
}

BoundednessTable refinement_boundedness(const std::vector<EstimateReport>& reports,
                                        double factor) {
    BoundednessTable table;
    auto add = [&](const std::string& name, auto getter) {
        std::vector<double> vals;
        for (const auto& r : reports) {
            auto v = getter(r);
            if (!v) return;  // field absent at some level; skip
            vals.push_back(*v);
        }
        bool flag = false;
        for (size_t i = 1; i < vals.size(); ++i)
            if (vals[i] > factor * std::max(vals[i - 1], 1e-300) &&
                vals[i] > 1e-12)
                flag = true;
        table.fields.push_back(name);
        table.values.push_back(std::move(vals));
        table.flagged.push_back(flag);
    };
    using R = const EstimateReport&;
    add("boundary_wedge_constant",
        [](R r) { return r.boundary_wedge_constant; });
    add("time_diff_sup",
        [](R r) { return std::optional<double>(r.time_diff_sup); });
    add("first_diff_sup",
        [](R r) { return std::optional<double>(r.first_diff_sup); });
    add("weighted_second_diff_sup",
        [](R r) { return r.weighted_second_diff_sup; });
    add("global_second_diff_sup",
        [](R r) { return r.global_second_diff_sup; });
    add("lipschitz_modulus",
        [](R r) { return std::optional<double>(r.lipschitz_modulus); });
    add("holder_quotient",
        [](R r) { return std::optional<double>(r.holder_quotient); });
    return table;
}

}  // namespace ersatz
