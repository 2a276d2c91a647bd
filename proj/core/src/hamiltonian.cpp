#include "ersatz/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace ersatz {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double row_value(const BellmanRow& row, double u0, std::span<const double> grad,
                 std::span<const double> z) {
    return dot(row.a, z) + dot(row.b, grad) + row.c * u0 + row.f;
}

void accumulate_row_bounds(const BellmanRow& row, HamBounds& b, HamFlags& f) {
    for (double ak : row.a) {
        b.z_lo = std::min(b.z_lo, ak);
        b.z_hi = std::max(b.z_hi, ak);
    }
    for (double bk : row.b) b.grad = std::max(b.grad, std::abs(bk));
    b.u0 = std::max(b.u0, std::abs(row.c));
    if (row.c != 0.0) f.independent_of_u0 = false;
    if (row.c > 0.0) f.nonincreasing_in_u0 = false;
}

}  // namespace

StencilHamiltonian make_linear(std::vector<double> nu, std::vector<double> drift,
                               double zeroth, SourceFn source,
                               std::optional<std::pair<double, double>> strict_window) {
    if (strict_window) {
        for (double v : nu)
            if (v < strict_window->first || v > strict_window->second)
                throw Error(errc::ellipticity_violation,
                            fmt::format("weight {} outside window [{}, {}]", v,
                                        strict_window->first, strict_window->second));
    }
    StencilHamiltonian h;
    h.bounds.z_lo = nu.empty() ? 0.0 : *std::min_element(nu.begin(), nu.end());
    h.bounds.z_hi = nu.empty() ? 0.0 : *std::max_element(nu.begin(), nu.end());
    for (double bk : drift) h.bounds.grad = std::max(h.bounds.grad, std::abs(bk));
    h.bounds.u0 = std::abs(zeroth);
    h.flags.independent_of_u0 = zeroth == 0.0;
    h.flags.nonincreasing_in_u0 = zeroth <= 0.0;
    h.flags.time_dependent = static_cast<bool>(source);
    h.eval = [nu = std::move(nu), drift = std::move(drift), zeroth,
              source = std::move(source)](double u0, std::span<const double> grad,
                                          std::span<const double> z, double t,
                                          std::span<const double> x) {
        double s = dot(nu, z) + dot(drift, grad) + zeroth * u0;
        if (source) s += source(t, x);
        return s;
    };
    return h;
}

StencilHamiltonian make_bellman(std::vector<BellmanRow> rows) {
    if (rows.empty()) throw Error(errc::invalid_spec, "Bellman table is empty");
    StencilHamiltonian h;
    h.bounds.z_lo = std::numeric_limits<double>::infinity();
    h.bounds.z_hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) accumulate_row_bounds(r, h.bounds, h.flags);
    h.eval = [rows = std::move(rows)](double u0, std::span<const double> grad,
                                      std::span<const double> z, double,
                                      std::span<const double>) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& r : rows) best = std::max(best, row_value(r, u0, grad, z));
        return best;
    };
    return h;
}

StencilHamiltonian make_isaacs(std::vector<std::vector<BellmanRow>> groups) {
    if (groups.empty()) throw Error(errc::invalid_spec, "Isaacs table is empty");
    for (const auto& g : groups)
        if (g.empty()) throw Error(errc::invalid_spec, "Isaacs group is empty");
    StencilHamiltonian h;
    h.bounds.z_lo = std::numeric_limits<double>::infinity();
    h.bounds.z_hi = -std::numeric_limits<double>::infinity();
    for (const auto& g : groups)
        for (const auto& r : g) accumulate_row_bounds(r, h.bounds, h.flags);
    h.eval = [groups = std::move(groups)](double u0, std::span<const double> grad,
                                          std::span<const double> z, double,
                                          std::span<const double>) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& g : groups) {
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& r : g) worst = std::min(worst, row_value(r, u0, grad, z));
            best = std::max(best, worst);
        }
        return best;
    };
    return h;
}

StencilHamiltonian from_diffusion(DiffusionField a_field, LowerOrderFn lower_order,
                                  StencilSet stencil, double hat_delta) {
    if (!a_field) throw Error(errc::invalid_spec, "diffusion field is required");
    struct Cache {
        std::shared_mutex mutex;
        std::map<std::vector<double>, std::vector<double>> entries;
    };
    auto cache = std::make_shared<Cache>();

    StencilHamiltonian h;
    h.bounds.z_lo = hat_delta;
    h.bounds.z_hi = 1.0 / hat_delta;
    // Lower-order bounds are the caller's responsibility; defaults assume
    // a pure second-order operator.
    h.flags.time_dependent = true;
    h.eval = [a_field = std::move(a_field), lower_order = std::move(lower_order),
              stencil = std::move(stencil), hat_delta, cache](
                 double u0, std::span<const double> grad, std::span<const double> z,
                 double t, std::span<const double> x) {
        SymMatrix a = a_field(t, x, u0, grad);
        std::vector<double> key(a.upper().begin(), a.upper().end());
        const std::vector<double>* lam = nullptr;
        {
            std::shared_lock lock(cache->mutex);
            auto it = cache->entries.find(key);
            if (it != cache->entries.end()) lam = &it->second;
        }
        if (!lam) {
            auto fresh = decompose_matrix(a, stencil, hat_delta);
            std::unique_lock lock(cache->mutex);
            lam = &cache->entries.emplace(std::move(key), std::move(fresh))
                       .first->second;
        }
        double s = 0.0;
        for (size_t k = 0; k < lam->size(); ++k) s += (*lam)[k] * z[k];
        if (lower_order) s += lower_order(u0, grad, t, x);
        return s;
    };
    return h;
}

ErsatzValue ersatz_eval(const ErsatzOperator& op, double u0,
                        std::span<const double> grad, std::span<const double> z,
                        double t, std::span<const double> x) {
    double hv = op.ham.eval(u0, grad, z, t, x);
    double pv = eval_script_p(z, op.params.hat_delta) - op.params.big_k;
    // Ties resolve to H so the active-set diagnostic counts strict
    // activations only.
    if (pv > hv) return {pv, Branch::P};
    return {hv, Branch::H};
}

namespace {

struct SamplePoint {
    double u0;
    std::vector<double> grad, z, x;
    double t;
};

SamplePoint draw(std::mt19937_64& rng, int d, int m, const SampleSpec& spec) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SamplePoint p;
    p.u0 = unif(rng) * spec.u0_range;
    p.grad.resize(d);
    for (auto& v : p.grad) v = unif(rng) * spec.grad_range;
    p.z.resize(m);
    for (auto& v : p.z) v = unif(rng) * spec.z_range;
    p.x.resize(d);
    for (auto& v : p.x) v = unif(rng) * spec.x_range;
    p.t = 0.5 * (unif(rng) + 1.0) * spec.t_range;
    return p;
}

}  // namespace

CheckReport check_stencil_ellipticity(const StencilHamiltonian& ham, int dim,
                                      double hat_delta, const SampleSpec& spec) {
    const int m = dim == 1 ? 1 : dim * dim;
    const double tol = 1e-7;
    const double lo = hat_delta, hi = 1.0 / hat_delta;
    CheckReport report;
    report.min_observed = std::numeric_limits<double>::infinity();
    report.max_observed = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(spec.seed);
    for (int i = 0; i < spec.count; ++i) {
        SamplePoint p = draw(rng, dim, m, spec);
        double base = ham.eval(p.u0, p.grad, p.z, p.t, p.x);
        for (int k = 0; k < m; ++k) {
            p.z[k] += spec.eps;
            double slope = (ham.eval(p.u0, p.grad, p.z, p.t, p.x) - base) / spec.eps;
            p.z[k] -= spec.eps;
            report.min_observed = std::min(report.min_observed, slope);
            report.max_observed = std::max(report.max_observed, slope);
            if (slope < lo - tol || slope > hi + tol) {
                report.pass = false;
                if (report.violations.size() < 16)
                    report.violations.push_back(fmt::format(
                        "slope {} in z[{}] outside [{}, {}] at sample {}", slope, k,
                        lo, hi, i));
            }
        }
    }
    return report;
}

CheckReport check_monotone_in_u0(const StencilHamiltonian& ham, int dim,
                                 const SampleSpec& spec) {
    const int m = dim == 1 ? 1 : dim * dim;
    CheckReport report;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < spec.count; ++i) {
        SamplePoint p = draw(rng, dim, m, spec);
        double bump = unif(rng) * spec.u0_range + 1e-9;
        double lo_val = ham.eval(p.u0, p.grad, p.z, p.t, p.x);
        double hi_val = ham.eval(p.u0 + bump, p.grad, p.z, p.t, p.x);
        double diff = hi_val - lo_val;
        report.max_observed = std::max(report.max_observed, diff);
        if (diff > 1e-12) {
            report.pass = false;
            if (report.violations.size() < 16)
                report.violations.push_back(fmt::format(
                    "value increased by {} between u0={} and u0={}", diff, p.u0,
                    p.u0 + bump));
        }
    }
    return report;
}

double check_growth_bound(const StencilHamiltonian& ham, int dim, double k0,
                          const SampleSpec& spec) {
    const int m = dim == 1 ? 1 : dim * dim;
    std::mt19937_64 rng(spec.seed);
    double sup = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.count; ++i) {
        SamplePoint p = draw(rng, dim, m, spec);
        std::fill(p.z.begin(), p.z.end(), 0.0);
        double gnorm = 0.0;
        for (double g : p.grad) gnorm += g * g;
        double val = std::abs(ham.eval(p.u0, p.grad, p.z, p.t, p.x)) -
                     k0 * (std::abs(p.u0) + std::sqrt(gnorm));
        sup = std::max(sup, val);
    }
    return sup;
}

}  // namespace ersatz
