#include "ersatz/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ersatz {

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.empty() || lower.size() != upper.size())
        throw Error(errc::invalid_spec, "box needs matching per-axis bounds");
    for (size_t k = 0; k < lower.size(); ++k)
        if (!(upper[k] > lower[k]))
            throw Error(errc::invalid_spec, "box extent must be positive");
    Domain d;
    d.kind = Kind::Box;
    d.dim = static_cast<int>(lower.size());
    d.lower = std::move(lower);
    d.upper = std::move(upper);
    return d;
}

Domain Domain::ball(std::vector<double> center, double radius) {
    if (center.empty())
        throw Error(errc::invalid_spec, "ball needs a center");
    if (!(radius > 0.0))
        throw Error(errc::invalid_spec, "ball radius must be positive");
    Domain d;
    d.kind = Kind::Ball;
    d.dim = static_cast<int>(center.size());
    d.center = std::move(center);
    d.radius = radius;
    return d;
}

Domain Domain::torus(std::vector<double> period) {
    if (period.empty())
        throw Error(errc::invalid_spec, "torus needs per-axis periods");
    for (double p : period)
        if (!(p > 0.0))
            throw Error(errc::invalid_spec, "torus period must be positive");
    Domain d;
    d.kind = Kind::Torus;
    d.dim = static_cast<int>(period.size());
    d.period = std::move(period);
    return d;
}

Grid::Grid(Domain domain, StencilSet stencil, double h)
    : domain_(std::move(domain)), stencil_(std::move(stencil)), h_(h) {
    if (!(h > 0.0)) throw Error(errc::invalid_spec, "grid spacing must be positive");
    if (stencil_.dim != domain_.dim)
        throw Error(errc::dimension_mismatch, "stencil and domain dimension differ");
    const int d = domain_.dim;

    lo_idx_.assign(d, 0);
    hi_idx_.assign(d, 0);
    torus_n_.assign(d, 0);
    switch (domain_.kind) {
        case Domain::Kind::Box:
            for (int k = 0; k < d; ++k) {
                lo_idx_[k] = static_cast<int>(std::ceil(domain_.lower[k] / h_ - 1e-9));
                hi_idx_[k] = static_cast<int>(std::floor(domain_.upper[k] / h_ + 1e-9));
            }
            break;
        case Domain::Kind::Ball:
            for (int k = 0; k < d; ++k) {
                lo_idx_[k] = static_cast<int>(
                    std::ceil((domain_.center[k] - domain_.radius) / h_ - 1e-9));
                hi_idx_[k] = static_cast<int>(
                    std::floor((domain_.center[k] + domain_.radius) / h_ + 1e-9));
            }
            break;
        case Domain::Kind::Torus:
            for (int k = 0; k < d; ++k) {
                double n = domain_.period[k] / h_;
                int ni = static_cast<int>(std::llround(n));
                if (ni < 1 || std::abs(n - ni) > 1e-9 * std::max(1.0, n))
                    throw Error(errc::invalid_spec,
                                "spacing must divide the torus period");
                torus_n_[k] = ni;
                lo_idx_[k] = 0;
                hi_idx_[k] = ni - 1;
            }
            break;
    }
    for (int k = 0; k < d; ++k)
        if (hi_idx_[k] < lo_idx_[k])
            throw Error(errc::grid_too_coarse, "no lattice points in the domain");

    strides_.assign(d, 1);
    std::int64_t total = 1;
    for (int k = d - 1; k >= 0; --k) {
        strides_[k] = total;
        total *= hi_idx_[k] - lo_idx_[k] + 1;
    }
    id_table_.assign(static_cast<size_t>(total), -1);

    // Enumerate lattice points in row-major index order.
    std::vector<int> idx(lo_idx_);
    const double ball_r2 = domain_.radius * domain_.radius * (1.0 + 1e-12);
    while (true) {
        bool member = true;
        if (domain_.kind == Domain::Kind::Ball) {
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                double dk = idx[k] * h_ - domain_.center[k];
                r2 += dk * dk;
            }
            member = r2 <= ball_r2;
        }
        if (member) {
            std::int64_t flat = 0;
            for (int k = 0; k < d; ++k)
                flat += (idx[k] - lo_idx_[k]) * strides_[k];
            id_table_[flat] = node_count();
            for (int k = 0; k < d; ++k) {
                indices_.push_back(idx[k]);
                coords_.push_back(idx[k] * h_);
            }
        }
        int k = d - 1;
        while (k >= 0 && idx[k] == hi_idx_[k]) idx[k--] = lo_idx_[k];
        if (k < 0) break;
        ++idx[k];
    }
    if (node_count() == 0)
        throw Error(errc::grid_too_coarse, "no lattice points in the domain");

    classify();
}

void Grid::classify() {
    const int d = dim();
    const int n = node_count();
    const int m = stencil_.size();

    rho_.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        auto x = coord(i);
        switch (domain_.kind) {
            case Domain::Kind::Box: {
                double r = std::numeric_limits<double>::infinity();
                for (int k = 0; k < d; ++k)
                    r = std::min({r, x[k] - domain_.lower[k], domain_.upper[k] - x[k]});
                rho_[i] = std::max(r, 0.0);
                break;
            }
            case Domain::Kind::Ball: {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    double dk = x[k] - domain_.center[k];
                    r2 += dk * dk;
                }
                rho_[i] = std::max(domain_.radius - std::sqrt(r2), 0.0);
                break;
            }
            case Domain::Kind::Torus:
                rho_[i] = std::numeric_limits<double>::infinity();
                break;
        }
    }

    neighbors_.assign(static_cast<size_t>(n) * m * 2, -1);
    std::vector<int> idx(d);
    for (int i = 0; i < n; ++i) {
        auto base = index(i);
        for (int k = 0; k < m; ++k)
            for (int s = 0; s < 2; ++s) {
                int sign = s == 0 ? 1 : -1;
                for (int a = 0; a < d; ++a)
                    idx[a] = base[a] + sign * stencil_.vectors[k][a];
                neighbors_[(static_cast<size_t>(i) * m + k) * 2 + s] =
                    node_at(idx);
            }
    }

    interior_.assign(n, 0);
    interior_count_ = 0;
    const double lam_h = stencil_.radius * h_;
    for (int i = 0; i < n; ++i) {
        bool in = domain_.kind == Domain::Kind::Torus || rho_[i] > lam_h;
        if (in)
            for (int k = 0; k < m && in; ++k)
                in = neighbor(i, k, +1) >= 0 && neighbor(i, k, -1) >= 0;
        interior_[i] = in ? 1 : 0;
        interior_count_ += in;
    }
}

int Grid::node_at(std::span<const int> idx) const {
    const int d = dim();
    std::int64_t flat = 0;
    for (int k = 0; k < d; ++k) {
        int v = idx[k];
        if (domain_.kind == Domain::Kind::Torus) {
            v %= torus_n_[k];
            if (v < 0) v += torus_n_[k];
        } else if (v < lo_idx_[k] || v > hi_idx_[k]) {
            return -1;
        }
        flat += (v - lo_idx_[k]) * strides_[k];
    }
    return id_table_[flat];
}

double first_diff(const GridFunction& f, int k, int node) {
    const Grid& g = *f.grid;
    int nb = g.neighbor(node, k, +1);
    if (nb < 0)
        throw Error(errc::stencil_out_of_domain, "missing forward neighbor");
    return (f[nb] - f[node]) / g.h();
}

double second_diff(const GridFunction& f, int k, int node) {
    const Grid& g = *f.grid;
    int np = g.neighbor(node, k, +1);
    int nm = g.neighbor(node, k, -1);
    if (np < 0 || nm < 0)
        throw Error(errc::stencil_out_of_domain, "missing stencil neighbor");
    return (f[np] - 2.0 * f[node] + f[nm]) / (g.h() * g.h());
}

void diff_vectors(const GridFunction& f, int node, std::span<double> grad,
                  std::span<double> z) {
    const Grid& g = *f.grid;
    const int d = g.dim();
    const int m = g.stencil().size();
    const double h = g.h();
    const double h2 = h * h;
    const double v0 = f[node];
    // e_1..e_d are the first d representatives by construction.
    for (int k = 0; k < m; ++k) {
        int np = g.neighbor(node, k, +1);
        int nm = g.neighbor(node, k, -1);
        if (np < 0 || nm < 0)
            throw Error(errc::stencil_out_of_domain, "missing stencil neighbor");
        if (k < d) grad[k] = (f[np] - v0) / h;
        z[k] = (f[np] - 2.0 * v0 + f[nm]) / h2;
    }
}

}  // namespace ersatz
