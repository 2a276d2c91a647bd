#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ersatz/error.hpp"
#include "ersatz/stencil.hpp"

namespace ersatz {

struct Domain {
    enum class Kind { Box, Ball, Torus };
    Kind kind = Kind::Box;
    int dim = 0;

    // Box: [lower_k, upper_k] per axis.
    std::vector<double> lower, upper;
    // Ball: |x - center| <= radius.
    std::vector<double> center;
    double radius = 0.0;
    // Torus: period per axis (whole-space mode, no boundary).
    std::vector<double> period;

    static Domain box(std::vector<double> lower, std::vector<double> upper);
    static Domain ball(std::vector<double> center, double radius);
    static Domain torus(std::vector<double> period);
};

/// Lattice h*Z^d intersected with the domain, with node classification.
///
/// Nodes are indexed by integer multi-indices; membership and neighbor
/// lookups are pure integer arithmetic, never floating-point coordinate
/// comparison.  Interior nodes are those with rho(x) > lambda*h, where
/// rho is the distance to the complement of the domain (closed-form for
/// box and ball, +inf on the torus).
class Grid {
public:
    Grid(Domain domain, StencilSet stencil, double h);

    const Domain& domain() const { return domain_; }
    const StencilSet& stencil() const { return stencil_; }
    double h() const { return h_; }
    int dim() const { return domain_.dim; }

    int node_count() const { return static_cast<int>(coords_.size()) / dim(); }
    int interior_count() const { return interior_count_; }

    std::span<const double> coord(int node) const {
        return {coords_.data() + static_cast<size_t>(node) * dim(),
                static_cast<size_t>(dim())};
    }
    std::span<const int> index(int node) const {
        return {indices_.data() + static_cast<size_t>(node) * dim(),
                static_cast<size_t>(dim())};
    }
    bool is_interior(int node) const { return interior_[node] != 0; }
    double rho(int node) const { return rho_[node]; }

    /// Node id at a multi-index, or -1 if not a node.  Torus indices wrap.
    int node_at(std::span<const int> idx) const;

    /// Neighbor node id of `node` shifted by +/- stencil vector k, or -1.
    int neighbor(int node, int k, int sign) const {
        return neighbors_[(static_cast<size_t>(node) * stencil_.size() + k) * 2 +
                          (sign > 0 ? 0 : 1)];
    }

private:
    void classify();

    Domain domain_;
    StencilSet stencil_;
    double h_ = 0.0;

    std::vector<int> lo_idx_, hi_idx_;   // per-axis index bounds (or torus extent)
    std::vector<int> torus_n_;           // torus nodes per axis
    std::vector<double> coords_;         // node_count * d
    std::vector<int> indices_;           // node_count * d
    std::vector<int> id_table_;          // dense over the index bounding box
    std::vector<std::int64_t> strides_;
    std::vector<double> rho_;
    std::vector<std::uint8_t> interior_;
    std::vector<int> neighbors_;         // node_count * m * 2
    int interior_count_ = 0;
};

/// One real value per grid node.
struct GridFunction {
    const Grid* grid = nullptr;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0)
        : grid(&g), values(static_cast<size_t>(g.node_count()), fill) {}

    double& operator[](int node) { return values[node]; }
    double operator[](int node) const { return values[node]; }
};

/// Forward difference (f(x+hl) - f(x)) / h along stencil vector k.
double first_diff(const GridFunction& f, int k, int node);

/// Central second difference (f(x+hl) - 2f(x) + f(x-hl)) / h^2.
double second_diff(const GridFunction& f, int k, int node);

/// Gradient of forward differences along e_1..e_d and the vector of
/// second differences along all m stencil representatives.
void diff_vectors(const GridFunction& f, int node, std::span<double> grad,
                  std::span<double> z);

}  // namespace ersatz
