#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ersatz/pucci.hpp"
#include "ersatz/stencil.hpp"

namespace ersatz {

using SourceFn = std::function<double(double t, std::span<const double> x)>;

/// Declared per-slot Lipschitz data for a stencil Hamiltonian.
struct HamBounds {
    double z_lo = 0.0;   // lower slope window edge in each z_k
    double z_hi = 0.0;   // upper slope window edge in each z_k
    double grad = 0.0;   // per-component gradient constant
    double u0 = 0.0;     // u0 constant
};

struct HamFlags {
    bool independent_of_u0 = true;
    bool nonincreasing_in_u0 = true;
    bool time_dependent = false;
};

/// Hamiltonian in pure-second-difference form: an opaque evaluator
/// of (u0, grad, z, t, x) together with declared Lipschitz bounds.
/// The z-window declaration must be certified by
/// check_stencil_ellipticity before a solve.
struct StencilHamiltonian {
    std::function<double(double u0, std::span<const double> grad,
                         std::span<const double> z, double t,
                         std::span<const double> x)>
        eval;
    HamBounds bounds;
    HamFlags flags;
};

struct BellmanRow {
    std::vector<double> a;  // m weights, componentwise in the window
    std::vector<double> b;  // d drift coefficients
    double c = 0.0;         // zeroth-order coefficient, <= 0
    double f = 0.0;         // free term
};

/// Linear Hamiltonian: sum nu_k z_k + <drift, grad> + zeroth*u0 + source(t,x).
/// With strict_window set, weights outside the window throw
/// Error(ellipticity-violation).
StencilHamiltonian make_linear(std::vector<double> nu, std::vector<double> drift,
                               double zeroth, SourceFn source = nullptr,
                               std::optional<std::pair<double, double>>
                                   strict_window = std::nullopt);

/// Bellman operator: max over rows of (a.z + b.grad + c*u0 + f).
StencilHamiltonian make_bellman(std::vector<BellmanRow> rows);

/// Isaacs operator: max over groups of (min over the group's rows).
StencilHamiltonian make_isaacs(std::vector<std::vector<BellmanRow>> groups);

using DiffusionField = std::function<SymMatrix(
    double t, std::span<const double> x, double u0, std::span<const double> grad)>;
using LowerOrderFn = std::function<double(double u0, std::span<const double> grad,
                                          double t, std::span<const double> x)>;

/// Diffusion-form operator tr(a D^2 v) + lower order, converted to stencil
/// form through the rank-one decomposition of a (cached per distinct matrix).
StencilHamiltonian from_diffusion(DiffusionField a_field, LowerOrderFn lower_order,
                                  StencilSet stencil, double hat_delta);

/// The cutoff operator max(H, P - K).
struct ErsatzOperator {
    StencilHamiltonian ham;
    EllipticityParams params;
    StencilSet stencil;
};

enum class Branch : std::uint8_t { H = 0, P = 1 };

struct ErsatzValue {
    double value = 0.0;
    Branch branch = Branch::H;  // ties resolve to H
};

ErsatzValue ersatz_eval(const ErsatzOperator& op, double u0,
                        std::span<const double> grad, std::span<const double> z,
                        double t, std::span<const double> x);

/// Seeded sample specification for the assumption checkers.
struct SampleSpec {
    std::uint64_t seed = 1;
    int count = 256;
    double u0_range = 2.0;
    double grad_range = 2.0;
    double z_range = 4.0;
    double t_range = 1.0;
    double x_range = 1.0;
    double eps = 1e-6;  // divided-difference step
};

struct CheckReport {
    bool pass = true;
    std::vector<std::string> violations;
    double min_observed = 0.0;
    double max_observed = 0.0;
};

/// Divided-difference check that every z-slope lies in
/// [hat_delta - tol, 1/hat_delta + tol] with tol = 1e-7.
CheckReport check_stencil_ellipticity(const StencilHamiltonian& ham, int dim,
                                      double hat_delta, const SampleSpec& spec);

/// Sampled check that the evaluator is nonincreasing in u0.
CheckReport check_monotone_in_u0(const StencilHamiltonian& ham, int dim,
                                 const SampleSpec& spec);

/// Sampled sup of |H(u0, grad, 0, t, x)| - k0*(|u0| + |grad|).
double check_growth_bound(const StencilHamiltonian& ham, int dim, double k0,
                          const SampleSpec& spec);

}  // namespace ersatz
