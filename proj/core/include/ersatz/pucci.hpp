#pragma once

#include <random>
#include <span>
#include <vector>

#include "ersatz/error.hpp"
#include "ersatz/stencil.hpp"

namespace ersatz {

/// Symmetric d x d matrix stored as the row-major upper triangle.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int dim)
        : dim_(dim), upper_(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0) {
        if (dim <= 0) throw Error(errc::invalid_dimension, "matrix dimension must be >= 1");
    }
    static SymMatrix identity(int dim) {
        SymMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
        return m;
    }
    static SymMatrix diagonal(std::span<const double> diag) {
        SymMatrix m(static_cast<int>(diag.size()));
        for (int i = 0; i < m.dim(); ++i) m.set(i, i, diag[i]);
        return m;
    }

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return upper_[flat(i, j)]; }
    void set(int i, int j, double v) { upper_[flat(i, j)] = v; }
    std::span<const double> upper() const { return upper_; }

    /// Eigenvalues sorted ascending.
    std::vector<double> eigenvalues() const;

private:
    size_t flat(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<size_t>(i) * dim_ - static_cast<size_t>(i) * (i - 1) / 2 +
               (j - i);
    }
    int dim_ = 0;
    std::vector<double> upper_;
};

/// Every scalar constant the scheme consumes.
struct EllipticityParams {
    double delta = 0.5;       // ellipticity class bound, in (0,1)
    double hat_delta = 0.125; // stencil window parameter, in (0,1)
    double check_delta = 0.5; // ellipticity of the cutoff operator
    double k0 = 0.0;          // linear-growth constant K_0 >= 0
    double h_bar = 0.0;       // inhomogeneity bound
    double big_k = 1.0;       // cutoff level K > 0

    void validate() const;
};

/// Separable box-maximal operator on second-difference vectors:
/// sum_k [ 2/hat_delta * z_k^+ - hat_delta/2 * z_k^- ].
double eval_script_p(std::span<const double> z, double hat_delta);

/// Matrix form: eval_script_p applied to <u l_k, l_k>.
double eval_p(const SymMatrix& u, const StencilSet& stencil, double hat_delta);

/// Pucci maximal operator over S_{delta/2} via signed eigenvalue sums.
double eval_p0(const SymMatrix& u, double delta);

/// True iff all eigenvalues of a lie in [delta, 1/delta].
bool check_s_delta(const SymMatrix& a, double delta);

/// Rank-one stencil decomposition a = sum_k lambda_k l_k l_k^T with
/// lambda_k in [hat_delta, 1/hat_delta], maximizing the minimum bound
/// slack; lexicographically smallest lambda among optima.
/// Throws Error(decomposition-infeasible) when no such lambda exists.
std::vector<double> decompose_matrix(const SymMatrix& a, const StencilSet& stencil,
                                     double hat_delta);

/// Largest hat_delta on a bisection grid (capped at delta/4) for which
/// decompose_matrix succeeds on a seeded family of test matrices that
/// covers the extreme points of S_{delta/4}.  An estimate, not a proof.
double feasible_hat_delta(double delta, int d, int samples);

/// Seeded random symmetric matrix with eigenvalues in [eig_lo, eig_hi].
SymMatrix random_sym_with_spectrum(int d, double eig_lo, double eig_hi,
                                   std::mt19937_64& rng);

}  // namespace ersatz
