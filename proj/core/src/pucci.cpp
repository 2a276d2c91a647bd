#include "ersatz/pucci.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ersatz {

namespace {

Eigen::MatrixXd dense(const SymMatrix& m) {
    Eigen::MatrixXd a(m.dim(), m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) a(i, j) = m(i, j);
    return a;
}

}  // namespace

std::vector<double> SymMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(*this),
                                                      Eigen::EigenvaluesOnly);
    std::vector<double> ev(dim_);
    for (int i = 0; i < dim_; ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

void EllipticityParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0))
        throw Error(errc::invalid_spec, "delta must lie in (0,1)");
    if (!(hat_delta > 0.0 && hat_delta < 1.0))
        throw Error(errc::invalid_spec, "hat_delta must lie in (0,1)");
    if (!(check_delta > 0.0 && check_delta < 1.0))
        throw Error(errc::invalid_spec, "check_delta must lie in (0,1)");
    if (!(k0 >= 0.0)) throw Error(errc::invalid_spec, "K0 must be >= 0");
    if (!(h_bar >= 0.0)) throw Error(errc::invalid_spec, "H_bar must be >= 0");
    if (!(big_k > 0.0)) throw Error(errc::invalid_spec, "K must be > 0");
}

double eval_script_p(std::span<const double> z, double hat_delta) {
    if (!(hat_delta > 0.0 && hat_delta < 1.0))
        throw Error(errc::invalid_spec, "hat_delta must lie in (0,1)");
    // Linear objective over the box [hat_delta/2, 2/hat_delta]^m attains
    // its maximum at a vertex: top coefficient on z_k > 0, bottom on z_k < 0.
    const double hi = 2.0 / hat_delta;
    const double lo = hat_delta / 2.0;
    double s = 0.0;
    for (double zk : z) s += zk > 0.0 ? hi * zk : lo * zk;
    return s;
}

double eval_p(const SymMatrix& u, const StencilSet& stencil, double hat_delta) {
    if (u.dim() != stencil.dim)
        throw Error(errc::dimension_mismatch, "matrix and stencil dimension differ");
    const int m = stencil.size();
    std::vector<double> z(m);
    for (int k = 0; k < m; ++k) {
        const auto& l = stencil.vectors[k];
        double s = 0.0;
        for (int i = 0; i < u.dim(); ++i)
            for (int j = 0; j < u.dim(); ++j) s += u(i, j) * l[i] * l[j];
        z[k] = s;
    }
    return eval_script_p(z, hat_delta);
}

double eval_p0(const SymMatrix& u, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw Error(errc::invalid_spec, "delta must lie in (0,1)");
    double s = 0.0;
    for (double ev : u.eigenvalues())
        s += ev > 0.0 ? 2.0 / delta * ev : delta / 2.0 * ev;
    return s;
}

bool check_s_delta(const SymMatrix& a, double delta) {
    auto ev = a.eigenvalues();
    return ev.front() >= delta && ev.back() <= 1.0 / delta;
}

std::vector<double> decompose_matrix(const SymMatrix& a, const StencilSet& stencil,
                                     double hat_delta) {
    if (a.dim() != stencil.dim)
        throw Error(errc::dimension_mismatch, "matrix and stencil dimension differ");
    if (!(hat_delta > 0.0 && hat_delta < 1.0))
        throw Error(errc::invalid_spec, "hat_delta must lie in (0,1)");
    const int d = a.dim();
    const int m = stencil.size();
    const int neq = d * (d + 1) / 2;
    const double lo = hat_delta;
    const double hi = 1.0 / hat_delta;

    // Equality system M lambda = b over the upper triangle of a.
    Eigen::MatrixXd M(neq, m);
    Eigen::VectorXd b(neq);
    {
        int r = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j, ++r) {
                for (int k = 0; k < m; ++k)
                    M(r, k) = double(stencil.vectors[k][i]) * stencil.vectors[k][j];
                b(r) = a(i, j);
            }
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    Eigen::VectorXd lam_p = cod.solve(b);
    if ((M * lam_p - b).cwiseAbs().maxCoeff() > 1e-9)
        throw Error(errc::decomposition_infeasible,
                    "matrix is not representable over the stencil");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd N = lu.kernel();  // m x q (q >= 1 only when a kernel exists)
    int q = N.cols();
    if (q == 1 && N.col(0).cwiseAbs().maxCoeff() < 1e-12) q = 0;

    Eigen::VectorXd best_lam;
    if (q == 0) {
        best_lam = lam_p;
    } else {
        // Max-min-slack LP in (s, t):  maximize s subject to
        //   s <= (lam_p + N t)_k - lo   and   s <= hi - (lam_p + N t)_k.
        // Small dimension: enumerate candidate vertices (q+1 active
        // constraints), keep the feasible one with the largest s; ties
        // resolve to the lexicographically smallest lambda.
        const int nc = 2 * m;
        Eigen::MatrixXd G(nc, q);   // s <= c_i + G.row(i) * t
        Eigen::VectorXd c(nc);
        for (int k = 0; k < m; ++k) {
            G.row(k) = N.row(k);
            c(k) = lam_p(k) - lo;
            G.row(m + k) = -N.row(k);
            c(m + k) = hi - lam_p(k);
        }

        double best_s = -std::numeric_limits<double>::infinity();
        std::vector<int> pick(q + 1);
        for (int i = 0; i <= q; ++i) pick[i] = i;
        Eigen::MatrixXd A(q + 1, q + 1);
        Eigen::VectorXd rhs(q + 1);
        while (true) {
            for (int r = 0; r <= q; ++r) {
                A(r, 0) = 1.0;
                for (int cix = 0; cix < q; ++cix) A(r, cix + 1) = -G(pick[r], cix);
                rhs(r) = c(pick[r]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> sys(A);
            if (sys.isInvertible()) {
                Eigen::VectorXd st = sys.solve(rhs);
                double s = st(0);
                Eigen::VectorXd t = st.tail(q);
                bool feas = true;
                for (int i = 0; i < nc && feas; ++i)
                    feas = s <= c(i) + G.row(i).dot(t) + 1e-10;
                if (feas && s > best_s - 1e-12) {
                    Eigen::VectorXd lam = lam_p + N * t;
                    if (s > best_s + 1e-12 || best_lam.size() == 0 ||
                        std::lexicographical_compare(lam.data(), lam.data() + m,
                                                     best_lam.data(),
                                                     best_lam.data() + m)) {
                        best_s = std::max(best_s, s);
                        best_lam = lam;
                    }
                }
            }
            // next combination
            int i = q;
            while (i >= 0 && pick[i] == nc - 1 - (q - i)) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j <= q; ++j) pick[j] = pick[j - 1] + 1;
        }
        if (best_lam.size() == 0)
            throw Error(errc::decomposition_infeasible, "no feasible vertex found");
    }

    for (int k = 0; k < m; ++k)
        if (best_lam(k) < lo - 1e-9 || best_lam(k) > hi + 1e-9)
            throw Error(errc::decomposition_infeasible,
                        "bounds cannot be met; hat_delta too large for this matrix");
    if ((M * best_lam - b).cwiseAbs().maxCoeff() > 1e-9)
        throw Error(errc::decomposition_infeasible, "reconstruction residual too large");

    return std::vector<double>(best_lam.data(), best_lam.data() + m);
}

SymMatrix random_sym_with_spectrum(int d, double eig_lo, double eig_hi,
                                   std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(eig_lo, eig_hi);
    Eigen::MatrixXd G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd ev(d);
    for (int i = 0; i < d; ++i) ev(i) = unif(rng);
    Eigen::MatrixXd A = Q * ev.asDiagonal() * Q.transpose();
    SymMatrix out(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) out.set(i, j, 0.5 * (A(i, j) + A(j, i)));
    return out;
}

double feasible_hat_delta(double delta, int d, int samples) {
    if (!(delta > 0.0 && delta < 1.0))
        throw Error(errc::invalid_spec, "delta must lie in (0,1)");
    if (d <= 0) throw Error(errc::invalid_dimension, "dimension must be >= 1");
    if (samples < 1) throw Error(errc::invalid_spec, "samples must be >= 1");

    const double cap = delta / 4.0;
    const double floor_hd = 1e-6;
    StencilSet stencil = build_standard_stencil(d);

    // Extreme points of S_{delta/4}: diagonal sign patterns of the
    // eigenvalue interval, rotated two-axis extremes, plus seeded draws.
    const double elo = delta / 4.0;
    const double ehi = 4.0 / delta;
    std::vector<SymMatrix> tests;
    const int patterns = std::min(1 << d, 16);
    for (int p = 0; p < patterns; ++p) {
        std::vector<double> diag(d);
        for (int i = 0; i < d; ++i) diag[i] = (p >> i) & 1 ? ehi : elo;
        tests.push_back(SymMatrix::diagonal(diag));
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (double th : {0.25, 0.5, 0.75}) {
                double ang = th * 1.5707963267948966;
                double cs = std::cos(ang), sn = std::sin(ang);
                SymMatrix a = SymMatrix::identity(d);
                for (int r = 0; r < d; ++r) a.set(r, r, elo);
                a.set(i, i, cs * cs * elo + sn * sn * ehi);
                a.set(j, j, sn * sn * elo + cs * cs * ehi);
                a.set(i, j, cs * sn * (ehi - elo));
                tests.push_back(a);
            }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    for (int s = 0; s < samples; ++s)
        tests.push_back(random_sym_with_spectrum(d, elo, ehi, rng));

    auto feasible = [&](double hd) {
        try {
            for (const auto& a : tests) decompose_matrix(a, stencil, hd);
        } catch (const Error&) {
            return false;
        }
        return true;
    };

    if (feasible(cap)) return cap;
    double lo = floor_hd, hi = cap;
    if (!feasible(lo))
        throw Error(errc::search_failed, "no feasible hat_delta above the floor");
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace ersatz
