#include <doctest.h>

#include <cmath>
#include <random>

#include "ersatz/pucci.hpp"

using namespace ersatz;

namespace {

// Brute-force max of sum a_k z_k over the vertex set of the coefficient box.
double brute_force_p(std::span<const double> z, double hat_delta) {
    double lo = hat_delta / 2.0, hi = 2.0 / hat_delta;
    double best = -std::numeric_limits<double>::infinity();
    size_t corners = size_t{1} << z.size();
    for (size_t mask = 0; mask < corners; ++mask) {
        double s = 0.0;
        for (size_t k = 0; k < z.size(); ++k)
            s += ((mask >> k) & 1 ? hi : lo) * z[k];
        best = std::max(best, s);
    }
    return best;
}

double reconstruction_residual(const SymMatrix& a, const StencilSet& stencil,
                               std::span<const double> lambda) {
    double res = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i; j < a.dim(); ++j) {
            double s = 0.0;
            for (int k = 0; k < stencil.size(); ++k)
                s += lambda[k] * stencil.vectors[k][i] * stencil.vectors[k][j];
            res = std::max(res, std::abs(s - a(i, j)));
        }
    return res;
}

}  // namespace

TEST_CASE("script p closed form") {
    CHECK(eval_script_p(std::vector<double>{0.0, 0.0}, 0.5) == 0.0);
    CHECK(eval_script_p(std::vector<double>{1.0, -1.0}, 0.5) ==
          doctest::Approx(3.75));
    std::vector<double> z{2, 3, -1, 0};
    CHECK(eval_script_p(z, 0.5) == doctest::Approx(19.75));
    CHECK(eval_script_p(z, 0.5) == doctest::Approx(brute_force_p(z, 0.5)));
}

TEST_CASE("script p equals the vertex brute force on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> z(4);
        for (auto& v : z) v = u(rng);
        CHECK(std::abs(eval_script_p(z, 0.3) - brute_force_p(z, 0.3)) <= 1e-9);
    }
}

TEST_CASE("script p homogeneity, subadditivity, monotonicity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> z(4), w(4), zw(4), zup(4);
        for (int k = 0; k < 4; ++k) {
            z[k] = u(rng);
            w[k] = u(rng);
            zw[k] = z[k] + w[k];
            zup[k] = z[k] + pos(rng);
        }
        double c = pos(rng);
        std::vector<double> cz(4);
        for (int k = 0; k < 4; ++k) cz[k] = c * z[k];
        double pz = eval_script_p(z, 0.5);
        CHECK(eval_script_p(cz, 0.5) == doctest::Approx(c * pz).epsilon(1e-10));
        CHECK(eval_script_p(zw, 0.5) <= pz + eval_script_p(w, 0.5) + 1e-10);
        CHECK(eval_script_p(zup, 0.5) >= pz - 1e-12);
    }
}

TEST_CASE("matrix operator P") {
    auto stencil = build_standard_stencil(2);
    CHECK(eval_p(SymMatrix(2), stencil, 0.5) == 0.0);
    CHECK(eval_p(SymMatrix::identity(2), stencil, 0.5) == doctest::Approx(24.0));
    CHECK(eval_p(SymMatrix::diagonal(std::vector<double>{1.0, -1.0}), stencil,
                 0.5) == doctest::Approx(3.75));
    try {
        eval_p(SymMatrix::identity(3), stencil, 0.5);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::dimension_mismatch);
    }
}

TEST_CASE("Pucci operator P0") {
    CHECK(eval_p0(SymMatrix(2), 0.5) == 0.0);
    CHECK(eval_p0(SymMatrix::identity(2), 0.5) == doctest::Approx(8.0));
    SymMatrix u = SymMatrix::diagonal(std::vector<double>{1.0, -1.0});
    CHECK(eval_p0(u, 0.5) == doctest::Approx(3.75));

    // sampled maximization over the coefficient class
    std::mt19937_64 rng(3);
    double best = -1e300;
    for (int trial = 0; trial < 10000; ++trial) {
        SymMatrix a = random_sym_with_spectrum(2, 0.25, 4.0, rng);
        double tr = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) tr += a(i, j) * u(i, j);
        best = std::max(best, tr);
    }
    CHECK(best <= 3.75 + 1e-9);
    CHECK(best >= 3.75 - 0.2);
}

TEST_CASE("ellipticity class membership") {
    CHECK(check_s_delta(SymMatrix::identity(2), 0.5));
    CHECK_FALSE(check_s_delta(SymMatrix::diagonal(std::vector<double>{0.4, 1.0}),
                              0.5));
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        SymMatrix a = random_sym_with_spectrum(2, 0.6, 1.8, rng);
        CHECK(check_s_delta(a, 0.5));
    }
}

TEST_CASE("decomposition of the identity") {
    auto stencil = build_standard_stencil(2);
    auto lambda = decompose_matrix(SymMatrix::identity(2), stencil, 0.25);
    REQUIRE(lambda.size() == 4);
    for (double l : lambda) {
        CHECK(l >= 0.25 - 1e-12);
        CHECK(l <= 4.0 + 1e-12);
    }
    CHECK(reconstruction_residual(SymMatrix::identity(2), stencil, lambda) <=
          1e-9);
    // the three linear equations of the 2-D stencil
    CHECK(lambda[0] + lambda[2] + lambda[3] == doctest::Approx(1.0));
    CHECK(lambda[1] + lambda[2] + lambda[3] == doctest::Approx(1.0));
    CHECK(lambda[2] - lambda[3] == doctest::Approx(0.0));
}

TEST_CASE("scalar decomposition is the value itself") {
    auto stencil = build_standard_stencil(1);
    SymMatrix a(1);
    a.set(0, 0, 0.7);
    auto lambda = decompose_matrix(a, stencil, 0.125);
    REQUIRE(lambda.size() == 1);
    CHECK(lambda[0] == doctest::Approx(0.7));
}

TEST_CASE("off-diagonal decomposition reconstructs") {
    auto stencil = build_standard_stencil(2);
    SymMatrix a(2);
    a.set(0, 0, 1.0);
    a.set(1, 1, 1.0);
    a.set(0, 1, 0.3);
    auto lambda = decompose_matrix(a, stencil, 0.25);
    CHECK(reconstruction_residual(a, stencil, lambda) <= 1e-9);
    for (double l : lambda) {
        CHECK(l >= 0.25 - 1e-12);
        CHECK(l <= 4.0 + 1e-12);
    }
}

TEST_CASE("diagonal matrices balance the cross weights") {
    auto stencil = build_standard_stencil(2);
    auto lambda = decompose_matrix(
        SymMatrix::diagonal(std::vector<double>{1.5, 0.8}), stencil, 0.125);
    CHECK(lambda[2] == doctest::Approx(lambda[3]).epsilon(1e-9));
}

TEST_CASE("infeasible window is reported") {
    auto stencil = build_standard_stencil(2);
    try {
        decompose_matrix(SymMatrix::identity(2), stencil, 0.9);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::decomposition_infeasible);
    }
}

TEST_CASE("decomposition is deterministic") {
    auto stencil = build_standard_stencil(2);
    SymMatrix a(2);
    a.set(0, 0, 2.0);
    a.set(1, 1, 1.2);
    a.set(0, 1, -0.4);
    auto l1 = decompose_matrix(a, stencil, 0.2);
    auto l2 = decompose_matrix(a, stencil, 0.2);
    CHECK(l1 == l2);
}

TEST_CASE("feasible hat_delta in one dimension is the cap") {
    CHECK(feasible_hat_delta(0.5, 1, 16) == doctest::Approx(0.125));
}

TEST_CASE("feasible hat_delta d=2") {
    double hd = feasible_hat_delta(0.5, 2, 16);
    CHECK(hd > 0.0);
    CHECK(hd <= 0.125 + 1e-12);
    double hd2 = feasible_hat_delta(0.5, 2, 32);
    CHECK(hd2 <= hd + 1e-12);

    // the returned value decomposes fuzzed class members
    auto stencil = build_standard_stencil(2);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        SymMatrix a = random_sym_with_spectrum(2, 0.125, 8.0, rng);
        auto lambda = decompose_matrix(a, stencil, hd);
        CHECK(reconstruction_residual(a, stencil, lambda) <= 1e-9);
    }
}

TEST_CASE("domination over the Pucci operator") {
    auto stencil = build_standard_stencil(2);
    double delta = 0.5;
    double hd = feasible_hat_delta(delta, 2, 16);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        SymMatrix m(2);
        m.set(0, 0, u(rng));
        m.set(1, 1, u(rng));
        m.set(0, 1, u(rng));
        double abs_sum = 0.0;
        for (double e : m.eigenvalues()) abs_sum += std::abs(e);
        CHECK(eval_p(m, stencil, hd) >=
              eval_p0(m, delta) + (delta / 4.0) * abs_sum - 1e-9);
    }
}

TEST_CASE("parameter validation") {
    EllipticityParams p;
    p.delta = 0.5;
    p.hat_delta = 0.125;
    p.big_k = 1.0;
    CHECK_NOTHROW(p.validate());
    p.big_k = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p.big_k = 1.0;
    p.delta = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
}
