#include <doctest.h>

#include <cmath>
#include <random>

#include "ersatz/grid.hpp"

using namespace ersatz;

namespace {

bool has_vector(const StencilSet& s, std::vector<int> v) {
    std::vector<int> neg(v);
    for (auto& c : neg) c = -c;
    for (const auto& l : s.vectors)
        if (l == v || l == neg) return true;
    return false;
}

GridFunction sample(const Grid& grid, auto&& f) {
    GridFunction out(grid);
    for (int i = 0; i < grid.node_count(); ++i) out[i] = f(grid.coord(i));
    return out;
}

}  // namespace

TEST_CASE("standard stencil d=1") {
    auto s = build_standard_stencil(1);
    CHECK(s.dim == 1);
    CHECK(s.size() == 1);
    CHECK(s.vectors[0] == std::vector<int>{1});
    CHECK(s.radius == doctest::Approx(1.0));
}

TEST_CASE("standard stencil d=2") {
    auto s = build_standard_stencil(2);
    CHECK(s.size() == 4);
    CHECK(s.vectors[0] == std::vector<int>{1, 0});
    CHECK(s.vectors[1] == std::vector<int>{0, 1});
    CHECK(s.vectors[2] == std::vector<int>{1, 1});
    CHECK(s.vectors[3] == std::vector<int>{1, -1});
    CHECK(s.radius == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("standard stencil d=3 invariants") {
    auto s = build_standard_stencil(3);
    CHECK(s.size() == 9);  // d + d(d-1) representatives
    CHECK(s.radius == doctest::Approx(std::sqrt(2.0)));
    for (int i = 0; i < 3; ++i) {
        std::vector<int> e(3, 0);
        e[i] = 1;
        CHECK(has_vector(s, e));
        for (int j = i + 1; j < 3; ++j) {
            std::vector<int> p(3, 0), q(3, 0);
            p[i] = 1;
            p[j] = 1;
            q[i] = 1;
            q[j] = -1;
            CHECK(has_vector(s, p));
            CHECK(has_vector(s, q));
        }
    }
    // one representative per +/- pair
    for (size_t a = 0; a < s.vectors.size(); ++a)
        for (size_t b = a + 1; b < s.vectors.size(); ++b) {
            std::vector<int> neg(s.vectors[b]);
            for (auto& c : neg) c = -c;
            CHECK(s.vectors[a] != neg);
        }
}

TEST_CASE("stencil rejects bad dimension") {
    CHECK_THROWS_AS(build_standard_stencil(0), Error);
    try {
        build_standard_stencil(-1);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::invalid_dimension);
    }
}

TEST_CASE("coarse unit box has no interior") {
    Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), 0.5);
    CHECK(grid.node_count() == 9);
    CHECK(grid.interior_count() == 0);
    for (int i = 0; i < grid.node_count(); ++i)
        CHECK(grid.rho(i) <= grid.stencil().radius * grid.h());
}

TEST_CASE("fine unit box center node is interior") {
    Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), 0.125);
    int center = grid.node_at(std::vector<int>{4, 4});
    REQUIRE(center >= 0);
    CHECK(grid.coord(center)[0] == doctest::Approx(0.5));
    CHECK(grid.rho(center) == doctest::Approx(0.5));
    CHECK(grid.is_interior(center));
}

TEST_CASE("torus nodes are all interior") {
    Grid grid(Domain::torus({1.0}), build_standard_stencil(1), 0.25);
    CHECK(grid.node_count() == 4);
    CHECK(grid.interior_count() == 4);
    for (int i = 0; i < grid.node_count(); ++i)
        CHECK(grid.rho(i) == std::numeric_limits<double>::infinity());
}

TEST_CASE("torus neighbor lookups wrap") {
    Grid grid(Domain::torus({1.0}), build_standard_stencil(1), 0.25);
    int last = grid.node_at(std::vector<int>{3});
    REQUIRE(last >= 0);
    CHECK(grid.neighbor(last, 0, +1) == grid.node_at(std::vector<int>{0}));
}

TEST_CASE("empty lattice is rejected") {
    try {
        Grid grid(Domain::box({0.3}, {0.4}), build_standard_stencil(1), 1.0);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::grid_too_coarse);
    }
}

TEST_CASE("ball rho is the radial distance") {
    Grid grid(Domain::ball({0, 0}, 1.0), build_standard_stencil(2), 0.25);
    int center = grid.node_at(std::vector<int>{0, 0});
    REQUIRE(center >= 0);
    CHECK(grid.rho(center) == doctest::Approx(1.0));
    CHECK(grid.is_interior(center));
}

TEST_CASE("interior nodes have all stencil neighbors") {
    for (double h : {0.125, 0.1}) {
        Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), h);
        for (int i = 0; i < grid.node_count(); ++i) {
            if (!grid.is_interior(i)) continue;
            for (int k = 0; k < grid.stencil().size(); ++k) {
                CHECK(grid.neighbor(i, k, +1) >= 0);
                CHECK(grid.neighbor(i, k, -1) >= 0);
            }
        }
    }
}

TEST_CASE("difference quotients on affine data") {
    Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), 0.125);
    std::vector<double> c{1.5, -2.0};
    auto f = sample(grid, [&](std::span<const double> x) {
        return c[0] * x[0] + c[1] * x[1];
    });
    for (int i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_interior(i)) continue;
        for (int k = 0; k < grid.stencil().size(); ++k) {
            double cl = 0.0;
            for (int a = 0; a < 2; ++a) cl += c[a] * grid.stencil().vectors[k][a];
            CHECK(first_diff(f, k, i) == doctest::Approx(cl).epsilon(1e-12));
            CHECK(second_diff(f, k, i) == doctest::Approx(0.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("second differences are exact on quadratics") {
    Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), 0.0625);
    double a11 = 1.0, a12 = 0.25, a22 = -0.5;
    auto f = sample(grid, [&](std::span<const double> x) {
        return a11 * x[0] * x[0] + 2 * a12 * x[0] * x[1] + a22 * x[1] * x[1];
    });
    for (int i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_interior(i)) continue;
        for (int k = 0; k < grid.stencil().size(); ++k) {
            const auto& l = grid.stencil().vectors[k];
            double all = a11 * l[0] * l[0] + 2 * a12 * l[0] * l[1] +
                         a22 * l[1] * l[1];
            CHECK(second_diff(f, k, i) ==
                  doctest::Approx(2 * all).epsilon(1e-10));
        }
    }
}

TEST_CASE("spike second difference") {
    Grid grid(Domain::box({0.0}, {2.0}), build_standard_stencil(1), 0.5);
    GridFunction f(grid);
    int mid = grid.node_at(std::vector<int>{2});
    REQUIRE(mid >= 0);
    REQUIRE(grid.is_interior(mid));
    f[mid] = 1.0;
    CHECK(second_diff(f, 0, mid) == doctest::Approx(-8.0));
}

TEST_CASE("diff_vectors on |x|^2") {
    Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), 0.125);
    auto f = sample(grid, [](std::span<const double> x) {
        return x[0] * x[0] + x[1] * x[1];
    });
    std::vector<double> grad(2), z(4);
    for (int i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_interior(i)) continue;
        diff_vectors(f, i, grad, z);
        auto x = grid.coord(i);
        CHECK(grad[0] == doctest::Approx(2 * x[0] + grid.h()).epsilon(1e-10));
        CHECK(grad[1] == doctest::Approx(2 * x[1] + grid.h()).epsilon(1e-10));
        CHECK(z[0] == doctest::Approx(2.0));
        CHECK(z[1] == doctest::Approx(2.0));
        CHECK(z[2] == doctest::Approx(4.0));
        CHECK(z[3] == doctest::Approx(4.0));
    }
}

TEST_CASE("diff_vectors on constant and affine data") {
    Grid grid(Domain::box({0, 0}, {1, 1}), build_standard_stencil(2), 0.125);
    auto c = sample(grid, [](std::span<const double>) { return 3.0; });
    auto aff = sample(grid, [](std::span<const double> x) {
        return 2.0 * x[0] - 1.0 * x[1];
    });
    std::vector<double> grad(2), z(4);
    for (int i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_interior(i)) continue;
        diff_vectors(c, i, grad, z);
        for (double v : grad) CHECK(v == doctest::Approx(0.0));
        for (double v : z) CHECK(v == doctest::Approx(0.0));
        diff_vectors(aff, i, grad, z);
        CHECK(grad[0] == doctest::Approx(2.0));
        CHECK(grad[1] == doctest::Approx(-1.0));
        for (double v : z) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("consistency order on smooth data") {
    auto stencil = build_standard_stencil(2);
    const double w = 2.0 * std::acos(-1.0);
    auto smooth = [&](std::span<const double> x) {
        return std::sin(w * (x[0] + x[1]));
    };
    std::vector<double> second_err, first_err;
    for (double h : {0.04, 0.02, 0.01}) {
        Grid grid(Domain::torus({1.0, 1.0}), stencil, h);
        auto f = sample(grid, smooth);
        double es = 0.0, ef = 0.0;
        std::vector<double> grad(2), z(4);
        for (int i = 0; i < grid.node_count(); ++i) {
            auto x = grid.coord(i);
            double s = std::sin(w * (x[0] + x[1]));
            double c = w * std::cos(w * (x[0] + x[1]));
            diff_vectors(f, i, grad, z);
            for (int k = 0; k < stencil.size(); ++k) {
                const auto& l = stencil.vectors[k];
                double exact = -w * w * s * (l[0] + l[1]) * (l[0] + l[1]);
                es = std::max(es, std::abs(z[k] - exact));
            }
            for (int a = 0; a < 2; ++a)
                ef = std::max(ef, std::abs(grad[a] - c));
        }
        second_err.push_back(es);
        first_err.push_back(ef);
    }
    for (size_t i = 1; i < second_err.size(); ++i) {
        CHECK(std::log2(second_err[i - 1] / second_err[i]) >= 1.9);
        CHECK(std::log2(first_err[i - 1] / first_err[i]) >= 0.9);
    }
}
