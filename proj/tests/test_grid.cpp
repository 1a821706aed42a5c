#include <doctest.h>

#include <cmath>
#include <vector>

#include "chemobl/grid.hpp"
#include "chemobl/tridiag.hpp"

using namespace chemobl;

namespace {
// deterministic LCG for property-style checks
struct Lcg {
    uint64_t s = 0x9e3779b97f4a7c15ull;
    double next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(s >> 11) / 9007199254740992.0;
    }
};

std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.num_nodes; ++i) v[static_cast<size_t>(i)] = f(g.node(i));
    return v;
}
}  // namespace

TEST_CASE("grid nodes hit the walls exactly") {
    RadialGrid g(1.0, 2.0, 3, 7);
    CHECK(g.node(0) == 1.0);
    CHECK(g.node(6) == 2.0);
    CHECK(g.weight(0) == 1.0);
    CHECK(g.weight(6) == 4.0);
    CHECK_THROWS_AS(RadialGrid(0.0, 1.0, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid(2.0, 1.0, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid(1.0, 2.0, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid(1.0, 2.0, 2, 2), std::invalid_argument);
}

TEST_CASE("weighted integral: exact and convergent cases") {
    // n=2: integrand r*1 is linear, trapezoid exact -> 1.5
    RadialGrid g2(1.0, 2.0, 2, 11);
    std::vector<double> ones(g2.size(), 1.0);
    CHECK(weighted_integral(ones, g2) == doctest::Approx(1.5).epsilon(1e-15));

    // n=3: exact value 7/3, trapezoid error O(dr^2); within 1e-4 at N=201
    RadialGrid g3(1.0, 2.0, 3, 201);
    std::vector<double> ones3(g3.size(), 1.0);
    CHECK(std::abs(weighted_integral(ones3, g3) - 7.0 / 3.0) < 1e-4);

    std::vector<double> zeros(g3.size(), 0.0);
    CHECK(weighted_integral(zeros, g3) == 0.0);

    std::vector<double> wrong(5, 1.0);
    CHECK_THROWS_AS(weighted_integral(wrong, g3), std::invalid_argument);
}

TEST_CASE("weighted integral is linear and nonnegative") {
    RadialGrid g(1.0, 2.0, 3, 33);
    Lcg rng;
    std::vector<double> u(g.size()), v(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
        u[i] = rng.next();
        v[i] = rng.next() - 0.3;
    }
    CHECK(weighted_integral(u, g) >= 0.0);
    std::vector<double> combo(g.size());
    for (size_t i = 0; i < g.size(); ++i) combo[i] = 2.5 * u[i] - 1.25 * v[i];
    const double lhs = weighted_integral(combo, g);
    const double rhs = 2.5 * weighted_integral(u, g) - 1.25 * weighted_integral(v, g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("first derivative: polynomial exactness") {
    RadialGrid g(1.0, 2.0, 3, 101);
    const auto lin = first_derivative(sample(g, [](double r) { return r; }), g);
    for (double d : lin) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));

    const auto quad = first_derivative(sample(g, [](double r) { return r * r; }), g);
    for (int i = 0; i < g.num_nodes; ++i)
        CHECK(quad[static_cast<size_t>(i)] == doctest::Approx(2.0 * g.node(i)).epsilon(1e-11));
}

TEST_CASE("first derivative: second-order convergence on sin") {
    auto max_err = [](int nodes) {
        RadialGrid g(1.0, 2.0, 3, nodes);
        const auto d = first_derivative(sample(g, [](double r) { return std::sin(r); }), g);
        double e = 0.0;
        for (int i = 0; i < g.num_nodes; ++i)
            e = std::max(e, std::abs(d[static_cast<size_t>(i)] - std::cos(g.node(i))));
        return e;
    };
    const double ratio = max_err(101) / max_err(201);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("second derivative: exactness and convergence") {
    RadialGrid g(1.0, 2.0, 3, 101);
    const auto quad = second_derivative(sample(g, [](double r) { return r * r; }), g);
    for (double d : quad) CHECK(d == doctest::Approx(2.0).epsilon(1e-10));

    const auto affine = second_derivative(sample(g, [](double r) { return 3.0 - 0.5 * r; }), g);
    for (double d : affine) CHECK(std::abs(d) < 1e-10);

    auto max_err = [](int nodes) {
        RadialGrid gg(1.0, 2.0, 3, nodes);
        const auto d = second_derivative(sample(gg, [](double r) { return std::cos(r); }), gg);
        double e = 0.0;
        for (int i = 0; i < gg.num_nodes; ++i)
            e = std::max(e, std::abs(d[static_cast<size_t>(i)] + std::cos(gg.node(i))));
        return e;
    };
    const double ratio = max_err(101) / max_err(201);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("tridiagonal solver matches a dense computation") {
    // 4x4 diagonally dominant system with a known manufactured solution
    std::vector<double> lower = {0.0, -1.0, -0.5, -2.0};
    std::vector<double> diag = {4.0, 5.0, 4.5, 6.0};
    std::vector<double> upper = {-1.5, -0.5, -1.0, 0.0};
    std::vector<double> x_true = {1.0, -2.0, 0.25, 3.0};
    std::vector<double> rhs(4);
    rhs[0] = diag[0] * x_true[0] + upper[0] * x_true[1];
    for (int i = 1; i < 3; ++i) rhs[static_cast<size_t>(i)] = lower[static_cast<size_t>(i)] * x_true[static_cast<size_t>(i - 1)] +
                                                              diag[static_cast<size_t>(i)] * x_true[static_cast<size_t>(i)] +
                                                              upper[static_cast<size_t>(i)] * x_true[static_cast<size_t>(i + 1)];
    rhs[3] = lower[3] * x_true[2] + diag[3] * x_true[3];
    const auto x = solve_tridiagonal(lower, diag, upper, rhs);
    for (int i = 0; i < 4; ++i) CHECK(x[static_cast<size_t>(i)] == doctest::Approx(x_true[static_cast<size_t>(i)]).epsilon(1e-13));

    // dominance violation is rejected
    diag[1] = 0.1;
    CHECK_THROWS_AS(solve_tridiagonal(lower, diag, upper, rhs), solver_error);
}
