#include <doctest.h>

#include <cmath>
#include <random>

#include "krein/grid.hpp"
#include "krein/kernels.hpp"

using namespace krein;

TEST_CASE("make_grid produces uniform nodes") {
    const Grid g = make_grid(0.0, 1.0, 5);
    CHECK(g.h == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(g.n() == 5);
    const double expect[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int j = 0; j < 5; ++j)
        CHECK(g.nodes[j] == doctest::Approx(expect[j]).epsilon(1e-15));

    const Grid sym = make_grid(-1.0, 1.0, 3);
    CHECK(sym.h == doctest::Approx(1.0));
    CHECK(sym.nodes[0] == -1.0);
    CHECK(sym.nodes[1] == doctest::Approx(0.0));
    CHECK(sym.nodes[2] == 1.0);
}

TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(0.0, 2.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(2.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, std::numeric_limits<double>::infinity(), 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_grid(std::nan(""), 1.0, 5), std::invalid_argument);
}

TEST_CASE("prefix trapezoid weights") {
    const Grid g = make_grid(0.0, 1.0, 5);

    const QuadratureWeights full = prefix_weights(g, 4);
    const double expect_full[] = {0.125, 0.25, 0.25, 0.25, 0.125};
    REQUIRE(full.w.size() == 5);
    for (int j = 0; j < 5; ++j)
        CHECK(full.w[j] == doctest::Approx(expect_full[j]).epsilon(1e-15));

    const QuadratureWeights half = prefix_weights(g, 2);
    REQUIRE(half.w.size() == 3);
    CHECK(half.w[0] == doctest::Approx(0.125));
    CHECK(half.w[1] == doctest::Approx(0.25));
    CHECK(half.w[2] == doctest::Approx(0.125));
    CHECK(half.w[0] + half.w[1] + half.w[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("prefix weight sums equal the prefix length") {
    for (int n : {5, 9, 17, 33}) {
        const Grid g = make_grid(-0.3, 1.7, n);
        for (int j = 1; j < n; ++j) {
            const QuadratureWeights qw = prefix_weights(g, j);
            double sum = 0.0;
            for (double w : qw.w) sum += w;
            CHECK(sum == doctest::Approx(g.nodes[j] - g.a).epsilon(1e-14));
        }
    }
}

TEST_CASE("simpson prefix and its fallback") {
    const Grid g = make_grid(0.0, 1.0, 5);

    const QuadratureWeights s4 = prefix_weights(g, 4, QuadRule::Simpson);
    CHECK_FALSE(s4.fell_back);
    const double h3 = 0.25 / 3.0;
    const double expect[] = {h3, 4 * h3, 2 * h3, 4 * h3, h3};
    for (int j = 0; j < 5; ++j)
        CHECK(s4.w[j] == doctest::Approx(expect[j]).epsilon(1e-15));

    // one panel cannot host Simpson
    const QuadratureWeights s1 = prefix_weights(g, 1, QuadRule::Simpson);
    CHECK(s1.fell_back);
    CHECK(s1.rule == QuadRule::Trapezoid);
    REQUIRE(s1.w.size() == 2);
    CHECK(s1.w[0] == doctest::Approx(0.125));
    CHECK(s1.w[1] == doctest::Approx(0.125));
}

TEST_CASE("degenerate prefix and suffix") {
    const Grid g = make_grid(0.0, 1.0, 5);
    const QuadratureWeights p0 = prefix_weights(g, 0);
    REQUIRE(p0.w.size() == 1);
    CHECK(p0.w[0] == 0.0);
    const QuadratureWeights sN = suffix_weights(g, 4);
    REQUIRE(sN.w.size() == 1);
    CHECK(sN.w[0] == 0.0);
}

TEST_CASE("suffix weights mirror prefix weights") {
    const Grid g = make_grid(0.0, 1.0, 9);
    for (int i = 0; i < 8; ++i) {
        const QuadratureWeights sw = suffix_weights(g, i);
        double sum = 0.0;
        for (double w : sw.w) sum += w;
        CHECK(sum == doctest::Approx(g.b - g.nodes[i]).epsilon(1e-14));
        CHECK(sw.w.front() == doctest::Approx(g.h / 2));
        CHECK(sw.w.back() == doctest::Approx(g.h / 2));
    }
}

TEST_CASE("integrate is exact for constants and linears") {
    const Grid g = make_grid(0.0, 1.0, 5);
    const QuadratureWeights qw = prefix_weights(g, 4);

    std::vector<double> c(5, 3.25);
    CHECK(integrate(c, qw) == doctest::Approx(3.25).epsilon(1e-15));

    std::vector<double> lin(g.nodes.begin(), g.nodes.end());
    CHECK(integrate(lin, qw) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("integrate converges at second order on t^2") {
    auto err = [](int n) {
        const Grid g = make_grid(0.0, 1.0, n);
        std::vector<double> sq;
        for (double t : g.nodes) sq.push_back(t * t);
        return std::abs(integrate(sq, prefix_weights(g, n - 1)) - 1.0 / 3.0);
    };
    const double e9 = err(9);
    CHECK(e9 < 0.01);
    const double ratio = e9 / err(17);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("integrate rejects length mismatch") {
    const Grid g = make_grid(0.0, 1.0, 5);
    std::vector<double> wrong(4, 1.0);
    CHECK_THROWS_AS(integrate(wrong, prefix_weights(g, 4)), std::invalid_argument);
}

TEST_CASE("integrate is linear on random blocks") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto rand_block = [&] {
        Block b(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                b(r, c) = Complex(dist(rng), dist(rng));
        return b;
    };

    const Grid g = make_grid(0.0, 2.0, 9);
    const QuadratureWeights qw = prefix_weights(g, 8);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Block> x, y, combo;
        const Complex alpha(dist(rng), dist(rng)), beta(dist(rng), dist(rng));
        for (int j = 0; j < 9; ++j) {
            x.push_back(rand_block());
            y.push_back(rand_block());
            combo.push_back(alpha * x.back() + beta * y.back());
        }
        const Block lhs = integrate(combo, qw);
        const Block rhs = alpha * integrate(x, qw) + beta * integrate(y, qw);
        const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-12);
    }
}

TEST_CASE("grid_derivative is exact for quadratics") {
    const Grid g = make_grid(0.0, 1.0, 5);

    std::vector<double> lin(g.nodes.begin(), g.nodes.end());
    for (double d : grid_derivative(lin, g))
        CHECK(d == doctest::Approx(1.0).epsilon(1e-13));

    std::vector<double> sq;
    for (double t : g.nodes) sq.push_back(t * t);
    const std::vector<double> d2 = grid_derivative(sq, g);
    for (int j = 0; j < 5; ++j)
        CHECK(d2[j] == doctest::Approx(2.0 * g.nodes[j]).epsilon(1e-12));

    std::vector<double> c(5, 7.0);
    for (double d : grid_derivative(c, g))
        CHECK(d == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("grid_derivative needs 3 samples") {
    std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(grid_derivative(two, 0.5), std::invalid_argument);
}

TEST_CASE("derivative of running integral recovers smooth integrands at order 2") {
    auto err = [](int n) {
        const Grid g = make_grid(0.0, 1.0, n);
        std::vector<double> running;
        for (int j = 0; j < n; ++j) {
            std::vector<double> samples;
            for (int i = 0; i <= j; ++i) samples.push_back(std::exp(g.nodes[i]));
            running.push_back(integrate(samples, prefix_weights(g, j)));
        }
        const std::vector<double> d = grid_derivative(running, g);
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(d[j] - std::exp(g.nodes[j])));
        return worst;
    };
    const double e9 = err(9), e17 = err(17), e33 = err(33);
    CHECK(std::log2(e9 / e17) >= 1.8);
    CHECK(std::log2(e17 / e33) >= 1.8);
}
