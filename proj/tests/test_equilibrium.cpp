#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sumrule/equilibrium.hpp"

using namespace sumrule;

namespace {

Polynomial gaussian() { return Polynomial({0.0, 0.0, 0.5}); }
Polynomial quartic_pure() { return Polynomial({0.0, 0.0, 0.0, 0.0, 0.25}); }
Polynomial double_well(double v) { return Polynomial({0.0, 0.0, -v / 2.0, 0.0, 0.25}); }

GridMeasure semicircle(int n = 4001) {
    SupportSet I;
    I.intervals = {{-2.0, 2.0}};
    GridMeasure g = GridMeasure::sampled(I, n, oracles::sc_density);
    g.normalize();
    return g;
}

} // namespace

TEST_CASE("validate_potential") {
    PotentialReport r = validate_potential(gaussian());
    CHECK(r.valid);
    CHECK(r.degree == 2);
    CHECK(r.half_degree == 1);
    CHECK_FALSE(validate_potential(Polynomial({0.0, 0.0, 0.0, 1.0})).valid); // x^3
    CHECK_FALSE(validate_potential(Polynomial({0.0, 0.0, 0.0, 0.0, -1.0})).valid);
    CHECK_FALSE(validate_potential(Polynomial({2.0})).valid);
}

TEST_CASE("solve_one_cut: Gaussian gives the semicircle exactly") {
    OneCutResult oc = solve_one_cut(gaussian());
    REQUIRE(oc.one_cut);
    CHECK(std::abs(oc.support.left() + 2.0) <= 1e-9);
    CHECK(std::abs(oc.support.right() - 2.0) <= 1e-9);
    REQUIRE(oc.A.degree() == 0);
    CHECK(oc.A.coeff(0) == 1.0);
    // sampled density matches the closed form
    for (double x : {0.0, 0.7, -1.3, 1.9})
        CHECK(oc.measure.density_at(x) == doctest::Approx(oracles::sc_density(x)).epsilon(1e-5));
    CHECK(oc.measure.mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve_one_cut: pure quartic endpoint system") {
    OneCutResult oc = solve_one_cut(quartic_pure());
    REQUIRE(oc.one_cut);
    CHECK(oc.center == doctest::Approx(0.0).epsilon(1e-10));
    // endpoint condition in closed form: 6 h^4 = 2
    CHECK(oc.half == doctest::Approx(std::pow(1.0 / 3.0, 0.25)).epsilon(1e-10));
}

TEST_CASE("solve_one_cut: double well v=3 signals the failed one-cut hypothesis") {
    OneCutResult oc = solve_one_cut(double_well(3.0));
    CHECK_FALSE(oc.one_cut);
    CHECK(oc.min_A < -1e-9);
}

TEST_CASE("solve_grid: Gaussian on [-3,3]") {
    GridSolveResult rs = solve_grid(gaussian(), -3.0, 3.0, 600);
    const GridMeasure& g = rs.measure;
    REQUIRE(g.support.cut_count() == 1);
    CHECK(std::abs(g.support.left() + 2.0) <= 0.05);
    CHECK(std::abs(g.support.right() - 2.0) <= 0.05);
    CHECK(g.density_at(0.0) == doctest::Approx(1.0 / M_PI).epsilon(0.0).scale(1.0).epsilon(0.04));
    CHECK(std::abs(g.density_at(0.0) - 1.0 / M_PI) <= 0.01);

    // weights form a probability vector and the energy trace is monotone
    double sum = 0.0;
    for (double w : rs.weights) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    for (size_t i = 1; i < rs.energy_trace.size(); ++i)
        CHECK(rs.energy_trace[i] <= rs.energy_trace[i - 1] + 1e-12);

    // the optimum is no worse than the analytic minimizer placed on the grid
    std::vector<double> sc_w(rs.grid.size());
    double h = rs.grid[1] - rs.grid[0], tot = 0.0;
    for (size_t i = 0; i < rs.grid.size(); ++i) tot += sc_w[i] = oracles::sc_density(rs.grid[i]) * h;
    for (double& w : sc_w) w /= tot;
    double e_sc = grid_energy(gaussian(), rs.grid, sc_w);
    CHECK(rs.energy <= e_sc + 1e-12);
    CHECK(std::abs(rs.energy - e_sc) <= 1e-3);
}

TEST_CASE("solve_grid: double well v=3 produces the two-cut support") {
    GridSolveResult rs = solve_grid(double_well(3.0), -3.0, 3.0, 600);
    const GridMeasure& g = rs.measure;
    REQUIRE(g.support.cut_count() == 2);
    double s5 = std::sqrt(5.0);
    CHECK(std::abs(g.support.intervals[0].first + s5) <= 0.05);
    CHECK(std::abs(g.support.intervals[0].second + 1.0) <= 0.05);
    CHECK(std::abs(g.support.intervals[1].first - 1.0) <= 0.05);
    CHECK(std::abs(g.support.intervals[1].second - s5) <= 0.05);
}

TEST_CASE("one-cut and grid solvers agree for one-cut potentials") {
    struct Case {
        Polynomial V;
        double radius; // domain sized to the support so 600 cells resolve it
    };
    for (const Case& c : {Case{gaussian(), 3.0}, Case{quartic_pure(), 2.0}}) {
        const Polynomial& V = c.V;
        OneCutResult oc = solve_one_cut(V);
        REQUIRE(oc.one_cut);
        GridSolveResult rs = solve_grid(V, -c.radius, c.radius, 600);
        REQUIRE(rs.measure.support.cut_count() == 1);
        CHECK(std::abs(rs.measure.support.left() - oc.support.left()) <= 0.05);
        CHECK(std::abs(rs.measure.support.right() - oc.support.right()) <= 0.05);
        // sup-norm agreement on the common nodes; the single boundary cell of
        // each run carries partial-cell mass against an infinite density
        // slope, so it gets its own looser bound
        const auto& xs = rs.measure.nodes[0];
        double sup_diff = 0.0, edge_diff = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double d = std::abs(rs.measure.density_at(xs[i]) - oc.measure.density_at(xs[i]));
            if (i == 0 || i + 1 == xs.size())
                edge_diff = std::max(edge_diff, d);
            else
                sup_diff = std::max(sup_diff, d);
        }
        CHECK(sup_diff <= 0.01);
        CHECK(edge_diff <= 0.05);
    }
}

TEST_CASE("quartic_equilibrium closed forms") {
    QuarticEquilibrium q = quartic_equilibrium(3.0);
    CHECK(q.alpha_minus == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.alpha_plus == doctest::Approx(2.2360680).epsilon(1e-7));
    // roots of l^2 - 3l + 1, by the quadratic formula oracle
    double disc = std::sqrt(9.0 - 4.0);
    CHECK(q.ell1 == doctest::Approx((3.0 - disc) / 2.0).epsilon(1e-14));
    CHECK(q.ell2 == doctest::Approx((3.0 + disc) / 2.0).epsilon(1e-14));
    CHECK(q.ell1 == doctest::Approx(0.3819660).epsilon(1e-6));
    CHECK(q.ell2 == doctest::Approx(2.6180340).epsilon(1e-6));
    CHECK(q.measure.mass == doctest::Approx(1.0).epsilon(1e-9));

    QuarticEquilibrium q25 = quartic_equilibrium(2.5);
    CHECK(q25.alpha_minus == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(q25.alpha_plus == doctest::Approx(std::sqrt(4.5)).epsilon(1e-12));

    CHECK_THROWS_AS(quartic_equilibrium(2.0), std::invalid_argument);
    CHECK_THROWS_AS(quartic_equilibrium(1.0), std::invalid_argument);
}

TEST_CASE("quartic density agrees with the grid solver") {
    QuarticEquilibrium q = quartic_equilibrium(3.0);
    GridSolveResult rs = solve_grid(double_well(3.0), -2.6, 2.6, 600);
    double sup_diff = 0.0, edge_diff = 0.0;
    for (const auto& nodes : rs.measure.nodes)
        for (size_t i = 0; i < nodes.size(); ++i) {
            double d = std::abs(rs.measure.density_at(nodes[i]) - q.measure.density_at(nodes[i]));
            if (i == 0 || i + 1 == nodes.size())
                edge_diff = std::max(edge_diff, d);
            else
                sup_diff = std::max(sup_diff, d);
        }
    CHECK(sup_diff <= 0.01);
    CHECK(edge_diff <= 0.05);
}

TEST_CASE("log_potential of the semicircle: brute quadrature and closed form") {
    GridMeasure sc = semicircle();
    // outside the support the integrand is regular: brute quadrature pins the
    // closed form there; inside, the closed form x^2/4 - 1/2 is classical
    for (double x : {3.0, 2.2, -2.5, 5.0}) {
        double brute = oracles::integrate(
            [x](double u) {
                double t = 2.0 * std::sin(u);
                double c = std::cos(u);
                return std::log(std::abs(x - t)) * (2.0 / M_PI) * c * c;
            },
            -M_PI / 2, M_PI / 2, 1e-12);
        CHECK(oracles::sc_log_potential(x) == doctest::Approx(brute).epsilon(1e-8));
    }
    for (double x : {3.0, 0.0, 1.5, -2.5, 2.2})
        CHECK(log_potential(sc, x) ==
              doctest::Approx(oracles::sc_log_potential(x)).epsilon(0.0).scale(1.0).epsilon(1e-4));
    CHECK(log_potential(sc, 3.0) == doctest::Approx(1.0353727).epsilon(1e-4));
    CHECK(std::abs(log_potential(sc, 0.0) - (-0.5)) <= 1e-4);
    CHECK(log_potential(GridMeasure{}, 7.0) == 0.0);
}

TEST_CASE("effective potential: Euler-Lagrange constancy on the support") {
    GridMeasure sc = semicircle();
    for (int i = 0; i <= 50; ++i) {
        double x = -1.95 + 3.9 * i / 50.0;
        CHECK(effective_potential(gaussian(), sc, x) == doctest::Approx(1.0).epsilon(0.0).scale(1.0).epsilon(2e-3));
    }
    // off the support: J = inf(J) + F by definition, and inf(J) sits at the
    // Euler-Lagrange constant 1, so J(3) = 1 + F(3) up to grid error
    EffectivePotential J(gaussian(), sc);
    CHECK(J(3.0) == doctest::Approx(J.infimum() + J.rate(3.0).value()).epsilon(1e-12));
    CHECK(std::abs(J.infimum() - 1.0) <= 2e-3);
    CHECK(std::abs(J(3.0) - (1.0 + J.rate(3.0).value())) <= 2e-3);
    // continuity across the edge
    CHECK(std::abs(J(2.0 - 1e-4) - J(2.0 + 1e-4)) <= 2e-3);
}

TEST_CASE("effective potential is constant across both quartic cuts") {
    QuarticEquilibrium q = quartic_equilibrium(3.0);
    Polynomial V = double_well(3.0);
    double ref = effective_potential(V, q.measure, q.alpha_minus + 0.2);
    for (const auto& [l, r] : q.support.intervals)
        for (int i = 2; i <= 48; ++i) {
            double x = l + (r - l) * i / 50.0;
            CHECK(std::abs(effective_potential(V, q.measure, x) - ref) <= 5e-3);
        }
}

TEST_CASE("rate_F: golden value at x = 3 for the Gaussian") {
    GridMeasure sc = semicircle();
    double oracle = oracles::gaussian_rate_quad(3.0);
    CHECK(oracle == doctest::Approx(1.4292546).epsilon(1e-6));
    ExtReal f3 = rate_F(gaussian(), sc, 3.0);
    REQUIRE(f3.is_finite());
    CHECK(f3.value() == doctest::Approx(oracle).epsilon(0.0).scale(1.0).epsilon(1e-4));
    CHECK(std::abs(f3.value() - 1.4292546) <= 1e-4);
}

TEST_CASE("rate_F: boundary and interior cases") {
    GridMeasure sc = semicircle();
    EffectivePotential J(gaussian(), sc);
    CHECK(std::abs(J.rate(2.0).value()) <= 2e-3);
    CHECK(std::abs(J.rate(-2.0).value()) <= 2e-3);
    CHECK(J.rate(0.5).is_infinite());
    CHECK(J.rate(-1.999).is_infinite());
    // nonnegative and growing at infinity
    double prev = 0.0;
    for (double x : {2.5, 3.0, 4.0, 6.0}) {
        double v = J.rate(x).value();
        CHECK(v >= 0.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("check_A2: Gaussian and quartic pass, mismatched pair fails") {
    GridMeasure sc = semicircle();
    A2Report g = check_A2(gaussian(), sc);
    CHECK(g.pass);

    QuarticEquilibrium q = quartic_equilibrium(3.0);
    A2Report qq = check_A2(double_well(3.0), q.measure);
    CHECK(qq.pass);

    // deliberately inconsistent inputs: semicircle presented as the
    // equilibrium measure of x^4
    Polynomial x4({0.0, 0.0, 0.0, 0.0, 1.0});
    A2Report bad = check_A2(x4, sc);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("solve_grid rejects bad input") {
    CHECK_THROWS_AS(solve_grid(gaussian(), 3.0, -3.0, 600), std::invalid_argument);
    CHECK_THROWS_AS(solve_grid(gaussian(), -3.0, 3.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(solve_grid(Polynomial({0.0, 0.0, 0.0, 1.0}), -3.0, 3.0, 600),
                    std::invalid_argument);
}
