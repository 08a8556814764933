#include "ruin/char_roots.hpp"
#include "ruin/error.hpp"
#include "ruin/oracle.hpp"
#include "ruin/pi_solver.hpp"
#include "ruin/survival.hpp"

#include "support/test_models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace ruin {
namespace {

struct Solved {
    RootSet roots;
    PiVector pi;
};

Solved solve(const ClaimDistribution& dist, int kappa) {
    Solved s;
    s.roots = find_unit_disk_roots(build_characteristic(dist, kappa), {});
    s.pi = solve_pi(assemble_system(dist, kappa, s.roots), {});
    return s;
}

ErrorCode error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no ruin::Error thrown";
    return ErrorCode::InvalidArgument;
}

TEST(FiniteTime, FirstPeriodIsCdf) {
    const auto d = testing::example_geometric();
    const auto grid = finite_time_grid(d, 3, 10, 1);
    for (int u = 0; u <= 10; ++u) EXPECT_DOUBLE_EQ(grid.at(u, 1), d.cdf(static_cast<std::size_t>(u + 2)));
}

TEST(FiniteTime, Bernoulli) {
    const auto grid = finite_time_grid(testing::bernoulli(0.3), 1, 5, 20);
    for (int t = 1; t <= 20; ++t) {
        EXPECT_NEAR(grid.at(0, t), 0.7, 1e-15);
        for (int u = 1; u <= 5; ++u) EXPECT_NEAR(grid.at(u, t), 1.0, 1e-15);
    }
}

TEST(FiniteTime, TwoPeriodsByHand) {
    // kappa = 1, x = (0.5, 0.3, 0.2), u = 0: survive iff X_1 = 0 and X_2 <= 1.
    const auto d = ClaimDistribution::finite({0.5, 0.3, 0.2});
    EXPECT_NEAR(finite_time_survival(d, 1, 0, 2), 0.5 * 0.8, 1e-15);
    // u = 1: X_1 = 0 then X_2 <= 2, or X_1 = 1 then X_2 <= 1.
    EXPECT_NEAR(finite_time_survival(d, 1, 1, 2), 0.5 * 1.0 + 0.3 * 0.8, 1e-15);
}

TEST(FiniteTime, MatchesEnumeration) {
    for (const auto& m : testing::random_models(30, 17)) {
        const auto pmf = std::vector<double>(m.dist.probabilities().begin(), m.dist.probabilities().end());
        const auto grid = finite_time_grid(m.dist, m.kappa, 4, 3);
        for (int t = 1; t <= 3; ++t)
            for (int u = 0; u <= 4; ++u)
                EXPECT_NEAR(grid.at(u, t), testing::enumerate_finite_time(pmf, m.kappa, u, t), 1e-10);
    }
}

TEST(FiniteTime, MonotoneAndAboveUltimate) {
    const auto d = testing::example_geometric();
    const auto grid = finite_time_grid(d, 3, 20, 200);
    const auto s = solve(d, 3);
    const auto table = ultimate_from_series(s.pi, d, 3, 20);
    for (int u = 0; u <= 20; ++u) {
        for (int t = 2; t <= 200; ++t) EXPECT_LE(grid.at(u, t), grid.at(u, t - 1) + 1e-15);
        EXPECT_GE(grid.at(u, 200), table.phi[static_cast<std::size_t>(u)] - 1e-12);
    }
    for (int t = 1; t <= 200; t += 17)
        for (int u = 1; u <= 20; ++u) EXPECT_GE(grid.at(u, t), grid.at(u - 1, t) - 1e-15);
}

TEST(FiniteTime, InvalidArguments) {
    EXPECT_EQ(error_code([] { finite_time_grid(testing::bernoulli(0.3), 1, -1, 3); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_code([] { finite_time_grid(testing::bernoulli(0.3), 1, 3, 0); }), ErrorCode::InvalidArgument);
}

TEST(Ultimate, GeometricKappaThree) {
    const auto d = testing::example_geometric();
    const auto s = solve(d, 3);
    const auto table = ultimate_from_pi(s.pi, d, 3, 10);
    const std::vector<double> expected{0.480212, 0.582072, 0.663971, 0.729821};
    for (std::size_t u = 0; u < expected.size(); ++u) EXPECT_NEAR(table.phi[u], expected[u], 1e-5);
    EXPECT_EQ(table.method, SurvivalMethod::Recurrence);
}

TEST(Ultimate, BernoulliKappaOne) {
    const auto d = testing::bernoulli(0.3);
    const auto table = ultimate_from_pi(solve(d, 1).pi, d, 1, 50);
    EXPECT_NEAR(table.phi[0], 0.7, 1e-15);
    for (std::size_t u = 1; u <= 50; ++u) EXPECT_NEAR(table.phi[u], 1.0, 1e-15);
}

TEST(Ultimate, RecurrenceBlowup) {
    const auto d = testing::example_geometric();
    const auto s = solve(d, 2);
    EXPECT_EQ(error_code([&] { ultimate_from_pi(s.pi, d, 2, 200); }), ErrorCode::RecurrenceBlowup);
    EXPECT_NO_THROW(ultimate_from_series(s.pi, d, 2, 200));
}

TEST(Ultimate, ClosedFormInitialValues) {
    const auto d = testing::example_geometric();
    const auto s2 = solve(d, 2);
    const auto two = initial_values_closed_form(s2.roots, d, 2);
    EXPECT_NEAR(two[0], (std::sqrt(90597.0) - 297.0) / 202.0, 1e-10);
    EXPECT_NEAR(two[1], (45450.0 - 150.0 * std::sqrt(90597.0)) / 10201.0, 1e-10);

    const auto s3 = solve(d, 3);
    const auto three = initial_values_closed_form(s3.roots, d, 3);
    const std::vector<double> expected{0.480212, 0.582072, 0.663971, 0.729821};
    for (std::size_t u = 0; u < 4; ++u) EXPECT_NEAR(three[u], expected[u], 1e-5);

    const auto dbl = solve(testing::example_double_root(), 3);
    EXPECT_EQ(error_code([&] { initial_values_closed_form(dbl.roots, testing::example_double_root(), 3); }),
              ErrorCode::MultipleRootsUnsupported);
}

TEST(Xi, Evaluation) {
    const auto bern = testing::bernoulli(0.3);
    EXPECT_NEAR(std::abs(xi_eval(solve(bern, 1).pi, bern, 1, 0.5) - 2.0), 0.0, 1e-12);

    const auto dbl = testing::example_double_root();
    EXPECT_NEAR(std::abs(xi_eval(solve(dbl, 3).pi, dbl, 3, 0.3) - 1.0 / 0.7), 0.0, 1e-9);
}

TEST(Xi, PoleAndDomain) {
    const auto d = testing::example_geometric();
    const auto s = solve(d, 2);
    const Complex alpha = s.roots.roots[0].value;
    EXPECT_EQ(error_code([&] { xi_eval(s.pi, d, 2, alpha); }), ErrorCode::NearPole);
    EXPECT_EQ(error_code([&] { xi_eval(s.pi, d, 2, 1.0); }), ErrorCode::DomainError);
    EXPECT_EQ(error_code([&] { xi_special(d, 2, Complex(0.0, 1.0)); }), ErrorCode::DomainError);
}

TEST(Xi, SpecialFormsAgreeWithSolve) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> radius(0.0, 0.95), angle(0.0, 6.283185307179586);
    const auto geo = testing::example_geometric();
    const auto bern = testing::bernoulli(0.3);
    const auto geo_pi = solve(geo, 2).pi;
    const auto bern_pi = solve(bern, 1).pi;
    for (int i = 0; i < 50; ++i) {
        const Complex s = std::polar(radius(rng), angle(rng));
        EXPECT_NEAR(std::abs(xi_special(geo, 2, s) - xi_eval(geo_pi, geo, 2, s)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(xi_special(bern, 1, s) - xi_eval(bern_pi, bern, 1, s)), 0.0, 1e-12);
    }
}

TEST(Xi, SpecialFormWithoutMassAtZero) {
    const auto d = ClaimDistribution::finite({0, 0.6, 0.4});
    const auto reduced = reduce_support(d, 2);
    const auto pi = solve(reduced.dist, reduced.kappa).pi;
    for (const auto& s : circle_points(50, 0.9)) {
        EXPECT_NEAR(std::abs(xi_special(d, 2, s) - xi_eval(pi, reduced.dist, 1, s)), 0.0, 1e-12);
    }
}

TEST(Xi, UnsupportedKappa) {
    EXPECT_EQ(error_code([] { xi_special(testing::example_geometric(), 3, 0.2); }), ErrorCode::UnsupportedKappa);
}

TEST(Xi, CoefficientsOfDoubleRootModel) {
    const auto d = testing::example_double_root();
    const auto xi = xi_coefficients(solve(d, 3).pi, d, 3, 30);
    ASSERT_EQ(xi.coefficients.size(), 31u);
    for (double c : xi.coefficients) EXPECT_NEAR(c, 1.0, 1e-9);
    EXPECT_LE(xi.guard, 1e-12);
}

TEST(Xi, CoefficientsAreSurvivalValues) {
    const auto d = testing::example_geometric();
    const auto s = solve(d, 3);
    const auto xi = xi_coefficients(s.pi, d, 3, 5);
    const auto table = ultimate_from_pi(s.pi, d, 3, 6);
    for (std::size_t u = 0; u <= 5; ++u) EXPECT_NEAR(xi.coefficients[u], table.phi[u + 1], 1e-12);
}

TEST(SurvivalProperty, RecurrenceMatchesSeriesWithinHorizon) {
    for (const auto& m : testing::random_models(100, 41)) {
        const auto s = solve(m.dist, m.kappa);
        const int u_max = std::min(30, recurrence_horizon(s.roots, m.dist.pmf(0)));
        const auto rec = ultimate_from_pi(s.pi, m.dist, m.kappa, u_max);
        const auto ser = ultimate_from_series(s.pi, m.dist, m.kappa, u_max);
        for (int u = 0; u <= u_max; ++u)
            EXPECT_NEAR(rec.phi[static_cast<std::size_t>(u)], ser.phi[static_cast<std::size_t>(u)], 1e-9);
    }
}

// The series table satisfies the recurrence it was not built from, and the
// first-claim identity phi(0) = sum_{j<kappa} x_j phi(kappa - j).
TEST(SurvivalProperty, SeriesSatisfiesRecurrenceAndFirstStep) {
    for (const auto& m : testing::random_models(100, 43)) {
        const auto s = solve(m.dist, m.kappa);
        const auto phi = ultimate_from_series(s.pi, m.dist, m.kappa, 60).phi;
        const int k = m.kappa;
        for (int u = 0; u + k <= 60; ++u) {
            double rhs = phi[static_cast<std::size_t>(u)];
            for (int i = 1; i < u + k; ++i) rhs -= m.dist.pmf(static_cast<std::size_t>(u + k - i)) * phi[static_cast<std::size_t>(i)];
            EXPECT_NEAR(m.dist.pmf(0) * phi[static_cast<std::size_t>(u + k)], rhs, 1e-12);
        }
        double first = 0.0;
        for (int j = 0; j < k; ++j) first += m.dist.pmf(static_cast<std::size_t>(j)) * phi[static_cast<std::size_t>(k - j)];
        EXPECT_NEAR(phi[0], first, 1e-12);
    }
}

TEST(SurvivalProperty, TendsToOne) {
    const auto d = testing::example_geometric();
    const auto s = solve(d, 2);
    int u_max = 64;
    double last = 0.0;
    while (u_max <= (1 << 16)) {
        last = ultimate_from_series(s.pi, d, 2, u_max).phi.back();
        if (last >= 1.0 - 1e-3) break;
        u_max *= 2;
    }
    EXPECT_GE(last, 1.0 - 1e-3);
    EXPECT_LE(last, 1.0 + 1e-12);
}

TEST(Survival, TrivialTable) {
    const auto t = trivial_survival_table(2, 5);
    EXPECT_EQ(t.phi, (std::vector<double>{0, 1, 1, 1, 1, 1}));
    EXPECT_EQ(t.method, SurvivalMethod::Trivial);
    // X = kappa a.s.: the surplus never moves, which the finite-time grid reproduces.
    const auto grid = finite_time_grid(ClaimDistribution::finite({0, 0, 1}), 2, 5, 10);
    for (int u = 0; u <= 5; ++u) EXPECT_DOUBLE_EQ(grid.at(u, 10), t.phi[static_cast<std::size_t>(u)]);
}

TEST(Survival, RecurrenceHorizon) {
    EXPECT_EQ(recurrence_horizon(RootSet{}, 0.5), 1 << 20);
    RootSet r;
    r.roots.push_back({Complex(-0.5, 0.0), 1, false});
    const int h = recurrence_horizon(r, 1.0, 1e-10);
    EXPECT_EQ(h, static_cast<int>(std::floor(std::log(1e-10 / 2.220446049250313e-16) / std::log(2.0))));
}

}  // namespace
}  // namespace ruin
