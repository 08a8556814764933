#include "ruin/distribution.hpp"
#include "ruin/error.hpp"

#include "support/test_models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace ruin {
namespace {

using testing::kGeoP;

TEST(Distribution, PmfValues) {
    EXPECT_DOUBLE_EQ(testing::example_geometric().pmf(0), kGeoP);
    EXPECT_DOUBLE_EQ(testing::example_double_root().pmf(2), 0.264);
    EXPECT_DOUBLE_EQ(ClaimDistribution::geometric(0.5).pmf(3), 0.5 * std::pow(0.5, 3));
    EXPECT_EQ(testing::example_double_root().pmf(17), 0.0);
}

TEST(Distribution, CdfValues) {
    EXPECT_NEAR(testing::example_double_root().cdf(1), 0.128 + 0.576, 1e-15);
    EXPECT_DOUBLE_EQ(testing::example_geometric().cdf(0), kGeoP);
    EXPECT_DOUBLE_EQ(testing::example_double_root().cdf(1000), 1.0);
    EXPECT_NEAR(testing::example_geometric().cdf(2000), 1.0, 1e-15);
}

TEST(Distribution, PgfValues) {
    EXPECT_NEAR(std::abs(testing::example_geometric().pgf(1.0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(testing::example_double_root().pgf(1.0) - 1.0), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(testing::example_geometric().pgf(0.0).real(), kGeoP);
    EXPECT_NEAR(std::abs(ClaimDistribution::finite({0.5, 0.5}).pgf(-1.0)), 0.0, 1e-16);
}

TEST(Distribution, GeometricPgfOutsideRadius) {
    const auto d = ClaimDistribution::geometric(0.5);
    EXPECT_NO_THROW(d.pgf(1.9));
    try {
        d.pgf(Complex(0.0, 2.0));
        FAIL() << "expected DomainError";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainError);
    }
}

TEST(Distribution, Mean) {
    EXPECT_NEAR(testing::example_geometric().mean(), 199.0 / 101.0, 1e-14);
    EXPECT_NEAR(testing::bernoulli(0.3).mean(), 0.3, 1e-15);
    EXPECT_NEAR(testing::example_double_root().mean(), 1.2, 1e-15);
}

TEST(Distribution, RejectsInvalidPmf) {
    for (const auto& bad : std::vector<std::vector<double>>{{0.5, 0.6}, {1.2, -0.2}, {}, {0.0, 0.0}}) {
        try {
            ClaimDistribution::finite(bad);
            FAIL() << "expected InvalidArgument";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        }
    }
    EXPECT_THROW(ClaimDistribution::geometric(0.0), Error);
    EXPECT_THROW(ClaimDistribution::geometric(1.0), Error);
}

TEST(Distribution, TrailingZerosDropped) {
    const auto d = ClaimDistribution::finite({0.5, 0.5, 0.0, 0.0});
    EXPECT_EQ(d.probabilities().size(), 2u);
    EXPECT_EQ(d.max_support(), 1u);
}

TEST(NetProfit, Verdicts) {
    EXPECT_EQ(check_net_profit(testing::example_geometric(), 2).verdict, NetProfitVerdict::Ok);
    EXPECT_EQ(check_net_profit(ClaimDistribution::finite({0, 0, 1}), 2).verdict, NetProfitVerdict::TrivialSurvival);
    const auto bad = check_net_profit(ClaimDistribution::geometric(0.25), 2);
    EXPECT_EQ(bad.verdict, NetProfitVerdict::Violation);
    EXPECT_NEAR(bad.mean, 3.0, 1e-14);
    EXPECT_EQ(bad.kappa, 2);
}

TEST(NetProfit, RequireThrowsOnViolationOnly) {
    try {
        require_net_profit(ClaimDistribution::geometric(0.25), 2);
        FAIL() << "expected NetProfitViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NetProfitViolation);
    }
    EXPECT_NO_THROW(require_net_profit(ClaimDistribution::finite({0, 0, 1}), 2));
    // Boundary E X = kappa is a violation.
    EXPECT_THROW(require_net_profit(ClaimDistribution::finite({0.5, 0, 0.5}), 1), Error);
}

TEST(Truncate, FiniteIsItself) {
    const auto t = testing::example_double_root().truncate(1e-3);
    EXPECT_EQ(t.pmf, (std::vector<double>{0.128, 0.576, 0.264, 0.032}));
    EXPECT_EQ(t.tail, 0.0);
}

TEST(Truncate, GeometricTail) {
    const auto half = ClaimDistribution::geometric(0.5).truncate(1e-3);
    EXPECT_EQ(half.pmf.size(), 10u);  // support 0..9
    EXPECT_DOUBLE_EQ(half.tail, std::pow(2.0, -10));

    const auto tight = ClaimDistribution::geometric(0.9).truncate(1e-12);
    const int expected_m = static_cast<int>(std::ceil(std::log(1e-12) / std::log(0.1))) - 1;
    EXPECT_EQ(static_cast<int>(tight.pmf.size()) - 1, expected_m);
    EXPECT_EQ(expected_m, 11);
}

TEST(Truncate, NormalisationWithTail) {
    for (double p : {0.1, 0.336, 0.7}) {
        const auto t = ClaimDistribution::geometric(p).truncate(kDefaultTruncEps);
        double sum = 0.0;
        for (double v : t.pmf) sum += v;
        EXPECT_NEAR(sum + t.tail, 1.0, 1e-12);
        EXPECT_LE(t.tail, kDefaultTruncEps * (1 + 1e-9));
    }
}

TEST(LatticeSpan, Examples) {
    EXPECT_EQ(lattice_span(ClaimDistribution::geometric(0.4), 4), 1);
    EXPECT_EQ(lattice_span(ClaimDistribution::finite({0.5, 0, 0.5}), 2), 2);
    EXPECT_EQ(lattice_span(ClaimDistribution::finite({0.9, 0, 0, 0.1}), 2), 1);
    EXPECT_EQ(lattice_span(ClaimDistribution::finite({1.0}), 3), 3);
    EXPECT_EQ(lattice_span(ClaimDistribution::finite({0.5, 0, 0, 0, 0, 0, 0.5}), 4), 2);
}

TEST(DistributionProperty, CdfDifferencesArePmf) {
    for (const auto& d : {testing::example_geometric(), testing::example_double_root(), ClaimDistribution::geometric(0.05)}) {
        for (std::size_t u = 1; u < 200; ++u) EXPECT_NEAR(d.cdf(u) - d.cdf(u - 1), d.pmf(u), 1e-14);
    }
}

TEST(DistributionProperty, PgfMatchesTruncatedSeries) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> radius(0.0, 1.0), angle(0.0, 6.283185307179586);
    for (double p : {0.2, kGeoP, 0.8}) {
        const auto d = ClaimDistribution::geometric(p);
        const auto t = d.truncate(d.trunc_eps());
        for (int i = 0; i < 100; ++i) {
            const Complex s = std::polar(radius(rng), angle(rng));
            Complex partial{};
            for (auto it = t.pmf.rbegin(); it != t.pmf.rend(); ++it) partial = partial * s + *it;
            EXPECT_LE(std::abs(d.pgf(s) - partial), t.tail + 1e-15);
        }
    }
}

TEST(DistributionProperty, MeanMatchesTruncatedSum) {
    for (double p : {0.2, kGeoP, 0.8}) {
        const auto d = ClaimDistribution::geometric(p);
        const auto t = d.truncate(d.trunc_eps());
        double m = 0.0;
        for (std::size_t k = 0; k < t.pmf.size(); ++k) m += static_cast<double>(k) * t.pmf[k];
        EXPECT_NEAR(m, d.mean(), d.trunc_eps() * static_cast<double>(t.pmf.size()) * 10);
    }
}

TEST(Distribution, ShiftedDown) {
    const auto d = ClaimDistribution::finite({0, 0.6, 0.4}).shifted_down(1);
    EXPECT_DOUBLE_EQ(d.pmf(0), 0.6);
    EXPECT_DOUBLE_EQ(d.pmf(1), 0.4);
    EXPECT_THROW(ClaimDistribution::finite({0.5, 0.5}).shifted_down(1), Error);
}

}  // namespace
}  // namespace ruin
