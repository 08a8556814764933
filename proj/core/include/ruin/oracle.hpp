#pragma once

#include "ruin/distribution.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ruin {

/// SplitMix64 stream. The stream of path p depends only on (seed, p).
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on (0, 1].
    double uniform_open_closed() noexcept;

    static std::uint64_t mix(std::uint64_t z) noexcept;

private:
    std::uint64_t state_;
};

/// Inverse-cdf sampler with a guide table; geometric tails use the closed form.
class ClaimSampler {
public:
    explicit ClaimSampler(const ClaimDistribution& dist);

    std::int64_t operator()(PathRng& rng) const noexcept;
    /// Largest possible claim, if bounded.
    std::optional<std::int64_t> max_claim() const noexcept { return max_claim_; }

private:
    static constexpr std::size_t kGuideSize = 64;
    static constexpr double kGeometricTableTail = 1e-4;

    std::vector<double> cdf_;
    std::vector<double> survival_;  ///< geometric: q^(k+1)
    std::vector<std::uint32_t> guide_;
    double log_q_ = 0.0;
    bool geometric_ = false;
    std::optional<std::int64_t> max_claim_;
};

/**
 * max_{1<=n<=horizon} S_n for S_n = sum_{i<=n} (X_i - kappa), one entry per path.
 * The walk is integer valued. A path stops early when its maximum can no
 * longer change, or once it reaches `cap` (then the entry is only known to be >= cap).
 * Results do not depend on `threads`.
 */
std::vector<std::int64_t> simulate_supremum(const ClaimDistribution& dist, int kappa, std::int64_t paths,
                                            std::int64_t horizon, std::uint64_t seed,
                                            std::optional<std::int64_t> cap = std::nullopt, int threads = 1);

struct McEstimate {
    std::vector<int> u;
    std::vector<double> phi_hat;
    std::vector<double> std_err;
    std::int64_t paths = 0;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
};

/// phi_hat(u) = fraction of paths with max S_n < u over the horizon.
McEstimate estimate_from_supremum(std::span<const std::int64_t> sup, std::span<const int> u, std::int64_t horizon,
                                  std::uint64_t seed);

/// Throws NetProfitViolation when E X >= kappa.
McEstimate mc_survival(const ClaimDistribution& dist, int kappa, std::span<const int> u, std::int64_t paths,
                       std::int64_t horizon, std::uint64_t seed, int threads = 1);

struct StationarityReport {
    double tv = 0.0;           ///< total variation between the laws of M and (M + X - kappa)^+
    double noise_level = 0.0;  ///< expected TV from sampling alone
    std::int64_t paths = 0;
    std::int64_t max_value = 0;
};

/// Each sampled M = (sup)^+ is pushed one step with a fresh claim.
StationarityReport stationarity_from_supremum(std::span<const std::int64_t> sup, const ClaimDistribution& dist,
                                              int kappa, std::uint64_t seed);

StationarityReport mc_stationarity_check(const ClaimDistribution& dist, int kappa, std::int64_t paths,
                                         std::int64_t horizon, std::uint64_t seed, int threads = 1);

struct BetaGammaLimits {
    double phi0 = 0.0;
    double phi1 = 0.0;
    double gap = 0.0;  ///< last Cauchy gap of the two ratio sequences
    int iterations = 0;
    long precision_bits = 0;
};

/**
 * phi(0), phi(1) for kappa = 2 as limits of ratios built from
 *   beta_0 = 1, beta_1 = 0, gamma_0 = 0, gamma_1 = 1,
 *   beta_n = (beta_{n-2} - sum_{i=1}^{n-1} x_{n-i} beta_i) / x_0  (gamma alike).
 * Both sequences grow geometrically, so the iteration runs in MPFR with
 * precision proportional to n_max. Stops once the gap is below `stop_gap`;
 * throws NonConvergence when it is still >= 1e-8 at n_max.
 */
BetaGammaLimits beta_gamma_limits(const ClaimDistribution& dist, int n_max = 6000, double stop_gap = 1e-13);

/// max over s of |G_M(s)(s^kappa - G_X(s)) - sum_i pi_i sum_{j<=kappa-1-i} x_j (s^kappa - s^{i+j})|
/// with G_M truncated to the supplied pi_0..pi_n.
double identity_residual(std::span<const double> pi_ext, const ClaimDistribution& dist, int kappa,
                         std::span<const Complex> points);

/// n points equally spaced on |s| = radius, starting at angle offset.
std::vector<Complex> circle_points(int n, double radius, double offset = 0.1);

}  // namespace ruin
