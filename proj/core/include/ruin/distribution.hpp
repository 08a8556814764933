#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ruin {

using Complex = std::complex<double>;

inline constexpr double kDefaultTruncEps = 1e-14;

/// A finite prefix p_0..p_m of an integer law plus the mass it leaves out.
struct TruncatedPmf {
    std::vector<double> pmf;
    double tail = 0.0;
};

/**
 * Law of a single claim X on {0, 1, 2, ...}.
 *
 * Either an explicit finite pmf or a geometric law P(X = k) = p (1 - p)^k.
 * Immutable after construction; cdf table and mean are computed once, so a
 * distribution can be shared across threads freely.
 */
class ClaimDistribution {
public:
    enum class Kind { FinitePmf, Geometric };

    /// Probabilities must be non-negative and sum to 1 within 1e-12; they are
    /// rescaled to sum to exactly 1 up to rounding. Trailing zeros are dropped.
    static ClaimDistribution finite(std::vector<double> probabilities,
                                    double trunc_eps = kDefaultTruncEps);
    static ClaimDistribution geometric(double p, double trunc_eps = kDefaultTruncEps);

    Kind kind() const noexcept { return kind_; }
    bool is_finite() const noexcept { return kind_ == Kind::FinitePmf; }

    double pmf(std::size_t k) const noexcept;
    double cdf(std::size_t u) const noexcept;
    /// Throws DomainError outside the radius of convergence (geometric only).
    Complex pgf(Complex s) const;
    double mean() const noexcept { return mean_; }
    double trunc_eps() const noexcept { return trunc_eps_; }

    /// Geometric success probability; throws InvalidArgument for finite laws.
    double success_probability() const;
    /// p_0..p_m for finite laws; empty for geometric.
    std::span<const double> probabilities() const noexcept { return pmf_; }

    std::size_t min_support() const noexcept { return min_support_; }
    std::optional<std::size_t> max_support() const noexcept;

    TruncatedPmf truncate(double eps) const;
    /// Finite law from truncate(eps), renormalised to unit mass.
    ClaimDistribution truncated_law(double eps) const;
    /// The law of X - shift. Requires shift <= min_support().
    ClaimDistribution shifted_down(std::size_t shift) const;

private:
    ClaimDistribution() = default;

    Kind kind_ = Kind::FinitePmf;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    double p_ = 0.0;
    double mean_ = 0.0;
    double trunc_eps_ = kDefaultTruncEps;
    std::size_t min_support_ = 0;
};

/// gcd of kappa and the positive support points. Zero contributes nothing.
int lattice_span(const ClaimDistribution& dist, int kappa);

enum class NetProfitVerdict { Ok, TrivialSurvival, Violation };

struct NetProfitCheck {
    NetProfitVerdict verdict = NetProfitVerdict::Ok;
    double mean = 0.0;
    int kappa = 1;

    bool ok() const noexcept { return verdict == NetProfitVerdict::Ok; }
};

/// E X < kappa is Ok. P(X = kappa) = 1 is reported as TrivialSurvival.
NetProfitCheck check_net_profit(const ClaimDistribution& dist, int kappa);

/// Throws NetProfitViolation when the verdict is Violation.
void require_net_profit(const ClaimDistribution& dist, int kappa);

}  // namespace ruin
