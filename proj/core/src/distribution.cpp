#include "ruin/distribution.hpp"

#include "ruin/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace ruin {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NetProfitViolation: return "NetProfitViolation";
        case ErrorCode::ReductionError: return "ReductionError";
        case ErrorCode::RootCountMismatch: return "RootCountMismatch";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::AmbiguousCluster: return "AmbiguousCluster";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ImagLeak: return "ImagLeak";
        case ErrorCode::MultipleRootsUnsupported: return "MultipleRootsUnsupported";
        case ErrorCode::NegativePi: return "NegativePi";
        case ErrorCode::RecurrenceBlowup: return "RecurrenceBlowup";
        case ErrorCode::NearPole: return "NearPole";
        case ErrorCode::UnsupportedKappa: return "UnsupportedKappa";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {

constexpr double kNormTolerance = 1e-12;

void check_trunc_eps(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "truncation epsilon must lie in (0, 1)");
    }
}

}  // namespace

ClaimDistribution ClaimDistribution::finite(std::vector<double> probabilities, double trunc_eps) {
    check_trunc_eps(trunc_eps);
    if (probabilities.empty()) {
        throw Error(ErrorCode::InvalidArgument, "finite pmf needs at least one probability");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        const double pk = probabilities[k];
        if (!std::isfinite(pk) || pk < 0.0) {
            std::ostringstream msg;
            msg << "pmf entry " << k << " is negative or not finite (" << pk << ")";
            throw Error(ErrorCode::InvalidArgument, msg.str());
        }
        total += pk;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "pmf sums to " << total << ", expected 1 within " << kNormTolerance;
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    for (auto& pk : probabilities) pk /= total;
    while (probabilities.size() > 1 && probabilities.back() == 0.0) probabilities.pop_back();

    ClaimDistribution d;
    d.kind_ = Kind::FinitePmf;
    d.trunc_eps_ = trunc_eps;
    d.pmf_ = std::move(probabilities);
    d.cdf_.resize(d.pmf_.size());
    std::partial_sum(d.pmf_.begin(), d.pmf_.end(), d.cdf_.begin());
    // The last partial sum is 1 by construction; pin it so cdf(u) == 1 past the support.
    d.cdf_.back() = 1.0;
    double mean = 0.0;
    for (std::size_t k = 1; k < d.pmf_.size(); ++k) mean += static_cast<double>(k) * d.pmf_[k];
    d.mean_ = mean;
    d.min_support_ = 0;
    while (d.pmf_[d.min_support_] == 0.0) ++d.min_support_;
    return d;
}

ClaimDistribution ClaimDistribution::geometric(double p, double trunc_eps) {
    check_trunc_eps(trunc_eps);
    if (!(p > 0.0) || !(p < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "geometric parameter p must lie in (0, 1)");
    }
    ClaimDistribution d;
    d.kind_ = Kind::Geometric;
    d.trunc_eps_ = trunc_eps;
    d.p_ = p;
    d.mean_ = (1.0 - p) / p;
    d.min_support_ = 0;
    return d;
}

double ClaimDistribution::pmf(std::size_t k) const noexcept {
    if (kind_ == Kind::Geometric) return p_ * std::pow(1.0 - p_, static_cast<double>(k));
    return k < pmf_.size() ? pmf_[k] : 0.0;
}

double ClaimDistribution::cdf(std::size_t u) const noexcept {
    if (kind_ == Kind::Geometric) return 1.0 - std::pow(1.0 - p_, static_cast<double>(u) + 1.0);
    return u < cdf_.size() ? cdf_[u] : 1.0;
}

Complex ClaimDistribution::pgf(Complex s) const {
    if (kind_ == Kind::Geometric) {
        const double q = 1.0 - p_;
        if (std::abs(s) * q >= 1.0) {
            throw Error(ErrorCode::DomainError, "geometric pgf diverges for |s| >= 1/(1-p)");
        }
        return p_ / (1.0 - q * s);
    }
    Complex acc{0.0, 0.0};
    for (auto it = pmf_.rbegin(); it != pmf_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double ClaimDistribution::success_probability() const {
    if (kind_ != Kind::Geometric) {
        throw Error(ErrorCode::InvalidArgument, "success probability is defined for geometric laws only");
    }
    return p_;
}

std::optional<std::size_t> ClaimDistribution::max_support() const noexcept {
    if (kind_ == Kind::Geometric) return std::nullopt;
    return pmf_.size() - 1;
}

TruncatedPmf ClaimDistribution::truncate(double eps) const {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation epsilon must be positive");
    if (kind_ == Kind::FinitePmf) return {pmf_, 0.0};

    // Smallest m with (1-p)^(m+1) <= eps; the slack absorbs pow() rounding at exact powers.
    const double q = 1.0 - p_;
    std::size_t m = 0;
    double tail = q;
    while (tail > eps * (1.0 + 1e-9)) {
        ++m;
        tail = std::pow(q, static_cast<double>(m) + 1.0);
    }
    TruncatedPmf out;
    out.pmf.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) out.pmf[k] = pmf(k);
    out.tail = tail;
    return out;
}

ClaimDistribution ClaimDistribution::truncated_law(double eps) const {
    if (kind_ == Kind::FinitePmf) return *this;
    auto cut = truncate(eps);
    const double mass = 1.0 - cut.tail;
    for (auto& pk : cut.pmf) pk /= mass;
    return finite(std::move(cut.pmf), trunc_eps_);
}

ClaimDistribution ClaimDistribution::shifted_down(std::size_t shift) const {
    if (shift == 0) return *this;
    if (shift > min_support_) {
        throw Error(ErrorCode::InvalidArgument, "cannot shift a law below its minimal support point");
    }
    // Geometric laws have min_support 0, so only finite laws reach here.
    return finite(std::vector<double>(pmf_.begin() + static_cast<std::ptrdiff_t>(shift), pmf_.end()),
                  trunc_eps_);
}

int lattice_span(const ClaimDistribution& dist, int kappa) {
    if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 1");
    if (!dist.is_finite()) return 1;
    int g = kappa;
    const auto probs = dist.probabilities();
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > 0.0) g = std::gcd(g, static_cast<int>(i));
    }
    return g;
}

NetProfitCheck check_net_profit(const ClaimDistribution& dist, int kappa) {
    if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 1");
    NetProfitCheck out{NetProfitVerdict::Ok, dist.mean(), kappa};
    if (dist.is_finite() && std::abs(dist.pmf(static_cast<std::size_t>(kappa)) - 1.0) <= kNormTolerance) {
        out.verdict = NetProfitVerdict::TrivialSurvival;
    } else if (!(dist.mean() < static_cast<double>(kappa))) {
        out.verdict = NetProfitVerdict::Violation;
    }
    return out;
}

void require_net_profit(const ClaimDistribution& dist, int kappa) {
    const auto check = check_net_profit(dist, kappa);
    if (check.verdict == NetProfitVerdict::Violation) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "net profit condition E X < kappa fails (E X = " << check.mean << ", kappa = " << kappa
            << "); survival is impossible";
        throw Error(ErrorCode::NetProfitViolation, msg.str());
    }
}

}  // namespace ruin
