#include "ruin/oracle.hpp"

#include "ruin/error.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace ruin {

namespace {

constexpr std::uint64_t kPushStream = 0x9e3779b97f4a7c15ULL;

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) noexcept : state_(mix(seed) ^ mix(path + 0x632be59bd9b4e019ULL)) {}

std::uint64_t PathRng::mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t PathRng::next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
}

double PathRng::uniform_open_closed() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

ClaimSampler::ClaimSampler(const ClaimDistribution& dist) {
    if (!dist.is_finite()) {
        geometric_ = true;
        log_q_ = std::log1p(-dist.success_probability());
        // X = k iff q^(k+1) < u <= q^k. Tabulate survival_[k] = q^(k+1) down to
        // kGeometricTableTail; smaller u falls back to floor(log u / log q).
        const double q = 1.0 - dist.success_probability();
        for (double s = q; s >= kGeometricTableTail; s *= q) survival_.push_back(s);
        if (survival_.empty()) return;
        guide_.resize(kGuideSize);
        std::size_t k = 0;
        for (std::size_t g = kGuideSize; g-- > 0;) {
            // First k with survival_[k] < (g + 1) / size; grows as g falls.
            const double level = static_cast<double>(g + 1) / static_cast<double>(kGuideSize);
            while (k < survival_.size() && survival_[k] >= level) ++k;
            guide_[g] = static_cast<std::uint32_t>(k);
        }
        return;
    }
    const auto p = dist.probabilities();
    cdf_.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) cdf_[k] = dist.cdf(k);
    cdf_.back() = 1.0;
    max_claim_ = static_cast<std::int64_t>(p.size()) - 1;

    // guide_[g] = first k with cdf_[k] >= g / size.
    const std::size_t size = std::max<std::size_t>(p.size(), 16);
    guide_.resize(size);
    std::size_t k = 0;
    for (std::size_t g = 0; g < size; ++g) {
        const double level = static_cast<double>(g) / static_cast<double>(size);
        while (cdf_[k] < level) ++k;
        guide_[g] = static_cast<std::uint32_t>(k);
    }
}

std::int64_t ClaimSampler::operator()(PathRng& rng) const noexcept {
    const double u = rng.uniform_open_closed();
    if (geometric_) {
        if (survival_.empty() || u <= survival_.back()) return static_cast<std::int64_t>(std::floor(std::log(u) / log_q_));
        const auto g = std::min(static_cast<std::size_t>(u * kGuideSize), kGuideSize - 1);
        std::size_t k = guide_[g];
        while (survival_[k] >= u) ++k;
        return static_cast<std::int64_t>(k);
    }
    const auto g = std::min(static_cast<std::size_t>(u * static_cast<double>(guide_.size())), guide_.size() - 1);
    std::size_t k = guide_[g];
    while (cdf_[k] < u) ++k;
    return static_cast<std::int64_t>(k);
}

std::vector<std::int64_t> simulate_supremum(const ClaimDistribution& dist, int kappa, std::int64_t paths,
                                            std::int64_t horizon, std::uint64_t seed,
                                            std::optional<std::int64_t> cap, int threads) {
    if (kappa < 1 || paths < 1 || horizon < 1) {
        throw Error(ErrorCode::InvalidArgument, "need kappa, paths and horizon >= 1");
    }
    const ClaimSampler sample(dist);
    std::optional<std::int64_t> max_step;
    if (sample.max_claim()) max_step = *sample.max_claim() - kappa;
    std::vector<std::int64_t> sup(static_cast<std::size_t>(paths));

    auto run = [&](std::int64_t first, std::int64_t last) {
        for (std::int64_t path = first; path < last; ++path) {
            PathRng rng(seed, static_cast<std::uint64_t>(path));
            std::int64_t s = 0;
            std::int64_t best = std::numeric_limits<std::int64_t>::min();
            for (std::int64_t n = 1; n <= horizon; ++n) {
                s += sample(rng) - kappa;
                best = std::max(best, s);
                if (cap && best >= *cap) break;
                if (max_step && s + (horizon - n) * std::max<std::int64_t>(*max_step, 0) <= best) break;
            }
            sup[static_cast<std::size_t>(path)] = best;
        }
    };

    const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, paths));
    if (workers == 1) {
        run(0, paths);
        return sup;
    }
    {
        std::vector<std::jthread> pool;
        const std::int64_t block = (paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t first = w * block;
            const std::int64_t last = std::min(paths, first + block);
            if (first < last) pool.emplace_back(run, first, last);
        }
    }
    return sup;
}

McEstimate estimate_from_supremum(std::span<const std::int64_t> sup, std::span<const int> u, std::int64_t horizon,
                                  std::uint64_t seed) {
    McEstimate out;
    out.u.assign(u.begin(), u.end());
    out.paths = static_cast<std::int64_t>(sup.size());
    out.horizon = horizon;
    out.seed = seed;
    const double n = static_cast<double>(sup.size());
    for (const int level : u) {
        const auto hits = std::count_if(sup.begin(), sup.end(), [level](std::int64_t m) { return m < level; });
        const double phi = static_cast<double>(hits) / n;
        out.phi_hat.push_back(phi);
        out.std_err.push_back(std::sqrt(phi * (1.0 - phi) / n));
    }
    return out;
}

McEstimate mc_survival(const ClaimDistribution& dist, int kappa, std::span<const int> u, std::int64_t paths,
                       std::int64_t horizon, std::uint64_t seed, int threads) {
    require_net_profit(dist, kappa);
    std::optional<std::int64_t> cap;
    if (!u.empty()) cap = *std::max_element(u.begin(), u.end());
    const auto sup = simulate_supremum(dist, kappa, paths, horizon, seed, cap, threads);
    return estimate_from_supremum(sup, u, horizon, seed);
}

StationarityReport stationarity_from_supremum(std::span<const std::int64_t> sup, const ClaimDistribution& dist,
                                              int kappa, std::uint64_t seed) {
    if (sup.empty()) throw Error(ErrorCode::InvalidArgument, "no sampled paths");
    const ClaimSampler sample(dist);
    std::vector<std::int64_t> m(sup.size()), pushed(sup.size());
    for (std::size_t p = 0; p < sup.size(); ++p) {
        m[p] = std::max<std::int64_t>(sup[p], 0);
        PathRng rng(seed ^ kPushStream, p);
        pushed[p] = std::max<std::int64_t>(m[p] + sample(rng) - kappa, 0);
    }
    const std::int64_t top = std::max(*std::max_element(m.begin(), m.end()), *std::max_element(pushed.begin(), pushed.end()));
    std::vector<double> a(static_cast<std::size_t>(top) + 1, 0.0), b(a.size(), 0.0);
    for (std::size_t p = 0; p < sup.size(); ++p) {
        a[static_cast<std::size_t>(m[p])] += 1.0;
        b[static_cast<std::size_t>(pushed[p])] += 1.0;
    }
    const double n = static_cast<double>(sup.size());
    StationarityReport out;
    out.paths = static_cast<std::int64_t>(sup.size());
    out.max_value = top;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double pa = a[k] / n, pb = b[k] / n;
        out.tv += 0.5 * std::abs(pa - pb);
        // E|N(0, 2 p (1 - p) / n)| per cell, treating the two samples as independent.
        const double pm = 0.5 * (pa + pb);
        out.noise_level += 0.5 * std::sqrt(4.0 * pm * (1.0 - pm) / (std::numbers::pi * n));
    }
    return out;
}

StationarityReport mc_stationarity_check(const ClaimDistribution& dist, int kappa, std::int64_t paths,
                                         std::int64_t horizon, std::uint64_t seed, int threads) {
    require_net_profit(dist, kappa);
    const auto sup = simulate_supremum(dist, kappa, paths, horizon, seed, std::nullopt, threads);
    return stationarity_from_supremum(sup, dist, kappa, seed);
}

BetaGammaLimits beta_gamma_limits(const ClaimDistribution& dist, int n_max, double stop_gap) {
    using boost::multiprecision::mpfr_float;
    const double x0 = dist.pmf(0);
    if (!(x0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta/gamma recurrences need x_0 > 0");
    if (!(dist.mean() < 2.0)) throw Error(ErrorCode::NetProfitViolation, "beta/gamma limits need E X < 2");
    if (n_max < 4) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 4");

    // |beta_n|, |gamma_n| grow at most like (1 + 1/x0)^n.
    const long bits = 96 + static_cast<long>(std::ceil(n_max * std::log2(1.0 + 1.0 / x0)));
    const auto digits10 = static_cast<unsigned>(std::ceil(static_cast<double>(bits) * std::log10(2.0)));
    const unsigned saved = mpfr_float::default_precision();
    mpfr_float::default_precision(digits10);

    const bool geometric = !dist.is_finite();
    const std::size_t support = geometric ? 0 : dist.probabilities().size();
    std::vector<mpfr_float> x;
    if (!geometric) {
        for (double v : dist.probabilities()) x.emplace_back(v);
    }
    const mpfr_float p = geometric ? mpfr_float(dist.success_probability()) : mpfr_float(0);
    const mpfr_float q = 1 - p;
    const mpfr_float inv_x0 = 1 / mpfr_float(x0);

    std::vector<mpfr_float> beta(static_cast<std::size_t>(n_max) + 2), gamma(beta.size());
    beta[0] = 1;
    beta[1] = 0;
    gamma[0] = 0;
    gamma[1] = 1;
    mpfr_float sum_beta = 0, sum_gamma = 0;  // geometric running sums of x_{n-i} * seq_i

    BetaGammaLimits out;
    out.precision_bits = bits;
    double prev0 = std::numeric_limits<double>::quiet_NaN(), prev1 = prev0;
    for (std::size_t n = 2; n < beta.size(); ++n) {
        if (geometric) {
            sum_beta = q * sum_beta + p * q * beta[n - 1];
            sum_gamma = q * sum_gamma + p * q * gamma[n - 1];
        } else {
            sum_beta = 0;
            sum_gamma = 0;
            for (std::size_t i = (n > support ? n - support + 1 : 1); i < n; ++i) {
                sum_beta += x[n - i] * beta[i];
                sum_gamma += x[n - i] * gamma[i];
            }
        }
        beta[n] = (beta[n - 2] - sum_beta) * inv_x0;
        gamma[n] = (gamma[n - 2] - sum_gamma) * inv_x0;

        const std::size_t m = n - 1;
        const mpfr_float det = beta[m] * gamma[n] - beta[n] * gamma[m];
        if (det == 0) continue;
        const double r0 = static_cast<double>((gamma[n] - gamma[m]) / det);
        const double r1 = static_cast<double>((beta[m] - beta[n]) / det);
        out.gap = std::max(std::abs(r0 - prev0), std::abs(r1 - prev1));
        out.phi0 = r0;
        out.phi1 = r1;
        out.iterations = static_cast<int>(m);
        prev0 = r0;
        prev1 = r1;
        if (out.gap < stop_gap) break;
    }
    mpfr_float::default_precision(saved);
    if (!(out.gap < 1e-8)) {
        std::ostringstream msg;
        msg << "Cauchy gap " << out.gap << " after " << out.iterations << " iterations";
        throw Error(ErrorCode::NonConvergence, msg.str());
    }
    return out;
}

double identity_residual(std::span<const double> pi_ext, const ClaimDistribution& dist, int kappa,
                         std::span<const Complex> points) {
    double worst = 0.0;
    for (const Complex s : points) {
        Complex gm{};
        for (auto it = pi_ext.rbegin(); it != pi_ext.rend(); ++it) gm = gm * s + *it;
        const Complex sk = std::pow(s, kappa);
        const Complex lhs = gm * (sk - dist.pgf(s));
        Complex rhs{};
        for (int i = 0; i < kappa && i < static_cast<int>(pi_ext.size()); ++i) {
            for (int j = 0; j <= kappa - 1 - i; ++j) {
                rhs += pi_ext[static_cast<std::size_t>(i)] * dist.pmf(static_cast<std::size_t>(j)) * (sk - std::pow(s, i + j));
            }
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

std::vector<Complex> circle_points(int n, double radius, double offset) {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out.push_back(std::polar(radius, offset + 2.0 * std::numbers::pi * k / n));
    return out;
}

}  // namespace ruin
