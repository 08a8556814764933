#include "ruin/survival.hpp"

#include "ruin/error.hpp"
#include "ruin/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ruin {

namespace {

constexpr double kFiniteTimeTail = 1e-18;

std::vector<double> claim_table(const ClaimDistribution& dist) {
    if (dist.is_finite()) {
        const auto p = dist.probabilities();
        return {p.begin(), p.end()};
    }
    return dist.truncate(kFiniteTimeTail).pmf;
}

void check_kappa(int kappa) {
    if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 1");
}

}  // namespace

FiniteTimeGrid finite_time_grid(const ClaimDistribution& dist, int kappa, int u_max, int t_max) {
    check_kappa(kappa);
    if (u_max < 0 || t_max < 1) throw Error(ErrorCode::InvalidArgument, "need u_max >= 0 and t_max >= 1");
    const auto x = claim_table(dist);
    const auto width = static_cast<std::size_t>(u_max + 1);

    FiniteTimeGrid grid{u_max, t_max, std::vector<double>(width * static_cast<std::size_t>(t_max))};

    // Step t needs levels up to u_max + kappa (t_max - t).
    auto levels = [&](int t) {
        return static_cast<std::size_t>(u_max) + static_cast<std::size_t>(kappa) * static_cast<std::size_t>(t_max - t) + 1;
    };
    std::vector<double> prev(levels(1));
    for (std::size_t v = 0; v < prev.size(); ++v) prev[v] = dist.cdf(v + static_cast<std::size_t>(kappa) - 1);
    std::copy_n(prev.begin(), width, grid.values.begin());

    std::vector<double> next;
    for (int t = 2; t <= t_max; ++t) {
        next.assign(levels(t), 0.0);
        for (std::size_t v = 0; v < next.size(); ++v) {
            const std::size_t top = v + static_cast<std::size_t>(kappa);
            const std::size_t jmax = std::min(top - 1, x.size() - 1);
            double acc = 0.0;
            for (std::size_t j = 0; j <= jmax; ++j) acc += x[j] * prev[top - j];
            next[v] = acc;
        }
        std::copy_n(next.begin(), width, grid.values.begin() + static_cast<std::ptrdiff_t>(width) * (t - 1));
        prev.swap(next);
    }
    return grid;
}

double finite_time_survival(const ClaimDistribution& dist, int kappa, int u, int t) {
    return finite_time_grid(dist, kappa, u, t).at(u, t);
}

SurvivalTable ultimate_from_pi(const PiVector& pi, const ClaimDistribution& dist, int kappa, int u_max, double tol) {
    check_kappa(kappa);
    const auto k = static_cast<std::size_t>(kappa);
    if (pi.pi.size() != k) throw Error(ErrorCode::InvalidArgument, "pi must have kappa entries");
    const double x0 = dist.pmf(0);
    if (!(x0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "recurrence divides by x_0; reduce the support first");

    const std::size_t n = std::max<std::size_t>(static_cast<std::size_t>(u_max), k) + 1;
    std::vector<double> phi(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) phi[0] += pi.pi[i] * dist.cdf(k - 1 - i);
    double partial = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
        partial += pi.pi[u];
        phi[u + 1] = partial;
    }
    std::vector<double> x(n + k);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = dist.pmf(j);
    for (std::size_t u = 1; u + k < n; ++u) {
        double acc = phi[u];
        for (std::size_t i = 1; i < u + k; ++i) acc -= x[u + k - i] * phi[i];
        phi[u + k] = acc / x0;
    }
    for (std::size_t u = 0; u < n; ++u) {
        if (!(phi[u] >= -tol && phi[u] <= 1.0 + tol)) {
            std::ostringstream msg;
            msg << "phi(" << u << ") = " << phi[u] << " left [0, 1]; forward recurrence lost accuracy";
            throw Error(ErrorCode::RecurrenceBlowup, msg.str());
        }
    }
    phi.resize(static_cast<std::size_t>(u_max) + 1);
    return {std::move(phi), kappa, SurvivalMethod::Recurrence};
}

std::vector<double> initial_values_closed_form(const RootSet& roots, const ClaimDistribution& dist, int kappa) {
    check_kappa(kappa);
    if (!roots.all_simple()) {
        throw Error(ErrorCode::MultipleRootsUnsupported, "closed form needs simple roots; use the linear solve");
    }
    const auto alphas = roots.expanded();
    if (static_cast<int>(alphas.size()) != kappa - 1) {
        throw Error(ErrorCode::RootCountMismatch, "closed form needs kappa - 1 roots");
    }
    const double x0 = dist.pmf(0);
    const auto e = elementary_symmetric(alphas);
    Complex prod = 1.0;
    for (const auto& a : alphas) prod *= (a - 1.0);

    // phi~(u+1) = -(1/x0) sum_{i=1}^{u} F(u+1-i) phi~(i) + sum_{k<=u} (-1)^k e_{kappa-1-k} / (x0 prod)
    std::vector<Complex> scaled(static_cast<std::size_t>(kappa) + 1);
    scaled[0] = (kappa % 2 == 1 ? 1.0 : -1.0) / prod;
    Complex signed_e{};
    for (int u = 0; u < kappa; ++u) {
        signed_e += (u % 2 == 0 ? 1.0 : -1.0) * e[static_cast<std::size_t>(kappa - 1 - u)];
        Complex acc = signed_e / (x0 * prod);
        for (int i = 1; i <= u; ++i) acc -= dist.cdf(static_cast<std::size_t>(u + 1 - i)) / x0 * scaled[static_cast<std::size_t>(i)];
        scaled[static_cast<std::size_t>(u + 1)] = acc;
    }
    const double gap = static_cast<double>(kappa) - dist.mean();
    std::vector<double> phi(scaled.size());
    std::transform(scaled.begin(), scaled.end(), phi.begin(), [gap](Complex v) { return gap * v.real(); });
    return phi;
}

Complex xi_eval(const PiVector& pi, const ClaimDistribution& dist, int kappa, Complex s) {
    check_kappa(kappa);
    if (std::abs(s) >= 1.0) throw Error(ErrorCode::DomainError, "Xi is evaluated inside the unit disk only");
    const Complex denom = dist.pgf(s) - std::pow(s, kappa);
    if (std::abs(denom) <= 1e-12) throw Error(ErrorCode::NearPole, "G_X(s) - s^kappa vanishes at s");
    Complex num{};
    for (int i = 0; i < kappa; ++i) {
        Complex inner{};
        for (int j = kappa - 1 - i; j >= 0; --j) inner = inner * s + dist.cdf(static_cast<std::size_t>(j));
        num += pi.pi[static_cast<std::size_t>(i)] * std::pow(s, i) * inner;
    }
    return num / denom;
}

Complex xi_special(const ClaimDistribution& dist, int kappa, Complex s, const Tolerances& tol) {
    if (std::abs(s) >= 1.0) throw Error(ErrorCode::DomainError, "Xi is evaluated inside the unit disk only");
    const double gap = static_cast<double>(kappa) - dist.mean();
    if (kappa == 1) return gap / (dist.pgf(s) - s);
    if (kappa != 2) throw Error(ErrorCode::UnsupportedKappa, "special forms exist for kappa = 1 and 2 only");
    if (dist.pmf(0) > 0.0) {
        const auto roots = find_unit_disk_roots(build_characteristic(dist, 2), tol);
        const Complex alpha = roots.roots.front().value;
        return gap / (alpha - 1.0) * (alpha - s) / (dist.pgf(s) - s * s);
    }
    // x_0 = 0: G~(s) = sum x_{i+1} s^i is the pgf of X - 1.
    return gap / (dist.shifted_down(1).pgf(s) - s);
}

XiSeries xi_coefficients(const PiVector& pi, const ClaimDistribution& dist, int kappa, int u_max) {
    check_kappa(kappa);
    if (u_max < 0) throw Error(ErrorCode::InvalidArgument, "u_max must be >= 0");
    const auto g = maximum_pgf(pi, dist, kappa);
    // Xi = G_M / (1 - s): coefficients of G_M summed.
    auto coeffs = poly::series_divide(std::span<const double>(g.numerator), std::span<const double>(g.denominator),
                                      static_cast<std::size_t>(u_max) + 1);
    std::partial_sum(coeffs.begin(), coeffs.end(), coeffs.begin());
    return {std::move(coeffs), g.guard};
}

SurvivalTable trivial_survival_table(int kappa, int u_max) {
    std::vector<double> phi(static_cast<std::size_t>(u_max) + 1, 1.0);
    phi[0] = 0.0;
    return {std::move(phi), kappa, SurvivalMethod::Trivial};
}

SurvivalTable ultimate_from_series(const PiVector& pi, const ClaimDistribution& dist, int kappa, int u_max) {
    const auto k = static_cast<std::size_t>(kappa);
    std::vector<double> phi(static_cast<std::size_t>(u_max) + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) phi[0] += pi.pi[i] * dist.cdf(k - 1 - i);
    if (u_max > 0) {
        const auto xi = xi_coefficients(pi, dist, kappa, u_max - 1);
        std::copy(xi.coefficients.begin(), xi.coefficients.end(), phi.begin() + 1);
    }
    return {std::move(phi), kappa, SurvivalMethod::SeriesDivision};
}

int recurrence_horizon(const RootSet& roots, double x0, double target) {
    constexpr int kUnbounded = 1 << 20;
    double r_min = 1.0;
    for (const auto& r : roots.roots) r_min = std::min(r_min, std::abs(r.value));
    if (r_min >= 1.0 - 1e-12) return kUnbounded;
    const double budget = std::log(target * x0 / std::numeric_limits<double>::epsilon());
    if (budget <= 0.0) return 0;
    return static_cast<int>(std::min<double>(kUnbounded, std::floor(budget / std::log(1.0 / r_min))));
}

}  // namespace ruin
