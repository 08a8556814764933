#include "ruin/pi_solver.hpp"

#include "ruin/error.hpp"
#include "ruin/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ruin {

namespace {

using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

MatrixXc to_eigen(const LinearSystem& sys) {
    MatrixXc m(sys.size, sys.size);
    for (int r = 0; r < sys.size; ++r)
        for (int c = 0; c < sys.size; ++c) m(r, c) = sys.at(r, c);
    return m;
}

double falling_factorial(int k, int m) {
    double out = 1.0;
    for (int t = 0; t < m; ++t) out *= static_cast<double>(k - t);
    return out;
}

void require_square(const LinearSystem& sys) {
    if (sys.size < 1 || sys.a.size() != static_cast<std::size_t>(sys.size * sys.size) ||
        sys.b.size() != static_cast<std::size_t>(sys.size)) {
        throw Error(ErrorCode::InvalidArgument, "malformed linear system");
    }
}

}  // namespace

std::vector<Complex> root_row(const ClaimDistribution& dist, int kappa, Complex s, int derivative_order) {
    std::vector<Complex> row(static_cast<std::size_t>(kappa), Complex{});
    for (int i = 0; i < kappa; ++i) {
        Complex acc{};
        // Horner over k = kappa-1 down to max(i, m) of F(k-i) k!/(k-m)! s^(k-m).
        for (int k = kappa - 1; k >= std::max(i, derivative_order); --k) {
            acc = acc * s + dist.cdf(static_cast<std::size_t>(k - i)) * falling_factorial(k, derivative_order);
        }
        const int lowest = std::max(i, derivative_order) - derivative_order;
        row[static_cast<std::size_t>(i)] = acc * std::pow(s, lowest);
    }
    return row;
}

std::vector<double> moment_row(const ClaimDistribution& dist, int kappa) {
    std::vector<double> row(static_cast<std::size_t>(kappa), 0.0);
    for (int i = 0; i < kappa; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= kappa - 1 - i; ++j) acc += dist.pmf(static_cast<std::size_t>(j)) * (kappa - i - j);
        row[static_cast<std::size_t>(i)] = acc;
    }
    return row;
}

LinearSystem assemble_system(const ClaimDistribution& dist, int kappa, const RootSet& roots) {
    if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 1");
    if (roots.total_multiplicity() != kappa - 1) {
        std::ostringstream msg;
        msg << "root set carries " << roots.total_multiplicity() << " roots, system needs " << kappa - 1;
        throw Error(ErrorCode::RootCountMismatch, msg.str());
    }
    LinearSystem sys;
    sys.size = kappa;
    sys.a.assign(static_cast<std::size_t>(kappa * kappa), Complex{});
    sys.b.assign(static_cast<std::size_t>(kappa), Complex{});
    int r = 0;
    for (std::size_t ri = 0; ri < roots.roots.size(); ++ri) {
        for (int m = 0; m < roots.roots[ri].multiplicity; ++m, ++r) {
            const auto row = root_row(dist, kappa, roots.roots[ri].value, m);
            std::copy(row.begin(), row.end(), sys.a.begin() + r * kappa);
            sys.rows.push_back({RowKind::Type::Root, ri, m});
        }
    }
    const auto moments = moment_row(dist, kappa);
    std::copy(moments.begin(), moments.end(), sys.a.begin() + r * kappa);
    sys.rows.push_back({RowKind::Type::Moment, 0, 0});
    sys.b[static_cast<std::size_t>(r)] = static_cast<double>(kappa) - dist.mean();
    return sys;
}

Complex determinant(const LinearSystem& sys) {
    require_square(sys);
    return to_eigen(sys).partialPivLu().determinant();
}

PiVector solve_pi(const LinearSystem& sys, const Tolerances& tol) {
    require_square(sys);
    const MatrixXc a = to_eigen(sys);
    const Eigen::PartialPivLU<MatrixXc> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        std::ostringstream msg;
        msg << "reciprocal condition number " << rcond << " (roots inaccurate or repeated?)";
        throw Error(ErrorCode::SingularSystem, msg.str());
    }
    VectorXc b(sys.size);
    for (int i = 0; i < sys.size; ++i) b(i) = sys.b[static_cast<std::size_t>(i)];
    const VectorXc x = lu.solve(b);

    PiVector out;
    out.pi.resize(static_cast<std::size_t>(sys.size));
    VectorXc real_x(sys.size);
    for (int i = 0; i < sys.size; ++i) {
        out.imag_leak = std::max(out.imag_leak, std::abs(x(i).imag()));
        out.pi[static_cast<std::size_t>(i)] = x(i).real();
        real_x(i) = x(i).real();
    }
    if (out.imag_leak > tol.real) {
        std::ostringstream msg;
        msg << "imaginary part " << out.imag_leak << " exceeds tol_real = " << tol.real;
        throw Error(ErrorCode::ImagLeak, msg.str());
    }
    out.residual = (a * real_x - b).cwiseAbs().maxCoeff();
    return out;
}

std::vector<Complex> elementary_symmetric(std::span<const Complex> values) {
    std::vector<Complex> e(values.size() + 1, Complex{});
    e[0] = 1.0;
    for (std::size_t n = 0; n < values.size(); ++n)
        for (std::size_t k = n + 1; k >= 1; --k) e[k] += values[n] * e[k - 1];
    return e;
}

PiVector pi_closed_form(const ClaimDistribution& dist, int kappa, const RootSet& roots) {
    if (!roots.all_simple()) {
        throw Error(ErrorCode::MultipleRootsUnsupported, "closed form needs simple roots; use solve_pi");
    }
    const auto alphas = roots.expanded();
    if (static_cast<int>(alphas.size()) != kappa - 1) {
        throw Error(ErrorCode::RootCountMismatch, "closed form needs kappa - 1 roots");
    }
    const double x0 = dist.pmf(0);
    const auto e = elementary_symmetric(alphas);
    Complex denom = x0;
    for (const auto& a : alphas) denom *= (a - 1.0);

    // x0 pt_k = (-1)^k e_{kappa-1-k} / prod(a_j - 1) - sum_{i<k} F(k-i) pt_i
    std::vector<Complex> scaled(static_cast<std::size_t>(kappa));
    for (int k = 0; k < kappa; ++k) {
        Complex acc = (k % 2 == 0 ? 1.0 : -1.0) * e[static_cast<std::size_t>(kappa - 1 - k)] / denom;
        for (int i = 0; i < k; ++i) acc -= dist.cdf(static_cast<std::size_t>(k - i)) / x0 * scaled[static_cast<std::size_t>(i)];
        scaled[static_cast<std::size_t>(k)] = acc;
    }
    const double gap = static_cast<double>(kappa) - dist.mean();
    PiVector out;
    out.pi.resize(static_cast<std::size_t>(kappa));
    for (int k = 0; k < kappa; ++k) {
        const Complex v = gap * scaled[static_cast<std::size_t>(k)];
        out.pi[static_cast<std::size_t>(k)] = v.real();
        out.imag_leak = std::max(out.imag_leak, std::abs(v.imag()));
    }
    return out;
}

double determinant_identity_check(const LinearSystem& sys, const RootSet& roots, double x0) {
    if (!roots.all_simple()) {
        throw Error(ErrorCode::MultipleRootsUnsupported, "determinant identity holds for simple roots only");
    }
    const auto alphas = roots.expanded();
    const int kappa = sys.size;
    Complex formula = std::pow(x0, kappa) * (kappa % 2 == 1 ? 1.0 : -1.0);
    for (const auto& a : alphas) formula *= (a - 1.0);
    for (std::size_t j = 0; j < alphas.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) formula *= (alphas[j] - alphas[i]);
    return std::abs(determinant(sys) - formula) / std::abs(formula);
}

MaximumPgf maximum_pgf(const PiVector& pi, const ClaimDistribution& dist, int kappa) {
    if (static_cast<int>(pi.pi.size()) != kappa) throw Error(ErrorCode::InvalidArgument, "pi must have kappa entries");
    // P(s) = sum_k s^k sum_{i<=k} pi_i F(k-i) vanishes exactly at the unit-disk roots.
    std::vector<double> p(static_cast<std::size_t>(kappa), 0.0);
    for (int k = 0; k < kappa; ++k)
        for (int i = 0; i <= k; ++i) p[static_cast<std::size_t>(k)] += pi.pi[static_cast<std::size_t>(i)] * dist.cdf(static_cast<std::size_t>(k - i));
    const double lead = p.back();
    if (!(lead > 0.0)) throw Error(ErrorCode::InvalidArgument, "survival numerator has a non-positive leading coefficient");
    for (auto& c : p) c /= lead;

    const auto q = build_characteristic(dist, kappa);
    std::vector<double> neg_q(q.coeffs.size());
    std::transform(q.coeffs.begin(), q.coeffs.end(), neg_q.begin(), [](double c) { return -c; });

    MaximumPgf out;
    const auto first = poly::divide(std::span<const double>(neg_q), std::span<const double>(p));
    double rem = 0.0;
    for (double r : first.remainder) rem = std::max(rem, std::abs(r));
    out.guard = rem / q.scale();

    const auto second = poly::deflate(std::span<const double>(first.quotient), 1.0);
    double qscale = 0.0;
    for (double c : first.quotient) qscale += std::abs(c);
    out.guard = std::max(out.guard, std::abs(second.remainder) / qscale);

    out.denominator = second.quotient;
    out.numerator.resize(q.pgf_denominator.size());
    std::transform(q.pgf_denominator.begin(), q.pgf_denominator.end(), out.numerator.begin(),
                   [lead](double w) { return -lead * w; });
    return out;
}

std::vector<double> extend_pi(const PiVector& pi, const ClaimDistribution& dist, int kappa, std::size_t n_max,
                              PiExtension method, double tol) {
    const auto k = static_cast<std::size_t>(kappa);
    if (pi.pi.size() != k) throw Error(ErrorCode::InvalidArgument, "pi must have kappa entries");
    const double x0 = dist.pmf(0);
    if (!(x0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "extension divides by x_0; reduce the support first");

    std::vector<double> out;
    if (method == PiExtension::Deflated) {
        const auto g = maximum_pgf(pi, dist, kappa);
        out = poly::series_divide(std::span<const double>(g.numerator), std::span<const double>(g.denominator), n_max + 1);
    } else {
        out.assign(n_max + 1, 0.0);
        std::copy_n(pi.pi.begin(), std::min(k, n_max + 1), out.begin());
        std::vector<double> x(n_max + 1);
        for (std::size_t j = 0; j <= n_max; ++j) x[j] = dist.pmf(j);
        for (std::size_t n = k; n <= n_max; ++n) {
            double acc = out[n - k];
            if (n == k) {
                acc = out[0];
                for (std::size_t i = 0; i < k; ++i) acc -= out[i] * dist.cdf(k - i);
            } else {
                for (std::size_t i = 0; i < n; ++i) acc -= out[i] * x[n - i];
            }
            out[n] = acc / x0;
        }
    }
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (out[n] < -tol || out[n] > 1.0 + tol || !std::isfinite(out[n])) {
            std::ostringstream msg;
            msg << "pi_" << n << " = " << out[n] << " left [-" << tol << ", 1 + " << tol << "]";
            throw Error(ErrorCode::NegativePi, msg.str());
        }
    }
    return out;
}

}  // namespace ruin
