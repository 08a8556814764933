#pragma once

#include "ruin/char_roots.hpp"
#include "ruin/config.hpp"
#include "ruin/distribution.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ruin {

/// What a row of the boundary system encodes.
struct RowKind {
    enum class Type { Root, Moment };
    Type type = Type::Moment;
    std::size_t root_index = 0;  ///< index into RootSet::roots
    int derivative_order = 0;    ///< m-th derivative of the row polynomial at the root
};

/**
 * Square system A pi = b for the boundary probabilities pi_0..pi_{kappa-1} of
 * M = sup_n (sum (X_i - kappa))^+.
 *
 * Each root alpha of multiplicity l contributes rows m = 0..l-1 with entries
 *   A[r][i] = d^m/ds^m sum_{j=0}^{kappa-1-i} s^{i+j} F_X(j)  at s = alpha,
 * and the last row is the moment identity
 *   sum_i pi_i sum_{j<=kappa-1-i} x_j (kappa - i - j) = kappa - E X.
 */
struct LinearSystem {
    int size = 0;
    std::vector<Complex> a;  ///< row-major size x size
    std::vector<Complex> b;
    std::vector<RowKind> rows;

    Complex& at(int r, int c) { return a[static_cast<std::size_t>(r * size + c)]; }
    const Complex& at(int r, int c) const { return a[static_cast<std::size_t>(r * size + c)]; }
};

struct PiVector {
    std::vector<double> pi;
    double residual = 0.0;   ///< max |A pi - b| for the returned real pi
    double imag_leak = 0.0;  ///< largest |Im pi_i| dropped
};

/// Row entries of the value row (derivative_order = 0) or its m-th derivative at s.
std::vector<Complex> root_row(const ClaimDistribution& dist, int kappa, Complex s, int derivative_order);
std::vector<double> moment_row(const ClaimDistribution& dist, int kappa);

/// Expects the reduced model (x_0 > 0) and a RootSet with total multiplicity kappa - 1.
LinearSystem assemble_system(const ClaimDistribution& dist, int kappa, const RootSet& roots);

Complex determinant(const LinearSystem& sys);

/// Complex LU with partial pivoting. Throws SingularSystem or ImagLeak.
PiVector solve_pi(const LinearSystem& sys, const Tolerances& tol);

/// e_0..e_n of the values (e_0 = 1).
std::vector<Complex> elementary_symmetric(std::span<const Complex> values);

/// Product-form solution valid for simple roots; throws MultipleRootsUnsupported otherwise.
PiVector pi_closed_form(const ClaimDistribution& dist, int kappa, const RootSet& roots);

/// |det A - D| / |D| with D = x0^kappa / (-1)^(kappa+1) prod(a_j - 1) prod_{i<j}(a_j - a_i).
double determinant_identity_check(const LinearSystem& sys, const RootSet& roots, double x0);

/**
 * Generating function of M after cancelling the factor it shares with
 * s^kappa - G_X(s): G_M(s) = numerator(s) / denominator(s), where the
 * denominator has no zeros in the open unit disk. `guard` is the largest
 * remainder met in the two exact polynomial divisions, relative to the
 * dividend scale; it should sit at rounding level.
 */
struct MaximumPgf {
    std::vector<double> numerator;
    std::vector<double> denominator;
    double guard = 0.0;
};

MaximumPgf maximum_pgf(const PiVector& pi, const ClaimDistribution& dist, int kappa);

enum class PiExtension {
    Recurrence,  ///< pi_n x_0 = pi_{n-kappa} - sum_{i<n} pi_i x_{n-i}; unstable for long runs
    Deflated,    ///< Taylor coefficients of maximum_pgf(); stable
};

/// pi_0..pi_{n_max}. Throws NegativePi when a value leaves [-tol, 1 + tol].
std::vector<double> extend_pi(const PiVector& pi, const ClaimDistribution& dist, int kappa, std::size_t n_max,
                              PiExtension method = PiExtension::Recurrence, double tol = 1e-8);

}  // namespace ruin
