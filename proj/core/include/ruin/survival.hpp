#pragma once

#include "ruin/char_roots.hpp"
#include "ruin/distribution.hpp"
#include "ruin/pi_solver.hpp"

#include <vector>

namespace ruin {

enum class SurvivalMethod { Recurrence, ClosedForm, PiSum, SeriesDivision, Trivial };

/// phi(0)..phi(U), the ultimate-time survival probabilities.
struct SurvivalTable {
    std::vector<double> phi;
    int kappa = 1;
    SurvivalMethod method = SurvivalMethod::Recurrence;
};

/// phi(u, T) for u = 0..u_max and T = 1..t_max.
struct FiniteTimeGrid {
    int u_max = 0;
    int t_max = 0;
    std::vector<double> values;  ///< (T - 1) * (u_max + 1) + u

    double at(int u, int t) const { return values[static_cast<std::size_t>((t - 1) * (u_max + 1) + u)]; }
};

/**
 * Dynamic programme over the first claim:
 *   phi(u, 1) = F_X(u + kappa - 1),
 *   phi(u, T) = sum_{j=0}^{u+kappa-1} x_j phi(u + kappa - j, T - 1).
 * Geometric laws are cut where the tail drops below 1e-18.
 */
FiniteTimeGrid finite_time_grid(const ClaimDistribution& dist, int kappa, int u_max, int t_max);
double finite_time_survival(const ClaimDistribution& dist, int kappa, int u, int t);

/**
 * phi(1..kappa) from partial sums of pi, phi(0) = sum pi_i F_X(kappa - 1 - i),
 * then x_0 phi(u + kappa) = phi(u) - sum_{i=1}^{u+kappa-1} x_{u+kappa-i} phi(i).
 * The forward step amplifies rounding by roughly 1/min|alpha| per index.
 * Throws RecurrenceBlowup once a value leaves [-tol, 1 + tol].
 */
SurvivalTable ultimate_from_pi(const PiVector& pi, const ClaimDistribution& dist, int kappa, int u_max,
                               double tol = 1e-8);

/// phi(0)..phi(kappa) from the roots alone. Simple roots only.
std::vector<double> initial_values_closed_form(const RootSet& roots, const ClaimDistribution& dist, int kappa);

/// Xi(s) = sum_i pi_i sum_{j<=kappa-1-i} s^{i+j} F_X(j) / (G_X(s) - s^kappa), |s| < 1.
Complex xi_eval(const PiVector& pi, const ClaimDistribution& dist, int kappa, Complex s);

/// Xi(s) for kappa = 1 and kappa = 2 without solving for pi. Throws UnsupportedKappa otherwise.
Complex xi_special(const ClaimDistribution& dist, int kappa, Complex s, const Tolerances& tol = {});

struct XiSeries {
    std::vector<double> coefficients;  ///< phi(1)..phi(U + 1)
    double guard = 0.0;                ///< remainder of the exact divisions; rounding level when healthy
};

/// Taylor coefficients of Xi by power-series division after the common
/// factor of numerator and denominator has been divided out exactly.
XiSeries xi_coefficients(const PiVector& pi, const ClaimDistribution& dist, int kappa, int u_max);

/// X = kappa almost surely: the surplus stays at u, so phi(0) = 0 and phi(u) = 1 otherwise.
SurvivalTable trivial_survival_table(int kappa, int u_max);

/// Table from xi_coefficients with phi(0) prepended.
SurvivalTable ultimate_from_series(const PiVector& pi, const ClaimDistribution& dist, int kappa, int u_max);

/// Largest u for which the forward recurrence keeps error below `target`, given
/// the smallest root modulus and x_0.
int recurrence_horizon(const RootSet& roots, double x0, double target = 1e-10);

}  // namespace ruin
