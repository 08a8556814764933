#pragma once

#include "ruin/config.hpp"
#include "ruin/distribution.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ruin {

/// Model with the common minimal claim m cancelled: X' = X - m, kappa' = kappa - m.
/// Survival probabilities of the reduced model equal those of the original.
struct ReducedModel {
    ClaimDistribution dist;
    int kappa = 1;
    int shift = 0;
};

/// Throws ReductionError when the minimal claim is >= kappa (then E X >= kappa).
ReducedModel reduce_support(const ClaimDistribution& dist, int kappa);

/**
 * Q(s) = s^kappa W(s) - N(s), where G_X(s) = N(s) / W(s).
 *
 * For a finite pmf W = 1 and N is the pmf polynomial. For the geometric law
 * N = p and W = 1 - (1-p) s, which keeps Q an exact polynomial of degree
 * kappa + 1. The roots of Q in the closed unit disk are exactly the roots of
 * s^kappa = G_X(s) there.
 */
struct CharPolynomial {
    std::vector<double> coeffs;           ///< Q, lowest degree first
    std::vector<double> pgf_denominator;  ///< W, lowest degree first
    int kappa = 1;
    int reduction_shift = 0;
    double trunc_tail = 0.0;

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    Complex operator()(Complex s) const;
    /// Sum |coeffs|, the scale used by residual tolerances.
    double scale() const noexcept;
};

/// Requires x_0 > 0 (apply reduce_support first).
CharPolynomial build_characteristic(const ClaimDistribution& dist, int kappa);
CharPolynomial build_characteristic(const ReducedModel& model);

struct Root {
    Complex value;
    int multiplicity = 1;
    bool on_boundary = false;
};

struct RootSet {
    std::vector<Root> roots;
    /// Set when clustering changed under a 10x change of the cluster tolerance.
    std::optional<std::string> ambiguity;

    int total_multiplicity() const noexcept;
    bool all_simple() const noexcept;
    bool has_boundary_root() const noexcept;
    /// Roots repeated by multiplicity, in RootSet order.
    std::vector<Complex> expanded() const;
};

enum class ClusterPolicy {
    Strict,  ///< throw AmbiguousCluster
    Warn,    ///< keep the nominal clustering and record RootSet::ambiguity
};

/// Simultaneous (Aberth-Ehrlich) iteration for all roots of a polynomial with
/// complex coefficients. Throws ConvergenceFailure after max_iter sweeps.
std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, int max_iter = 2000);

/// Merge nearby approximations of multiple roots, polish each cluster with
/// Newton on Q^(l-1) and enforce conjugate symmetry. Two approximations merge
/// when they are within tol.cluster or their Newton inclusion discs overlap.
RootSet cluster_multiplicities(std::span<const Complex> raw, const CharPolynomial& q,
                               const Tolerances& tol, ClusterPolicy policy = ClusterPolicy::Strict);

/// The kappa - 1 roots (with multiplicity) of Q in |s| <= 1 + tol.boundary, s != 1.
RootSet find_unit_disk_roots(const CharPolynomial& q, const Tolerances& tol,
                             ClusterPolicy policy = ClusterPolicy::Strict);

}  // namespace ruin
