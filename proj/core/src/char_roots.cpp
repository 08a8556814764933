#include "ruin/char_roots.hpp"

#include "ruin/error.hpp"
#include "ruin/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ruin {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string describe(std::span<const Complex> zs) {
    std::ostringstream out;
    out.precision(10);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        out << (i ? ", " : "") << zs[i].real() << (zs[i].imag() < 0 ? "-" : "+") << std::abs(zs[i].imag())
            << "i (|.|=" << std::abs(zs[i]) << ")";
    }
    return out.str();
}

// Single-linkage partition: labels[i] is the cluster id of raw[i].
std::vector<int> partition(std::span<const Complex> raw, std::span<const double> radius, double tol) {
    const std::size_t n = raw.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::abs(raw[i] - raw[j]);
            if (d <= tol || d <= radius[i] + radius[j]) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
    }
    // Relabel by first occurrence so partitions compare equal when they are equal.
    std::vector<int> labels(n, -1);
    std::vector<int> map(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int r = find(static_cast<int>(i));
        if (map[r] < 0) map[r] = next++;
        labels[i] = map[r];
    }
    return labels;
}

// Newton on the (l-1)-th derivative, which has a simple root at an l-fold root of Q.
Complex polish(const CharPolynomial& q, Complex z, int multiplicity, bool real_axis) {
    const auto target = poly::derivative(std::span<const double>(q.coeffs), multiplicity - 1);
    const auto slope = poly::derivative(std::span<const double>(target));
    double best = std::abs(poly::evaluate(target, z));
    for (int it = 0; it < 50; ++it) {
        const Complex f = poly::evaluate(target, z);
        const Complex df = poly::evaluate(slope, z);
        if (df == Complex{}) break;
        Complex next = z - f / df;
        if (real_axis) next = {next.real(), 0.0};
        const double r = std::abs(poly::evaluate(target, next));
        if (!(r < best)) break;
        const double step = std::abs(next - z);
        z = next;
        best = r;
        if (step <= 4 * kEps * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

}  // namespace

Complex CharPolynomial::operator()(Complex s) const { return poly::evaluate(coeffs, s); }

double CharPolynomial::scale() const noexcept {
    double acc = 0.0;
    for (double c : coeffs) acc += std::abs(c);
    return acc;
}

ReducedModel reduce_support(const ClaimDistribution& dist, int kappa) {
    if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 1");
    const std::size_t m = dist.min_support();
    if (m >= static_cast<std::size_t>(kappa)) {
        std::ostringstream msg;
        msg << "minimal claim " << m << " >= kappa = " << kappa << " forces E X >= kappa";
        throw Error(ErrorCode::ReductionError, msg.str());
    }
    return {dist.shifted_down(m), kappa - static_cast<int>(m), static_cast<int>(m)};
}

CharPolynomial build_characteristic(const ClaimDistribution& dist, int kappa) {
    if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be >= 1");
    if (!(dist.pmf(0) > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "characteristic polynomial needs x_0 > 0; reduce the support first");
    }
    CharPolynomial q;
    q.kappa = kappa;
    const auto k = static_cast<std::size_t>(kappa);
    if (dist.is_finite()) {
        const auto probs = dist.probabilities();
        q.coeffs.assign(std::max(k, probs.size() - 1) + 1, 0.0);
        for (std::size_t i = 0; i < probs.size(); ++i) q.coeffs[i] -= probs[i];
        q.coeffs[k] += 1.0;
        q.pgf_denominator = {1.0};
    } else {
        const double p = dist.success_probability();
        q.coeffs.assign(k + 2, 0.0);
        q.coeffs[0] = -p;
        q.coeffs[k] = 1.0;
        q.coeffs[k + 1] = -(1.0 - p);
        q.pgf_denominator = {1.0, -(1.0 - p)};
    }
    poly::trim(q.coeffs);
    return q;
}

CharPolynomial build_characteristic(const ReducedModel& model) {
    auto q = build_characteristic(model.dist, model.kappa);
    q.reduction_shift = model.shift;
    return q;
}

int RootSet::total_multiplicity() const noexcept {
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    return total;
}

bool RootSet::all_simple() const noexcept {
    return std::all_of(roots.begin(), roots.end(), [](const Root& r) { return r.multiplicity == 1; });
}

bool RootSet::has_boundary_root() const noexcept {
    return std::any_of(roots.begin(), roots.end(), [](const Root& r) { return r.on_boundary; });
}

std::vector<Complex> RootSet::expanded() const {
    std::vector<Complex> out;
    for (const auto& r : roots) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.value);
    return out;
}

std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, int max_iter) {
    std::vector<Complex> c(coeffs.begin(), coeffs.end());
    while (!c.empty() && c.back() == Complex{}) c.pop_back();
    if (c.size() <= 1) return {};
    const std::size_t n = c.size() - 1;
    if (n == 1) return {-c[0] / c[1]};

    // Zeros at the origin are split off exactly.
    std::size_t zeros = 0;
    while (c[zeros] == Complex{}) ++zeros;
    std::vector<Complex> roots(zeros, Complex{});
    if (zeros > 0) c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));
    const std::size_t m = c.size() - 1;
    if (m == 0) return roots;

    const auto dc = poly::derivative(std::span<const Complex>(c));
    const double radius = std::pow(std::abs(c[0] / c[m]), 1.0 / static_cast<double>(m));
    std::vector<Complex> z(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m) + 0.4;
        z[k] = std::polar(radius, angle);
    }
    std::vector<bool> done(m, false);
    const double bound_factor = 4.0 * static_cast<double>(m) * kEps;
    for (int it = 0; it < max_iter; ++it) {
        bool all_done = true;
        for (std::size_t k = 0; k < m; ++k) {
            if (done[k]) continue;
            const Complex p = poly::evaluate(std::span<const Complex>(c), z[k]);
            const double bound = bound_factor * poly::absolute_scale(std::span<const Complex>(c), std::abs(z[k]));
            if (std::abs(p) <= bound) {
                done[k] = true;
                continue;
            }
            all_done = false;
            const Complex dp = poly::evaluate(std::span<const Complex>(dc), z[k]);
            Complex sum{};
            for (std::size_t j = 0; j < m; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            Complex step;
            if (dp == Complex{}) {
                step = Complex{1e-3 * (1.0 + std::abs(z[k])), 0.0};
            } else {
                const Complex ratio = p / dp;
                step = ratio / (1.0 - ratio * sum);
            }
            z[k] -= step;
            if (std::abs(step) <= kEps * std::abs(z[k])) done[k] = true;
        }
        if (all_done) {
            roots.insert(roots.end(), z.begin(), z.end());
            return roots;
        }
    }
    throw Error(ErrorCode::ConvergenceFailure,
                "Aberth iteration did not converge in " + std::to_string(max_iter) + " sweeps");
}

RootSet cluster_multiplicities(std::span<const Complex> raw, const CharPolynomial& q, const Tolerances& tol,
                               ClusterPolicy policy) {
    RootSet out;
    if (raw.empty()) return out;

    // Newton inclusion radius deg * |Q/Q'|: each disc holds at least one root of Q.
    const auto dq = poly::derivative(std::span<const double>(q.coeffs));
    std::vector<double> radius(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Complex f = q(raw[i]);
        const Complex df = poly::evaluate(dq, raw[i]);
        radius[i] = df == Complex{} ? 0.0 : q.degree() * std::abs(f / df);
    }
    const auto labels = partition(raw, radius, tol.cluster);
    const auto tight = partition(raw, radius, tol.cluster / 10.0);
    const auto loose = partition(raw, radius, tol.cluster * 10.0);
    if (tight != labels || loose != labels) {
        std::ostringstream msg;
        const int a = *std::max_element(tight.begin(), tight.end()) + 1;
        const int b = *std::max_element(labels.begin(), labels.end()) + 1;
        const int c = *std::max_element(loose.begin(), loose.end()) + 1;
        msg << "clustering depends on tol_cluster: " << a << " clusters at " << tol.cluster / 10.0 << ", " << b
            << " at " << tol.cluster << ", " << c << " at " << tol.cluster * 10.0 << "; raw roots: "
            << describe(raw);
        if (policy == ClusterPolicy::Strict) throw Error(ErrorCode::AmbiguousCluster, msg.str());
        out.ambiguity = msg.str();
    }

    const int nclusters = *std::max_element(labels.begin(), labels.end()) + 1;
    for (int cl = 0; cl < nclusters; ++cl) {
        Complex centroid{};
        int count = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (labels[i] == cl) {
                centroid += raw[i];
                ++count;
            }
        }
        centroid /= static_cast<double>(count);
        out.roots.push_back({centroid, count, false});
    }

    // Real roots stay real; complex roots are paired with their conjugates.
    std::vector<bool> paired(out.roots.size(), false);
    for (std::size_t i = 0; i < out.roots.size(); ++i) {
        auto& r = out.roots[i];
        if (std::abs(r.value.imag()) <= tol.cluster) {
            r.value = polish(q, {r.value.real(), 0.0}, r.multiplicity, true);
            paired[i] = true;
        }
    }
    for (std::size_t i = 0; i < out.roots.size(); ++i) {
        if (paired[i]) continue;
        std::size_t best = out.roots.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < out.roots.size(); ++j) {
            if (j == i || paired[j] || out.roots[j].multiplicity != out.roots[i].multiplicity) continue;
            const double d = std::abs(out.roots[j].value - std::conj(out.roots[i].value));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        auto& r = out.roots[i];
        r.value = polish(q, r.value, r.multiplicity, false);
        if (best < out.roots.size()) {
            auto& mate = out.roots[best];
            const Complex mid = 0.5 * (r.value + std::conj(polish(q, mate.value, mate.multiplicity, false)));
            const Complex upper = mid.imag() >= 0 ? mid : std::conj(mid);
            r.value = upper;
            mate.value = std::conj(upper);
            paired[best] = true;
        }
        paired[i] = true;
    }

    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() > b.value.imag();
    });
    for (auto& r : out.roots) r.on_boundary = std::abs(std::abs(r.value) - 1.0) <= tol.boundary;
    return out;
}

RootSet find_unit_disk_roots(const CharPolynomial& q, const Tolerances& tol, ClusterPolicy policy) {
    const int expected = q.kappa - 1;
    const auto deflated = poly::deflate(std::span<const double>(q.coeffs), 1.0);
    if (std::abs(deflated.remainder) > 1e-12 * q.scale()) {
        std::ostringstream msg;
        msg << "s = 1 is not a root of the characteristic polynomial (Q(1) = " << deflated.remainder << ")";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    std::vector<Complex> reduced(deflated.quotient.begin(), deflated.quotient.end());
    const auto raw = aberth_roots(reduced);
    const auto all = cluster_multiplicities(raw, q, tol, policy);

    RootSet inside;
    inside.ambiguity = all.ambiguity;
    for (const auto& r : all.roots) {
        if (std::abs(r.value) <= 1.0 + tol.boundary && std::abs(r.value - 1.0) > tol.root) inside.roots.push_back(r);
    }
    if (inside.total_multiplicity() != expected) {
        std::ostringstream msg;
        msg << "expected " << expected << " roots in the closed unit disk (excluding s = 1), found "
            << inside.total_multiplicity() << "; all roots: " << describe(all.expanded());
        throw Error(ErrorCode::RootCountMismatch, msg.str());
    }
    return inside;
}

}  // namespace ruin
