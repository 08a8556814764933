#pragma once

// Dense polynomial helpers. Coefficient vectors are stored lowest degree first.

#include "ruin/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ruin::poly {

template <typename Coeff, typename Arg>
auto evaluate(std::span<const Coeff> c, Arg s) {
    using R = decltype(Coeff{} * s);
    R acc{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

template <typename Coeff, typename Arg>
auto evaluate(const std::vector<Coeff>& c, Arg s) {
    return evaluate(std::span<const Coeff>(c), s);
}

/// Sum |c_i| r^i, the natural scale for rounding error in Horner evaluation at |s| = r.
template <typename Coeff>
double absolute_scale(std::span<const Coeff> c, double r) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

template <typename Coeff>
std::vector<Coeff> derivative(std::span<const Coeff> c) {
    if (c.size() <= 1) return {Coeff{}};
    std::vector<Coeff> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

template <typename Coeff>
std::vector<Coeff> derivative(std::span<const Coeff> c, int order) {
    std::vector<Coeff> d(c.begin(), c.end());
    for (int k = 0; k < order; ++k) d = derivative(std::span<const Coeff>(d));
    return d;
}

template <typename Coeff>
void trim(std::vector<Coeff>& c) {
    while (c.size() > 1 && c.back() == Coeff{}) c.pop_back();
}

template <typename Coeff>
std::vector<Coeff> multiply(std::span<const Coeff> a, std::span<const Coeff> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Coeff> out(a.size() + b.size() - 1, Coeff{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

template <typename Coeff>
struct Division {
    std::vector<Coeff> quotient;
    std::vector<Coeff> remainder;
};

/// Long division from the leading coefficient down. Removing the smallest
/// roots of `num` this way is the numerically stable direction.
template <typename Coeff>
Division<Coeff> divide(std::span<const Coeff> num, std::span<const Coeff> den) {
    if (den.empty() || den.back() == Coeff{}) {
        throw Error(ErrorCode::InvalidArgument, "polynomial divisor has a zero leading coefficient");
    }
    Division<Coeff> out;
    if (num.size() < den.size()) {
        out.quotient = {Coeff{}};
        out.remainder.assign(num.begin(), num.end());
        return out;
    }
    std::vector<Coeff> work(num.begin(), num.end());
    const std::size_t nq = num.size() - den.size() + 1;
    out.quotient.assign(nq, Coeff{});
    for (std::size_t k = nq; k-- > 0;) {
        const Coeff factor = work[k + den.size() - 1] / den.back();
        out.quotient[k] = factor;
        for (std::size_t j = 0; j < den.size(); ++j) work[k + j] -= factor * den[j];
    }
    out.remainder.assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(den.size() - 1));
    if (out.remainder.empty()) out.remainder = {Coeff{}};
    return out;
}

/// Synthetic division by (s - root); the remainder equals p(root).
template <typename Coeff, typename Root>
auto deflate(std::span<const Coeff> c, Root root) {
    using R = decltype(Coeff{} * root);
    struct Result {
        std::vector<R> quotient;
        R remainder;
    };
    Result out{std::vector<R>(c.size() > 1 ? c.size() - 1 : 1, R{}), R{}};
    if (c.size() <= 1) {
        out.remainder = c.empty() ? R{} : R(c[0]);
        return out;
    }
    R carry = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        out.quotient[k] = carry;
        carry = c[k] + carry * root;
    }
    out.remainder = carry;
    return out;
}

/// First n Taylor coefficients of num(s) / den(s); requires den[0] != 0.
template <typename Coeff>
std::vector<Coeff> series_divide(std::span<const Coeff> num, std::span<const Coeff> den, std::size_t n) {
    if (den.empty() || den[0] == Coeff{}) {
        throw Error(ErrorCode::InvalidArgument, "series divisor must have a non-zero constant term");
    }
    std::vector<Coeff> out(n, Coeff{});
    for (std::size_t k = 0; k < n; ++k) {
        Coeff acc = k < num.size() ? num[k] : Coeff{};
        const std::size_t jmax = std::min(k, den.size() - 1);
        for (std::size_t j = 1; j <= jmax; ++j) acc -= den[j] * out[k - j];
        out[k] = acc / den[0];
    }
    return out;
}

}  // namespace ruin::poly
