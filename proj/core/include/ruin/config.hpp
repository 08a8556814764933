#pragma once

#include "ruin/distribution.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>

namespace ruin {

/// Numerical tolerances shared by the root finder and the linear solve.
struct Tolerances {
    double root = 1e-10;      ///< residual / exclusion radius around s = 1
    double cluster = 1e-6;    ///< merge distance for copies of a multiple root
    double boundary = 1e-8;   ///< | |alpha| - 1 | below this marks a boundary root
    double real = 1e-8;       ///< largest imaginary part dropped from pi

    void validate() const;
};

struct McSettings {
    std::int64_t paths = 100'000;
    std::int64_t horizon = 5'000;
    std::uint64_t seed = 12345;
};

struct ModelConfig {
    int kappa = 1;
    ClaimDistribution dist;
    int u_max = 20;
    int t_max = 50;
    Tolerances tol{};
    McSettings mc{};

    /// Throws ConfigError when an invariant (kappa >= 1, positive tolerances, ...) fails.
    void validate() const;
};

/// Parse the JSON model description:
///   {"kappa": 3, "dist": {"kind": "geometric", "p": "101/300"}, "u_max": 20,
///    "t_max": 50, "tolerances": {...}, "mc": {"paths": ..., "horizon": ..., "seed": ...}}
/// Probabilities may be numbers or "a/b" strings.
ModelConfig parse_config(std::string_view json_text);
ModelConfig load_config(const std::filesystem::path& path);

}  // namespace ruin
