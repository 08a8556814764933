#include "ruin/config.hpp"
#include "ruin/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace ruin {
namespace {

ErrorCode code_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for " << text;
    return ErrorCode::InvalidArgument;
}

TEST(Config, ParsesFullDocument) {
    const auto cfg = parse_config(R"({"kappa": 3, "dist": {"kind": "geometric", "p": "101/300"},
        "u_max": 40, "t_max": 7, "tolerances": {"root": 1e-11, "cluster": 1e-7},
        "mc": {"paths": 1000, "horizon": 200, "seed": 9}})");
    EXPECT_EQ(cfg.kappa, 3);
    EXPECT_EQ(cfg.dist.kind(), ClaimDistribution::Kind::Geometric);
    EXPECT_DOUBLE_EQ(cfg.dist.success_probability(), 101.0 / 300.0);
    EXPECT_EQ(cfg.u_max, 40);
    EXPECT_EQ(cfg.t_max, 7);
    EXPECT_DOUBLE_EQ(cfg.tol.root, 1e-11);
    EXPECT_DOUBLE_EQ(cfg.tol.cluster, 1e-7);
    EXPECT_DOUBLE_EQ(cfg.tol.boundary, 1e-8);
    EXPECT_EQ(cfg.mc.paths, 1000);
    EXPECT_EQ(cfg.mc.horizon, 200);
    EXPECT_EQ(cfg.mc.seed, 9u);
}

TEST(Config, Defaults) {
    const auto cfg = parse_config(R"({"kappa": 1, "dist": {"kind": "finite", "pmf": [0.7, 0.3]}})");
    EXPECT_EQ(cfg.u_max, 20);
    EXPECT_EQ(cfg.t_max, 50);
    EXPECT_EQ(cfg.mc.paths, 100000);
    EXPECT_EQ(cfg.mc.horizon, 5000);
    EXPECT_EQ(cfg.mc.seed, 12345u);
}

TEST(Config, FractionStringsInPmf) {
    const auto cfg = parse_config(R"({"kappa": 2, "dist": {"kind": "finite", "pmf": ["1/4", "0.5", 0.25]}})");
    EXPECT_DOUBLE_EQ(cfg.dist.pmf(0), 0.25);
    EXPECT_DOUBLE_EQ(cfg.dist.pmf(1), 0.5);
}

TEST(Config, Rejections) {
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": 0.5}, "bogus": 1})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 0, "dist": {"kind": "geometric", "p": 0.5}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 1.5, "dist": {"kind": "geometric", "p": 0.5}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"dist": {"kind": "geometric", "p": 0.5}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "poisson", "p": 0.5}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": "1/0"}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": "abc"}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": 1.5}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "finite", "pmf": [0.5, 0.6]}})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": 0.5}, "tolerances": {"root": -1}})"),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": 0.5}, "mc": {"paths": 0}})"),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of(R"({"kappa": 2, "dist": {"kind": "geometric", "p": 0.5}, "u_max": -1})"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of("{not json"), ErrorCode::ConfigError);
    EXPECT_EQ(code_of("[1, 2]"), ErrorCode::ConfigError);
}

TEST(Config, FixturesLoad) {
    const std::filesystem::path dir = RUIN_FIXTURES_DIR;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().stem() == "malformed") {
            EXPECT_THROW(load_config(entry.path()), Error);
        } else {
            EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
        }
    }
}

TEST(Config, MissingFile) {
    try {
        load_config("/nonexistent/model.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    }
}

}  // namespace
}  // namespace ruin
