#include "ruin/config.hpp"

#include "ruin/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

namespace ruin {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

double parse_number_text(const std::string& text, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) config_error("trailing characters in " + field + ": '" + text + "'");
        return v;
    } catch (const std::logic_error&) {
        config_error("cannot parse " + field + ": '" + text + "'");
    }
}

// Accepts 0.25, "0.25" or "1/4".
double read_probability(const json& node, const std::string& field) {
    if (node.is_number()) return node.get<double>();
    if (!node.is_string()) config_error(field + " must be a number or an \"a/b\" string");
    const auto text = node.get<std::string>();
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_number_text(text, field);
    const double num = parse_number_text(text.substr(0, slash), field);
    const double den = parse_number_text(text.substr(slash + 1), field);
    if (den == 0.0) config_error(field + " has a zero denominator");
    return num / den;
}

template <typename T>
T read_integer(const json& node, const std::string& field) {
    if (!node.is_number_integer()) config_error(field + " must be an integer");
    return node.get<T>();
}

ClaimDistribution parse_distribution(const json& node, double trunc_eps) {
    if (!node.is_object()) config_error("dist must be an object");
    if (!node.contains("kind")) config_error("dist.kind is required");
    const auto kind = node.at("kind").get<std::string>();
    try {
        if (kind == "finite") {
            if (!node.contains("pmf") || !node.at("pmf").is_array()) config_error("dist.pmf must be an array");
            std::vector<double> pmf;
            for (std::size_t i = 0; i < node.at("pmf").size(); ++i) {
                pmf.push_back(read_probability(node.at("pmf")[i], "dist.pmf[" + std::to_string(i) + "]"));
            }
            return ClaimDistribution::finite(std::move(pmf), trunc_eps);
        }
        if (kind == "geometric") {
            if (!node.contains("p")) config_error("dist.p is required for a geometric law");
            return ClaimDistribution::geometric(read_probability(node.at("p"), "dist.p"), trunc_eps);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        config_error(std::string("invalid distribution: ") + e.what());
    }
    config_error("unknown dist.kind '" + kind + "' (expected \"finite\" or \"geometric\")");
}

}  // namespace

void Tolerances::validate() const {
    if (!(root > 0.0) || !(cluster > 0.0) || !(boundary > 0.0) || !(real > 0.0)) {
        config_error("all tolerances must be positive");
    }
}

void ModelConfig::validate() const {
    if (kappa < 1) config_error("kappa must be >= 1");
    if (u_max < 0) config_error("u_max must be >= 0");
    if (t_max < 1) config_error("t_max must be >= 1");
    if (mc.paths < 1) config_error("mc.paths must be >= 1");
    if (mc.horizon < 1) config_error("mc.horizon must be >= 1");
    tol.validate();
}

ModelConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) config_error("config must be a JSON object");

    static const std::vector<std::string> known{"kappa", "dist", "u_max", "t_max", "tolerances", "mc"};
    for (const auto& [key, _] : root.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) config_error("unknown key '" + key + "'");
    }
    if (!root.contains("kappa")) config_error("kappa is required");
    if (!root.contains("dist")) config_error("dist is required");

    try {
        double trunc_eps = kDefaultTruncEps;
        Tolerances tol;
        if (root.contains("tolerances")) {
            const auto& t = root.at("tolerances");
            if (!t.is_object()) config_error("tolerances must be an object");
            for (const auto& [key, value] : t.items()) {
                if (!value.is_number()) config_error("tolerances." + key + " must be a number");
                const double v = value.get<double>();
                if (key == "root") tol.root = v;
                else if (key == "cluster") tol.cluster = v;
                else if (key == "boundary") tol.boundary = v;
                else if (key == "real") tol.real = v;
                else if (key == "trunc_eps") trunc_eps = v;
                else config_error("unknown tolerance '" + key + "'");
            }
        }
        if (!(trunc_eps > 0.0) || !(trunc_eps < 1.0)) config_error("tolerances.trunc_eps must lie in (0, 1)");

        ModelConfig cfg{
            .kappa = read_integer<int>(root.at("kappa"), "kappa"),
            .dist = parse_distribution(root.at("dist"), trunc_eps),
            .tol = tol,
        };
        if (root.contains("u_max")) cfg.u_max = read_integer<int>(root.at("u_max"), "u_max");
        if (root.contains("t_max")) cfg.t_max = read_integer<int>(root.at("t_max"), "t_max");
        if (root.contains("mc")) {
            const auto& mc = root.at("mc");
            if (!mc.is_object()) config_error("mc must be an object");
            for (const auto& [key, value] : mc.items()) {
                if (key == "paths") cfg.mc.paths = read_integer<std::int64_t>(value, "mc.paths");
                else if (key == "horizon") cfg.mc.horizon = read_integer<std::int64_t>(value, "mc.horizon");
                else if (key == "seed") cfg.mc.seed = read_integer<std::uint64_t>(value, "mc.seed");
                else config_error("unknown mc key '" + key + "'");
            }
        }
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        config_error(std::string("bad value type: ") + e.what());
    }
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace ruin
