#pragma once

#include "ruin/char_roots.hpp"
#include "ruin/config.hpp"
#include "ruin/oracle.hpp"
#include "ruin/pi_solver.hpp"
#include "ruin/survival.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ruin {

enum class OutputFormat { Csv, Report };

struct RunOptions {
    bool verify = false;
    bool timings = true;
    OutputFormat format = OutputFormat::Report;
    int threads = 1;
};

/// One cross-check: passes when value <= tolerance.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

enum class RunStatus { Ok, CheckFailed, Rejected };

struct RunReport {
    explicit RunReport(ModelConfig cfg) : config(std::move(cfg)) {}

    ModelConfig config;
    NetProfitCheck net_profit;
    RunStatus status = RunStatus::Ok;
    std::string rejection;

    int reduction_shift = 0;
    int kappa_eff = 1;
    RootSet roots;
    std::vector<RowKind> rows;
    PiVector pi;
    SurvivalTable table;
    FiniteTimeGrid finite_time;

    std::optional<McEstimate> mc;
    std::optional<StationarityReport> stationarity;
    std::optional<BetaGammaLimits> beta_gamma;

    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> timings;  ///< stage, seconds

    bool all_passed() const;
    /// 0 ok, 1 failed check, 2 net profit rejection.
    int exit_code() const;
};

/// validate -> reduce -> roots -> pi -> tables -> cross-checks (-> oracles with verify).
/// Module errors other than the net profit rejection propagate as ruin::Error.
RunReport run_model(const ModelConfig& config, const RunOptions& options);

std::string format_report(const RunReport& report, bool with_timings);
std::string survival_csv(const RunReport& report);
std::string finite_time_csv(const RunReport& report);
std::string roots_csv(const RunReport& report);
std::string verification_csv(const RunReport& report);

/// report.txt, survival.csv, finite_time.csv, roots.csv, verification.csv.
void write_outputs(const RunReport& report, const std::filesystem::path& out_dir, bool with_timings);

}  // namespace ruin
