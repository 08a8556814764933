// Batch front end: config in, report and CSV tables out.
//
// Exit codes: 0 all checks pass, 1 a check or internal step failed,
// 2 model rejected by the net profit condition, 3 bad flags or config.

#include "ruin/error.hpp"
#include "ruin/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    CLI::App app{"Ultimate and finite-time survival probabilities for the discrete-time risk model"};

    std::string config_path;
    std::optional<int> u_max, t_max;
    std::optional<std::int64_t> mc_paths;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "ruin_out";
    ruin::RunOptions options;
    bool no_timings = false;

    app.add_option("--config", config_path, "JSON model description")->required()->check(CLI::ExistingFile);
    app.add_option("--u-max", u_max, "largest initial surplus in the tables")->check(CLI::NonNegativeNumber);
    app.add_option("--t-max", t_max, "finite-time horizon")->check(CLI::PositiveNumber);
    app.add_flag("--verify", options.verify, "run Monte Carlo and recurrent-sequence oracles");
    app.add_option("--mc-paths", mc_paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--threads", options.threads, "Monte Carlo worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", options.format, "what to print on stdout")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, ruin::OutputFormat>{{"csv", ruin::OutputFormat::Csv},
                                                      {"report", ruin::OutputFormat::Report}},
            CLI::ignore_case));
    app.add_flag("--no-timings", no_timings, "omit timings so reports are byte-identical across runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }
    options.timings = !no_timings;

    try {
        auto config = ruin::load_config(config_path);
        if (u_max) config.u_max = *u_max;
        if (t_max) config.t_max = *t_max;
        if (mc_paths) config.mc.paths = *mc_paths;
        if (seed) config.mc.seed = *seed;
        config.validate();

        const auto report = ruin::run_model(config, options);
        ruin::write_outputs(report, out_dir, options.timings);
        if (report.status == ruin::RunStatus::Rejected) {
            std::cerr << "model rejected: " << report.rejection << "\n";
            return report.exit_code();
        }
        if (options.format == ruin::OutputFormat::Report) {
            std::cout << ruin::format_report(report, options.timings);
        } else {
            std::cout << ruin::survival_csv(report);
        }
        for (const auto& c : report.checks) {
            if (!c.passed) std::cerr << "check failed: " << c.name << " = " << c.value << " > " << c.tolerance << "\n";
        }
        return report.exit_code();
    } catch (const ruin::Error& e) {
        std::cerr << (e.code() == ruin::ErrorCode::ConfigError ? "config error: " : "error: ") << e.what() << "\n";
        return e.code() == ruin::ErrorCode::ConfigError ? 3 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
