#include "ruin/pipeline.hpp"

#include "ruin/error.hpp"
#include "ruin/polynomial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace ruin {

namespace {

constexpr int kMachineDigits = 12;
constexpr int kHumanDigits = 6;

class Stopwatch {
public:
    explicit Stopwatch(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}
    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        sink_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
        last_ = now;
    }

private:
    std::vector<std::pair<std::string, double>>& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string num(double v, int digits) {
    std::ostringstream out;
    out << std::setprecision(digits) << v;
    return out.str();
}

std::string complex_text(Complex z, int digits) {
    std::ostringstream out;
    out << std::setprecision(digits) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return out.str();
}

// Runs a check body; a ruin::Error inside it fails the check instead of aborting the run.
void add_check(RunReport& report, const std::string& name, double tolerance,
               const std::function<double(std::string&)>& body) {
    CheckResult c{name, 0.0, tolerance, false, {}};
    try {
        c.value = body(c.detail);
        c.passed = c.value <= tolerance;
    } catch (const Error& e) {
        c.value = std::numeric_limits<double>::infinity();
        c.detail = e.what();
    }
    report.checks.push_back(std::move(c));
}

void skip_check(RunReport& report, const std::string& name, double tolerance, std::string why) {
    report.checks.push_back({name, 0.0, tolerance, true, "skipped: " + std::move(why)});
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::string describe_rows(const std::vector<RowKind>& rows) {
    std::ostringstream out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r) out << ", ";
        if (rows[r].type == RowKind::Type::Moment) {
            out << "moment";
        } else if (rows[r].derivative_order == 0) {
            out << "value(alpha_" << rows[r].root_index + 1 << ")";
        } else {
            out << "derivative-" << rows[r].derivative_order << "(alpha_" << rows[r].root_index + 1 << ")";
        }
    }
    return out.str();
}

std::string describe_dist(const ClaimDistribution& d) {
    std::ostringstream out;
    out << std::setprecision(kHumanDigits);
    if (!d.is_finite()) {
        out << "geometric, p = " << d.success_probability();
        return out.str();
    }
    out << "finite pmf (";
    const auto p = d.probabilities();
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << p[i];
    out << ")";
    return out.str();
}

std::string_view method_name(SurvivalMethod m) {
    switch (m) {
        case SurvivalMethod::Recurrence: return "recurrence";
        case SurvivalMethod::ClosedForm: return "closed form";
        case SurvivalMethod::PiSum: return "pi partial sums";
        case SurvivalMethod::SeriesDivision: return "series division";
        case SurvivalMethod::Trivial: return "trivial (X = kappa a.s.)";
    }
    return "?";
}

void finite_time_checks(RunReport& r) {
    add_check(r, "finite_time_monotone", 1e-12, [&](std::string& detail) {
        double worst = 0.0;
        const auto& g = r.finite_time;
        for (int u = 0; u <= g.u_max; ++u) {
            for (int t = 2; t <= g.t_max; ++t) worst = std::max(worst, g.at(u, t) - g.at(u, t - 1));
            worst = std::max(worst, r.table.phi[static_cast<std::size_t>(u)] - g.at(u, g.t_max));
        }
        detail = "phi(u,T) non-increasing in T and >= phi(u)";
        return worst;
    });
}

void monte_carlo_checks(RunReport& r, const ClaimDistribution& dist, int kappa, const RunOptions& opt) {
    const auto& mc = r.config.mc;
    const auto sup = simulate_supremum(dist, kappa, mc.paths, mc.horizon, mc.seed, std::nullopt, opt.threads);
    std::vector<int> levels;
    for (int u : {0, 1, 2, 5, 10}) {
        if (u <= r.config.u_max) levels.push_back(u);
    }
    r.mc = estimate_from_supremum(sup, levels, mc.horizon, mc.seed);
    const double n = static_cast<double>(mc.paths);
    const int t_bias = static_cast<int>(std::min<std::int64_t>(r.finite_time.t_max, mc.horizon));
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const int u = levels[i];
        const double exact = r.table.phi[static_cast<std::size_t>(u)];
        // P(ruin after the horizon) <= phi(u, t) - phi(u) for any t <= horizon.
        const double bias = std::max(0.0, r.finite_time.at(u, t_bias) - exact);
        const double se = std::max(r.mc->std_err[i], std::sqrt(exact * (1.0 - exact) / n));
        add_check(r, "mc_phi_u" + std::to_string(u), 3.0 * se + bias, [&](std::string& detail) {
            detail = "phi_hat = " + num(r.mc->phi_hat[i], kMachineDigits) + ", std_err = " + num(se, 3) +
                     ", horizon bias <= " + num(bias, 3);
            return std::abs(r.mc->phi_hat[i] - exact);
        });
    }
    r.stationarity = stationarity_from_supremum(sup, dist, kappa, mc.seed);
    add_check(r, "stationarity_tv", 3.0 * r.stationarity->noise_level, [&](std::string& detail) {
        detail = "TV(M, (M + X - kappa)^+), sampling noise ~ " + num(r.stationarity->noise_level, 3);
        return r.stationarity->tv;
    });
}

void analytic_checks(RunReport& r, const ReducedModel& red, const CharPolynomial* q, const std::vector<double>& work) {
    const auto& d = red.dist;
    const int k = red.kappa;
    const auto kk = static_cast<std::size_t>(k);
    const Tolerances& tol = r.config.tol;

    if (q != nullptr) {
        add_check(r, "root_residual", tol.root, [&](std::string& detail) {
            double worst = 0.0;
            for (const auto& root : r.roots.roots) {
                auto deriv = q->coeffs;
                for (int j = 0; j < root.multiplicity; ++j) {
                    const double scale = poly::absolute_scale(std::span<const double>(deriv), std::max(1.0, std::abs(root.value)));
                    worst = std::max(worst, std::abs(poly::evaluate(deriv, root.value)) / scale);
                    deriv = poly::derivative(std::span<const double>(deriv));
                }
            }
            detail = "|Q^(j)(alpha)| / scale, j < multiplicity";
            return worst;
        });
    }
    add_check(r, "solve_residual", 1e-10, [&](std::string& detail) {
        detail = "max |A pi - b|, imag leak " + num(r.pi.imag_leak, 3);
        return r.pi.residual;
    });
    add_check(r, "moment_identity", 1e-10, [&](std::string&) {
        const auto row = moment_row(d, k);
        const double lhs = std::inner_product(row.begin(), row.end(), r.pi.pi.begin(), 0.0);
        return std::abs(static_cast<double>(k) - d.mean() - lhs);
    });
    add_check(r, "pi_range", 1e-10, [&](std::string& detail) {
        const double lo = *std::min_element(r.pi.pi.begin(), r.pi.pi.end());
        const double sum = std::accumulate(r.pi.pi.begin(), r.pi.pi.end(), 0.0);
        detail = "pi_i >= 0 and sum pi_i <= 1";
        return std::max({0.0, -lo, sum - 1.0});
    });

    if (r.roots.all_simple()) {
        add_check(r, "closed_form_pi", 1e-9, [&](std::string&) {
            return max_abs_diff(pi_closed_form(d, k, r.roots).pi, r.pi.pi);
        });
        add_check(r, "closed_form_phi", 1e-9, [&](std::string& detail) {
            detail = "phi(0.." + std::to_string(k) + ")";
            return max_abs_diff(initial_values_closed_form(r.roots, d, k), work);
        });
        add_check(r, "determinant_identity", 1e-8, [&](std::string& detail) {
            detail = "relative error of det A against the product formula";
            return determinant_identity_check(assemble_system(d, k, r.roots), r.roots, d.pmf(0));
        });
    } else {
        skip_check(r, "closed_form_pi", 1e-9, "multiple root, derivative rows used");
        skip_check(r, "closed_form_phi", 1e-9, "multiple root");
        skip_check(r, "determinant_identity", 1e-8, "multiple root");
    }

    const int horizon = std::min(static_cast<int>(work.size()) - 1, recurrence_horizon(r.roots, d.pmf(0)));
    add_check(r, "recurrence_vs_series", 1e-9, [&](std::string& detail) {
        const auto rec = ultimate_from_pi(r.pi, d, k, std::max(horizon, k + 1));
        detail = "u <= " + std::to_string(horizon);
        return max_abs_diff(std::span<const double>(rec.phi).first(static_cast<std::size_t>(horizon) + 1), work);
    });
    add_check(r, "extend_pi_vs_table", 1e-9, [&](std::string& detail) {
        const auto n_max = static_cast<std::size_t>(std::max(horizon - 1, 0));
        const auto ext = extend_pi(r.pi, d, k, n_max, PiExtension::Recurrence);
        double worst = 0.0;
        for (std::size_t n = 0; n <= n_max && n + 1 < work.size(); ++n) {
            worst = std::max(worst, std::abs(ext[n] - (work[n + 1] - (n == 0 ? 0.0 : work[n]))));
        }
        detail = "pi_n = phi(n+1) - phi(n) for n <= " + std::to_string(n_max);
        return worst;
    });
    add_check(r, "series_guard", 1e-10, [&](std::string& detail) {
        detail = "remainders of the exact polynomial divisions";
        return maximum_pgf(r.pi, d, k).guard;
    });
    add_check(r, "u0_identity", 1e-12, [&](std::string&) {
        double rhs = 0.0;
        for (std::size_t i = 1; i <= kk; ++i) rhs += d.pmf(kk - i) * work[i];
        return std::abs(work[0] - rhs);
    });
    add_check(r, "table_monotone", 1e-12, [&](std::string&) {
        double worst = std::max(0.0, -work.front());
        for (std::size_t u = 1; u < work.size(); ++u) worst = std::max({worst, work[u - 1] - work[u], work[u] - 1.0});
        return worst;
    });
    {
        std::vector<double> ext;
        double tail = 1.0;
        try {
            for (std::size_t n = 256; n <= (std::size_t{1} << 22) && !(tail < 1e-10); n *= 2) {
                ext = extend_pi(r.pi, d, k, n, PiExtension::Deflated);
                tail = 1.0 - std::accumulate(ext.begin(), ext.end(), 0.0);
            }
        } catch (const Error&) {
            ext.clear();
        }
        // A truncated G_M is off by at most the tail mass, and |s^kappa - G_X(s)| <= 2.
        add_check(r, "identity_residual", 1e-8 + 2.0 * std::max(tail, 0.0), [&](std::string& detail) {
            if (ext.empty()) ext = extend_pi(r.pi, d, k, 256, PiExtension::Deflated);
            detail = "20 points on |s| = 0.9, pi extended to n = " + std::to_string(ext.size() - 1) + ", tail " +
                     num(tail, 3);
            return identity_residual(ext, d, k, circle_points(20, 0.9));
        });
    }
    add_check(r, "xi_eval_vs_series", 1e-10, [&](std::string& detail) {
        const auto xi = xi_coefficients(r.pi, d, k, 80).coefficients;
        double worst = 0.0;
        for (const Complex s : {Complex(0.3, 0.0), Complex(-0.3, 0.2), Complex(0.0, 0.5)}) {
            Complex series{};
            for (auto it = xi.rbegin(); it != xi.rend(); ++it) series = series * s + *it;
            worst = std::max(worst, std::abs(xi_eval(r.pi, d, k, s) - series));
        }
        detail = "s in {0.3, -0.3+0.2i, 0.5i}";
        return worst;
    });
    const bool original_special = r.config.kappa <= 2;
    if (original_special || k <= 2) {
        add_check(r, "xi_special", 1e-10, [&](std::string& detail) {
            const auto& dist = original_special ? r.config.dist : d;
            const int kap = original_special ? r.config.kappa : k;
            double worst = 0.0;
            for (const Complex s : {Complex(0.0, 0.0), Complex(0.3, 0.0), Complex(-0.4, 0.3)}) {
                worst = std::max(worst, std::abs(xi_special(dist, kap, s, tol) - xi_eval(r.pi, d, k, s)));
            }
            detail = "kappa = " + std::to_string(kap) + " closed form against the general formula";
            return worst;
        });
    }
}

}  // namespace

bool RunReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

int RunReport::exit_code() const {
    if (status == RunStatus::Rejected) return 2;
    return all_passed() ? 0 : 1;
}

RunReport run_model(const ModelConfig& config, const RunOptions& options) {
    config.validate();
    RunReport r{config};
    Stopwatch clock(r.timings);

    r.net_profit = check_net_profit(config.dist, config.kappa);
    if (r.net_profit.verdict == NetProfitVerdict::Violation) {
        r.status = RunStatus::Rejected;
        std::ostringstream msg;
        msg << std::setprecision(kHumanDigits) << "net profit condition E X < kappa fails: E X = "
            << r.net_profit.mean << ", kappa = " << config.kappa << "; survival is impossible";
        r.rejection = msg.str();
        return r;
    }

    const int u_max = config.u_max;
    r.finite_time = finite_time_grid(config.dist, config.kappa, u_max, config.t_max);
    clock.lap("finite_time");
    if (config.dist.pmf(0) > 0.0) {
        r.warnings.push_back(
            "finite-time recursion conditions on the first claim and includes the j = 0 term x_0 phi(u+kappa, T-1); "
            "the single-sum form starting at i = 1 drops it");
    }
    if (!config.dist.is_finite()) {
        r.warnings.push_back("finite-time recursion cuts the geometric law where its tail falls below 1e-18");
    }

    if (r.net_profit.verdict == NetProfitVerdict::TrivialSurvival) {
        r.warnings.push_back("X = kappa almost surely: W(n) = u for all n, so phi(0) = 0 and phi(u) = 1 for u >= 1 "
                             "(interpretation of the degenerate case)");
        r.kappa_eff = config.kappa;
        r.table = trivial_survival_table(config.kappa, u_max);
        finite_time_checks(r);
        if (options.verify) monte_carlo_checks(r, config.dist, config.kappa, options);
        clock.lap("checks");
        return r;
    }

    const auto red = reduce_support(config.dist, config.kappa);
    r.reduction_shift = red.shift;
    r.kappa_eff = red.kappa;
    if (red.shift > 0) {
        r.warnings.push_back("minimal claim " + std::to_string(red.shift) + " cancelled: solving kappa' = " +
                             std::to_string(red.kappa) + " with X' = X - " + std::to_string(red.shift));
    }
    const double x0 = red.dist.pmf(0);
    if (x0 < 0.05 && u_max > 50) {
        r.warnings.push_back("x_0 = " + num(x0, 3) + " < 0.05 with u_max > 50: forward recurrences divide by x_0 each "
                             "step and are ill-conditioned; the table uses series division");
    }

    std::optional<CharPolynomial> q;
    if (red.kappa > 1) {
        q = build_characteristic(red);
        r.roots = find_unit_disk_roots(*q, config.tol, ClusterPolicy::Warn);
    }
    clock.lap("roots");
    if (r.roots.has_boundary_root()) {
        r.warnings.push_back("root on the unit circle (lattice span " + std::to_string(lattice_span(red.dist, red.kappa)) +
                             "); kept in the system");
    }
    if (r.roots.ambiguity) r.warnings.push_back("cluster ambiguity: " + *r.roots.ambiguity);

    const auto sys = assemble_system(red.dist, red.kappa, r.roots);
    r.rows = sys.rows;
    r.pi = solve_pi(sys, config.tol);
    clock.lap("pi");

    // Working table long enough for the u = 0 identity and the recurrence check.
    const int work_max = std::max(u_max, red.kappa + 1);
    const auto work = ultimate_from_series(r.pi, red.dist, red.kappa, work_max);
    r.table = work;
    r.table.phi.resize(static_cast<std::size_t>(u_max) + 1);
    clock.lap("tables");

    const int horizon = recurrence_horizon(r.roots, x0);
    if (horizon < u_max) {
        r.warnings.push_back("forward recurrence checked for u <= " + std::to_string(horizon) +
                             " only; beyond that its rounding error grows like (1/min|alpha|)^u");
    }

    analytic_checks(r, red, q ? &*q : nullptr, work.phi);
    finite_time_checks(r);
    clock.lap("checks");

    if (options.verify) {
        monte_carlo_checks(r, config.dist, config.kappa, options);
        clock.lap("monte_carlo");
        if (red.kappa == 2) {
            add_check(r, "beta_gamma_limits", 1e-6, [&](std::string& detail) {
                r.beta_gamma = beta_gamma_limits(red.dist);
                detail = "n = " + std::to_string(r.beta_gamma->iterations) + ", gap " + num(r.beta_gamma->gap, 3) +
                         ", " + std::to_string(r.beta_gamma->precision_bits) + " bits";
                return std::max(std::abs(r.beta_gamma->phi0 - work.phi[0]), std::abs(r.beta_gamma->phi1 - work.phi[1]));
            });
            clock.lap("beta_gamma");
        }
    }
    return r;
}

std::string format_report(const RunReport& r, bool with_timings) {
    std::ostringstream out;
    out << std::setprecision(kHumanDigits);
    const auto& cfg = r.config;
    out << "model\n";
    out << "  kappa        " << cfg.kappa << "\n";
    out << "  claims       " << describe_dist(cfg.dist) << "\n";
    out << "  E X          " << cfg.dist.mean() << "\n";
    if (r.status == RunStatus::Rejected) {
        out << "  verdict      REJECTED: " << r.rejection << "\n";
        return out.str();
    }
    out << "  net profit   "
        << (r.net_profit.verdict == NetProfitVerdict::TrivialSurvival ? "trivial (X = kappa a.s.)" : "E X < kappa")
        << "\n";
    if (r.reduction_shift > 0) out << "  reduction    shift " << r.reduction_shift << ", kappa' = " << r.kappa_eff << "\n";

    if (r.net_profit.verdict != NetProfitVerdict::TrivialSurvival) {
        out << "\nroots in |s| <= 1, s != 1 (" << r.roots.total_multiplicity() << ")\n";
        for (const auto& root : r.roots.roots) {
            out << "  " << complex_text(root.value, kHumanDigits) << "  multiplicity " << root.multiplicity
                << (root.on_boundary ? "  on |s| = 1" : "") << "\n";
        }
        out << "\nlinear system rows: " << describe_rows(r.rows) << "\n";
        out << "\npi\n";
        for (std::size_t i = 0; i < r.pi.pi.size(); ++i) out << "  pi_" << i << "  " << r.pi.pi[i] << "\n";
        out << "  residual " << num(r.pi.residual, 3) << ", imaginary part dropped " << num(r.pi.imag_leak, 3) << "\n";
    }

    out << "\nultimate survival (" << method_name(r.table.method) << ")\n";
    for (std::size_t u = 0; u < r.table.phi.size(); ++u) out << "  phi(" << u << ")  " << r.table.phi[u] << "\n";

    const auto& g = r.finite_time;
    out << "\nfinite time, T = " << g.t_max << "\n";
    for (int u = 0; u <= g.u_max; ++u) {
        out << "  phi(" << u << ", " << g.t_max << ")  " << g.at(u, g.t_max) << "  gap to phi(" << u << ")  "
            << num(g.at(u, g.t_max) - r.table.phi[static_cast<std::size_t>(u)], 3) << "\n";
    }

    out << "\nchecks\n";
    for (const auto& c : r.checks) {
        out << "  " << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  " << num(c.value, 3) << " <= "
            << num(c.tolerance, 3);
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
    }
    if (r.mc) {
        out << "\nmonte carlo (" << r.mc->paths << " paths, horizon " << r.mc->horizon << ", seed " << r.mc->seed << ")\n";
        for (std::size_t i = 0; i < r.mc->u.size(); ++i) {
            out << "  u = " << r.mc->u[i] << "  phi_hat " << r.mc->phi_hat[i] << " +- " << num(r.mc->std_err[i], 3)
                << "\n";
        }
    }
    if (!r.warnings.empty()) {
        out << "\nwarnings\n";
        for (const auto& w : r.warnings) out << "  - " << w << "\n";
    }
    if (with_timings && !r.timings.empty()) {
        out << "\ntimings (s)\n";
        for (const auto& [stage, secs] : r.timings) out << "  " << stage << "  " << num(secs, 3) << "\n";
    }
    out << "\nstatus " << (r.all_passed() ? "ok" : "CHECK FAILED") << "\n";
    return out.str();
}

std::string survival_csv(const RunReport& r) {
    std::ostringstream out;
    out << std::setprecision(kMachineDigits) << "u,phi\n";
    for (std::size_t u = 0; u < r.table.phi.size(); ++u) out << u << "," << r.table.phi[u] << "\n";
    return out.str();
}

std::string finite_time_csv(const RunReport& r) {
    std::ostringstream out;
    out << std::setprecision(kMachineDigits) << "u,T,phi\n";
    const auto& g = r.finite_time;
    for (int t = 1; t <= g.t_max; ++t)
        for (int u = 0; u <= g.u_max; ++u) out << u << "," << t << "," << g.at(u, t) << "\n";
    return out.str();
}

std::string roots_csv(const RunReport& r) {
    std::ostringstream out;
    out << std::setprecision(kMachineDigits) << "re,im,multiplicity,on_boundary\n";
    for (const auto& root : r.roots.roots) {
        out << root.value.real() << "," << root.value.imag() << "," << root.multiplicity << ","
            << (root.on_boundary ? "true" : "false") << "\n";
    }
    return out.str();
}

std::string verification_csv(const RunReport& r) {
    std::ostringstream out;
    out << std::setprecision(kMachineDigits) << "check,value,tolerance,passed,detail\n";
    for (const auto& c : r.checks) {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        out << c.name << "," << c.value << "," << c.tolerance << "," << (c.passed ? "true" : "false") << ",\"" << detail
            << "\"\n";
    }
    return out.str();
}

void write_outputs(const RunReport& r, const std::filesystem::path& out_dir, bool with_timings) {
    std::filesystem::create_directories(out_dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream file(out_dir / name);
        if (!file) throw Error(ErrorCode::ConfigError, "cannot write " + (out_dir / name).string());
        file << text;
    };
    write("report.txt", format_report(r, with_timings));
    if (r.status == RunStatus::Rejected) return;
    write("survival.csv", survival_csv(r));
    write("finite_time.csv", finite_time_csv(r));
    write("roots.csv", roots_csv(r));
    write("verification.csv", verification_csv(r));
}

}  // namespace ruin
