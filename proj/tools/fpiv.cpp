#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpiv/baselines.hpp"
#include "fpiv/csv.hpp"
#include "fpiv/factorial.hpp"
#include "fpiv/panel.hpp"
#include "fpiv/report.hpp"
#include "fpiv/simulation.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitUsage = 64;

fpiv::Pattern parse_bits(const std::string& s) {
    if (s.empty()) throw fpiv::ValidationError("empty treatment pattern");
    fpiv::Pattern p;
    for (char c : s) {
        if (c != '0' && c != '1')
            throw fpiv::ValidationError("pattern must be a string of 0s and 1s, got '" + s +
                                        "'");
        p.push_back(c == '1');
    }
    return p;
}

fpiv::IndexRange parse_range(const std::string& s) {
    const auto pos = s.find(':');
    if (pos == std::string::npos)
        throw fpiv::ValidationError("range must look like a:b (1-based, inclusive)");
    try {
        const int a = std::stoi(s.substr(0, pos));
        const int b = std::stoi(s.substr(pos + 1));
        if (a < 1 || b < a) throw fpiv::ValidationError("invalid range " + s);
        return {a - 1, b - 1};
    } catch (const std::invalid_argument&) {
        throw fpiv::ValidationError("range must look like a:b (1-based, inclusive)");
    }
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void emit_report(fpiv::RunReport& report, const std::string& json_path,
                 const std::string& csv_path,
                 std::chrono::steady_clock::time_point start) {
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    fpiv::print_report(std::cout, report);
    if (!json_path.empty()) fpiv::write_report_json(json_path, report);
    if (!csv_path.empty()) fpiv::write_report_csv(csv_path, report);
}

void add_weak_warnings(fpiv::RunReport& report) {
    for (const auto& r : report.rows) {
        if (r.weak_fs)
            report.warnings.push_back("first stage below 10% for '" + r.label +
                                      "'; Bloom interval may be unreliable");
    }
}

int resolve_workers(int flag_value, int config_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("FPIV_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return config_value;
}

std::string pat_label(const fpiv::Pattern& p) {
    std::string s;
    for (auto b : p) s += b ? '1' : '0';
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design-based estimators for factorial and panel experiments "
                 "with imperfect compliance"};
    app.require_subcommand(1);

    // ---- estimate-factorial ----
    auto* ef = app.add_subcommand("estimate-factorial",
                                  "Factor-k or joint sequence effects on a wide-format CSV");
    std::string ef_data, ef_range, ef_d, ef_dt, ef_json, ef_csv;
    int ef_factor = 0;
    double ef_alpha = 0.05;
    std::vector<double> ef_probs;
    ef->add_option("--data", ef_data, "CSV file (columns z1..zK, d1..dK, y[, pz1..pzK])")
        ->required();
    ef->add_option("--factor", ef_factor, "single factor k (1-based)");
    ef->add_option("--range", ef_range, "factor block a:b (1-based, inclusive)");
    ef->add_option("--d", ef_d, "treatment pattern over the block, e.g. 11");
    ef->add_option("--dtilde", ef_dt, "comparison pattern, e.g. 00");
    ef->add_option("--alpha", ef_alpha, "two-sided level (default 0.05)");
    ef->add_option("--probs", ef_probs, "per-factor assignment probabilities p1,...,pK")
        ->delimiter(',');
    ef->add_option("--json", ef_json, "write the report as JSON to this path");
    ef->add_option("--csv", ef_csv, "write the report as CSV to this path");

    // ---- estimate-panel ----
    auto* ep = app.add_subcommand("estimate-panel",
                                  "Lag-p dynamic effects on a long-format panel CSV");
    std::string ep_data, ep_d, ep_dt, ep_json, ep_csv;
    int ep_t = 0, ep_lag = 0;
    bool ep_stack = false;
    double ep_alpha = 0.05;
    std::vector<double> ep_probs;
    ep->add_option("--data", ep_data, "CSV file (columns unit,t,z,d,y[,pz])")->required();
    ep->add_option("--t", ep_t, "target period (1-based)");
    ep->add_option("--lag", ep_lag, "lag p (default 0)");
    ep->add_option("--d", ep_d, "treatment path over t-p..t, e.g. 11");
    ep->add_option("--dtilde", ep_dt, "comparison path, e.g. 00");
    ep->add_flag("--stack", ep_stack, "pool lag-0 effects across all periods");
    ep->add_option("--alpha", ep_alpha, "two-sided level (default 0.05)");
    ep->add_option("--probs", ep_probs, "per-period assignment probabilities")->delimiter(',');
    ep->add_option("--json", ep_json, "write the report as JSON to this path");
    ep->add_option("--csv", ep_csv, "write the report as CSV to this path");

    // ---- compliance-table ----
    auto* ct = app.add_subcommand("compliance-table",
                                  "Signed joint-compliance estimates for every pattern");
    std::string ct_data, ct_range, ct_json, ct_csv;
    double ct_alpha = 0.05;
    std::vector<double> ct_probs;
    ct->add_option("--data", ct_data, "CSV file (wide factorial format)")->required();
    ct->add_option("--range", ct_range, "factor block a:b (1-based, inclusive)")->required();
    ct->add_option("--alpha", ct_alpha, "two-sided level (default 0.05)");
    ct->add_option("--probs", ct_probs, "per-factor assignment probabilities")->delimiter(',');
    ct->add_option("--json", ct_json, "write the report as JSON to this path");
    ct->add_option("--csv", ct_csv, "write the report as CSV to this path");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "Monte Carlo study driven by a JSON config");
    std::string sim_config, sim_json, sim_csv, sim_dump;
    int sim_workers = 0;
    sim->add_option("--config", sim_config, "JSON config file")->required();
    sim->add_option("--json", sim_json, "write metrics as JSON to this path");
    sim->add_option("--csv", sim_csv, "write the metrics table as CSV to this path");
    sim->add_option("--workers", sim_workers, "worker threads (also FPIV_WORKERS env var)");
    sim->add_option("--dump-replicate", sim_dump,
                    "write the first replicate's dataset as CSV to this path");

    // ---- decompose ----
    auto* dec = app.add_subcommand(
        "decompose", "Exact decomposition of the period-2 Wald estimand on a simulated panel");
    std::string dec_config, dec_json;
    dec->add_option("--config", dec_config, "JSON config file (panel profile)")->required();
    dec->add_option("--json", dec_json, "write the decomposition as JSON to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        std::optional<std::vector<double>> probs;

        if (*ef) {
            if (!ef_probs.empty()) probs = ef_probs;
            const auto ds = fpiv::load_factorial_csv(ef_data, probs);
            fpiv::RunReport report;
            report.command = join_args(argc, argv);
            report.input_digest = fpiv::file_digest(ef_data);
            if (ef_factor > 0 && !ef_range.empty())
                throw fpiv::ValidationError("use either --factor or --range, not both");
            if (ef_factor > 0) {
                const auto e = fpiv::estimate_factor_effect(ds, ef_factor - 1, ef_alpha);
                report.rows.push_back(fpiv::row_from_effect(
                    "factor " + std::to_string(ef_factor) + " (1 vs 0)", e));
            } else if (!ef_range.empty()) {
                const auto range = parse_range(ef_range);
                if (ef_d.empty())
                    throw fpiv::ValidationError("--range requires --d (and usually --dtilde)");
                const auto d = parse_bits(ef_d);
                if (!ef_dt.empty()) {
                    fpiv::SequenceSpec spec;
                    spec.hi_index = range.last;
                    spec.lag = range.length() - 1;
                    spec.pattern_d = d;
                    spec.pattern_dtilde = parse_bits(ef_dt);
                    const auto e = fpiv::estimate_joint_effect(ds, spec, ef_alpha);
                    report.rows.push_back(fpiv::row_from_effect(
                        "joint (" + ef_d + " vs " + ef_dt + ")", e));
                } else {
                    const auto r = fpiv::estimate_response_function(ds, range, d);
                    const auto e = fpiv::response_interval(r, ef_alpha, ds.n_units());
                    report.rows.push_back(fpiv::row_from_effect("response m(" + ef_d + ")", e));
                }
            } else {
                throw fpiv::ValidationError("specify --factor k or --range a:b");
            }
            add_weak_warnings(report);
            emit_report(report, ef_json, ef_csv, start);
        } else if (*ep) {
            if (!ep_probs.empty()) probs = ep_probs;
            const auto ds = fpiv::load_panel_csv(ep_data, probs);
            fpiv::RunReport report;
            report.command = join_args(argc, argv);
            report.input_digest = fpiv::file_digest(ep_data);
            if (ep_stack) {
                const auto e = fpiv::stack_lag0_effects(ds, ep_alpha);
                report.rows.push_back(fpiv::row_from_effect("lag-0 stacked over periods", e));
            } else {
                if (ep_t < 1) throw fpiv::ValidationError("--t is required (1-based period)");
                if (ep_lag == 0 && ep_d.empty()) {
                    const auto e = fpiv::estimate_lag0_effect(ds, ep_t - 1, ep_alpha);
                    report.rows.push_back(fpiv::row_from_effect(
                        "lag-0 effect at t=" + std::to_string(ep_t), e));
                } else {
                    if (ep_d.empty() || ep_dt.empty())
                        throw fpiv::ValidationError("--lag > 0 requires --d and --dtilde");
                    fpiv::SequenceSpec spec;
                    spec.hi_index = ep_t - 1;
                    spec.lag = ep_lag;
                    spec.pattern_d = parse_bits(ep_d);
                    spec.pattern_dtilde = parse_bits(ep_dt);
                    const auto e = fpiv::estimate_lagp_effect(ds, spec, ep_alpha);
                    report.rows.push_back(fpiv::row_from_effect(
                        "lag-" + std::to_string(ep_lag) + " effect at t=" +
                            std::to_string(ep_t) + " (" + ep_d + " vs " + ep_dt + ")",
                        e));
                }
            }
            add_weak_warnings(report);
            emit_report(report, ep_json, ep_csv, start);
        } else if (*ct) {
            if (!ct_probs.empty()) probs = ct_probs;
            const auto ds = fpiv::load_factorial_csv(ct_data, probs);
            const auto range = parse_range(ct_range);
            const auto rows = fpiv::estimate_compliance_table(ds, range, ct_alpha);
            fpiv::RunReport report;
            report.command = join_args(argc, argv);
            report.input_digest = fpiv::file_digest(ct_data);
            for (const auto& row : rows) {
                fpiv::ReportRow r;
                r.label = "fs(" + pat_label(row.pattern) + ")";
                r.point = row.fs_point;
                r.fs = row.fs_point;
                r.ci_lo = row.ci_lo;
                r.ci_hi = row.ci_hi;
                r.alpha = ct_alpha;
                r.weak_fs = std::abs(row.fs_point) < fpiv::kWeakFirstStageThreshold;
                report.rows.push_back(std::move(r));
            }
            add_weak_warnings(report);
            emit_report(report, ct_json, ct_csv, start);
        } else if (*sim) {
            auto cfg = fpiv::parse_sim_config(sim_config);
            cfg.workers = resolve_workers(sim_workers, cfg.workers);
            if (!sim_dump.empty()) {
                fpiv::CounterRng rng = fpiv::CounterRng::keyed(cfg.seed, 1);
                if (cfg.profile == fpiv::Profile::factorial) {
                    const auto pop =
                        fpiv::draw_factorial_population(rng, cfg.n_units, cfg.factorial_cfg);
                    fpiv::write_factorial_csv(
                        sim_dump, fpiv::assign_factorial(pop, rng, cfg.factorial_cfg));
                } else {
                    const auto pop = fpiv::draw_panel_population(rng, cfg.n_units,
                                                                 cfg.n_periods, cfg.panel_cfg);
                    fpiv::write_panel_csv(sim_dump,
                                          fpiv::assign_panel(pop, rng, cfg.panel_cfg));
                }
            }
            const auto results = fpiv::monte_carlo(cfg);
            fpiv::print_mc_table(std::cout, results);
            if (!sim_json.empty()) {
                std::ofstream out(sim_json);
                if (!out) throw fpiv::ValidationError("cannot write file: " + sim_json);
                out << fpiv::mc_to_json(cfg, results) << "\n";
            }
            if (!sim_csv.empty()) {
                std::ofstream out(sim_csv);
                if (!out) throw fpiv::ValidationError("cannot write file: " + sim_csv);
                out << fpiv::mc_to_csv(results);
            }
        } else if (*dec) {
            auto cfg = fpiv::parse_sim_config(dec_config);
            if (cfg.profile != fpiv::Profile::panel)
                throw fpiv::ValidationError("decompose requires a panel-profile config");
            if (cfg.n_periods != 2)
                throw fpiv::ValidationError("decompose requires n_periods = 2");
            fpiv::CounterRng rng = fpiv::CounterRng::keyed(cfg.seed, 1);
            const auto pop =
                fpiv::draw_panel_population(rng, cfg.n_units, cfg.n_periods, cfg.panel_cfg);
            const auto ds0 = fpiv::assign_panel(pop, rng, cfg.panel_cfg);
            const auto w = fpiv::wald_decomposition(pop, ds0);

            // Monte Carlo check: redraw assignments on the fixed population
            // and compare the average period-2 Wald estimate with the ratio.
            double sum = 0, sumsq = 0;
            int ok = 0;
            for (int rep = 0; rep < cfg.n_reps; ++rep) {
                fpiv::CounterRng r2 = fpiv::CounterRng::keyed(cfg.seed, rep + 2);
                const auto ds = fpiv::assign_panel(pop, r2, cfg.panel_cfg);
                try {
                    const double p = fpiv::tsls_period(ds, 1, cfg.alpha).point;
                    sum += p;
                    sumsq += p * p;
                    ++ok;
                } catch (const fpiv::EstimationError&) {
                }
            }
            const double mc_mean = ok ? sum / ok : 0.0;
            const double mc_se =
                ok > 1 ? std::sqrt((sumsq / ok - mc_mean * mc_mean) / (ok - 1)) : 0.0;
            const double resid = w.beta_rf - (w.complier_term + w.carryover_terms.first -
                                              w.carryover_terms.second + w.covariance_term);

            std::cout << "beta_rf            " << w.beta_rf << "\n"
                      << "beta_fs            " << w.beta_fs << "\n"
                      << "complier_term      " << w.complier_term << "\n"
                      << "carryover_first    " << w.carryover_terms.first << "\n"
                      << "carryover_second   " << w.carryover_terms.second << "\n"
                      << "covariance_term    " << w.covariance_term << "\n"
                      << "fs_complier_term   " << w.fs_complier_term << "\n"
                      << "fs_covariance_term " << w.fs_covariance_term << "\n"
                      << "ratio              " << w.ratio << "\n"
                      << "identity_residual  " << resid << "\n"
                      << "tsls_mc_mean       " << mc_mean << " (se " << mc_se << ", " << ok
                      << " draws)\n";
            if (!dec_json.empty()) {
                nlohmann::json j{{"beta_rf", w.beta_rf},
                                 {"beta_fs", w.beta_fs},
                                 {"complier_term", w.complier_term},
                                 {"carryover_first", w.carryover_terms.first},
                                 {"carryover_second", w.carryover_terms.second},
                                 {"covariance_term", w.covariance_term},
                                 {"fs_complier_term", w.fs_complier_term},
                                 {"fs_covariance_term", w.fs_covariance_term},
                                 {"ratio", w.ratio},
                                 {"identity_residual", resid},
                                 {"tsls_mc_mean", mc_mean},
                                 {"tsls_mc_se", mc_se},
                                 {"tsls_mc_draws", ok}};
                std::ofstream out(dec_json);
                if (!out) throw fpiv::ValidationError("cannot write file: " + dec_json);
                out << j.dump(2) << "\n";
            }
        }
    } catch (const fpiv::EstimationError& e) {
        std::cerr << "error (degenerate estimation): " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const fpiv::ValidationError& e) {
        std::cerr << "error (invalid input): " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
