#ifndef FPIV_REPORT_HPP
#define FPIV_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fpiv/simulation.hpp"
#include "fpiv/types.hpp"

namespace fpiv {

/// One printable estimate row. JSON field names are fixed: point, fs,
/// var_bound, ci_lo, ci_hi, alpha, weak_fs.
struct ReportRow {
    std::string label;
    double point = 0.0;
    double fs = 0.0;
    double var_bound = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double alpha = 0.05;
    bool weak_fs = false;
};

struct RunReport {
    std::string command;
    std::string input_digest;
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
    double wall_time_ms = 0.0;
};

ReportRow row_from_effect(std::string label, const EffectEstimate& e);

void print_report(std::ostream& os, const RunReport& report);
std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);
void write_report_json(const std::string& path, const RunReport& report);
void write_report_csv(const std::string& path, const RunReport& report);

/// Monte Carlo results in the simulation-table layout: one column per
/// (target, estimator), metric names down the rows.
void print_mc_table(std::ostream& os, const std::vector<SimTargetResult>& results);
std::string mc_to_json(const SimConfig& cfg, const std::vector<SimTargetResult>& results);
std::string mc_to_csv(const std::vector<SimTargetResult>& results);

/// JSON config for the simulate/decompose subcommands. Recognized keys:
/// profile ("factorial"|"panel"), n_units, n_periods, n_reps, seed, alpha,
/// estimators (array of "ht"|"tsls"|"mv2sls"), effects ("lag0"|"lag1"|"both"),
/// delta_feedback, outcome_adapt, assign_persist, workers. Unknown keys are
/// rejected.
SimConfig parse_sim_config(const std::string& path);

}  // namespace fpiv

#endif
