#include "fpiv/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace fpiv {

using nlohmann::json;

ReportRow row_from_effect(std::string label, const EffectEstimate& e) {
    ReportRow r;
    r.label = std::move(label);
    r.point = e.point;
    r.fs = e.fs_point;
    r.var_bound = e.var_bound;
    r.ci_lo = e.ci_lo;
    r.ci_hi = e.ci_hi;
    r.alpha = e.alpha;
    r.weak_fs = e.weak_fs_flag;
    return r;
}

void print_report(std::ostream& os, const RunReport& report) {
    os << "input digest: " << report.input_digest << "\n";
    os << std::left << std::setw(28) << "estimate" << std::right << std::setw(10) << "point"
       << std::setw(10) << "fs" << std::setw(11) << "ci_lo" << std::setw(11) << "ci_hi"
       << std::setw(7) << "flags" << "\n";
    for (const auto& r : report.rows) {
        os << std::left << std::setw(28) << r.label << std::right << std::fixed
           << std::setprecision(4) << std::setw(10) << r.point << std::setw(10) << r.fs
           << std::setw(11) << r.ci_lo << std::setw(11) << r.ci_hi << std::setw(7)
           << (r.weak_fs ? "weak" : "") << "\n";
        os.unsetf(std::ios::fixed);
        os << std::setprecision(6);
    }
    for (const auto& w : report.warnings) os << "warning: " << w << "\n";
    os << "wall time: " << report.wall_time_ms << " ms\n";
}

namespace {

json row_to_json(const ReportRow& r) {
    return json{{"label", r.label},     {"point", r.point},   {"fs", r.fs},
                {"var_bound", r.var_bound}, {"ci_lo", r.ci_lo},   {"ci_hi", r.ci_hi},
                {"alpha", r.alpha},     {"weak_fs", r.weak_fs}};
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    json j;
    j["command"] = report.command;
    j["input_digest"] = report.input_digest;
    j["estimates"] = json::array();
    for (const auto& r : report.rows) j["estimates"].push_back(row_to_json(r));
    j["warnings"] = report.warnings;
    j["wall_time_ms"] = report.wall_time_ms;
    return j.dump(2);
}

RunReport report_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    RunReport rep;
    rep.command = j.at("command").get<std::string>();
    rep.input_digest = j.at("input_digest").get<std::string>();
    for (const auto& e : j.at("estimates")) {
        ReportRow r;
        r.label = e.at("label").get<std::string>();
        r.point = e.at("point").get<double>();
        r.fs = e.at("fs").get<double>();
        r.var_bound = e.at("var_bound").get<double>();
        r.ci_lo = e.at("ci_lo").get<double>();
        r.ci_hi = e.at("ci_hi").get<double>();
        r.alpha = e.at("alpha").get<double>();
        r.weak_fs = e.at("weak_fs").get<bool>();
        rep.rows.push_back(std::move(r));
    }
    rep.warnings = j.at("warnings").get<std::vector<std::string>>();
    rep.wall_time_ms = j.at("wall_time_ms").get<double>();
    return rep;
}

void write_report_json(const std::string& path, const RunReport& report) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << report_to_json(report) << "\n";
}

void write_report_csv(const std::string& path, const RunReport& report) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << "label,point,fs,var_bound,ci_lo,ci_hi,alpha,weak_fs\n";
    out << std::setprecision(17);
    for (const auto& r : report.rows) {
        out << r.label << "," << r.point << "," << r.fs << "," << r.var_bound << "," << r.ci_lo
            << "," << r.ci_hi << "," << r.alpha << "," << (r.weak_fs ? 1 : 0) << "\n";
    }
}

namespace {

const char* kMetricNames[] = {"Av. Bias", "Med. Bias", "RMSE", "Cover", "CIL"};

double metric_value(const McMetrics& m, int row) {
    switch (row) {
        case 0: return m.av_bias;
        case 1: return m.med_bias;
        case 2: return m.rmse;
        case 3: return m.cover;
        default: return m.cil;
    }
}

}  // namespace

void print_mc_table(std::ostream& os, const std::vector<SimTargetResult>& results) {
    os << std::left << std::setw(11) << "Metric";
    for (const auto& r : results)
        os << std::right << std::setw(22) << (r.target + " [" + r.estimator + "]");
    os << "\n";
    for (int row = 0; row < 5; ++row) {
        os << std::left << std::setw(11) << kMetricNames[row];
        for (const auto& r : results)
            os << std::right << std::fixed << std::setprecision(4) << std::setw(22)
               << metric_value(r.metrics, row);
        os << "\n";
        os.unsetf(std::ios::fixed);
        os << std::setprecision(6);
    }
    int failures = 0;
    for (const auto& r : results) failures += r.metrics.n_failures;
    if (failures > 0) {
        os << "failed replicates per target:";
        for (const auto& r : results)
            os << " " << r.target << "[" << r.estimator << "]=" << r.metrics.n_failures;
        os << "\n";
    }
}

std::string mc_to_json(const SimConfig& cfg, const std::vector<SimTargetResult>& results) {
    json j;
    j["profile"] = cfg.profile == Profile::factorial ? "factorial" : "panel";
    j["n_units"] = cfg.n_units;
    j["n_periods"] = cfg.n_periods;
    j["n_reps"] = cfg.n_reps;
    j["seed"] = cfg.seed;
    j["alpha"] = cfg.alpha;
    j["results"] = json::array();
    for (const auto& r : results) {
        j["results"].push_back(json{{"target", r.target},
                                    {"estimator", r.estimator},
                                    {"av_bias", r.metrics.av_bias},
                                    {"med_bias", r.metrics.med_bias},
                                    {"rmse", r.metrics.rmse},
                                    {"cover", r.metrics.cover},
                                    {"cil", r.metrics.cil},
                                    {"n_reps", r.metrics.n_reps},
                                    {"n_failures", r.metrics.n_failures},
                                    {"mean_var_bound", r.metrics.mean_var_bound},
                                    {"emp_var", r.metrics.emp_var}});
    }
    return j.dump(2);
}

std::string mc_to_csv(const std::vector<SimTargetResult>& results) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "Metric";
    for (const auto& r : results) os << "," << r.target << " [" << r.estimator << "]";
    os << "\n";
    for (int row = 0; row < 5; ++row) {
        os << kMetricNames[row];
        for (const auto& r : results) os << "," << metric_value(r.metrics, row);
        os << "\n";
    }
    return os.str();
}

SimConfig parse_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error in " + path + ": " + e.what());
    }

    static const std::vector<std::string> known = {
        "profile",   "n_units",        "n_periods",    "n_reps",
        "seed",      "alpha",          "estimators",   "effects",
        "delta_feedback", "outcome_adapt", "assign_persist", "workers"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError("unknown config key '" + key + "' in " + path);
    }

    SimConfig cfg;
    const std::string profile = j.value("profile", std::string("factorial"));
    if (profile == "factorial")
        cfg.profile = Profile::factorial;
    else if (profile == "panel")
        cfg.profile = Profile::panel;
    else
        throw ValidationError("config: profile must be 'factorial' or 'panel'");
    cfg.n_units = j.value("n_units", cfg.n_units);
    cfg.n_periods = j.value("n_periods", cfg.n_periods);
    cfg.n_reps = j.value("n_reps", cfg.n_reps);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("estimators"))
        cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
    for (const auto& e : cfg.estimators) {
        if (e != "ht" && e != "tsls" && e != "mv2sls")
            throw ValidationError("config: unknown estimator '" + e + "'");
    }
    const std::string effects = j.value("effects", std::string("lag0"));
    if (effects == "lag0")
        cfg.effects = PanelEffects::lag0;
    else if (effects == "lag1")
        cfg.effects = PanelEffects::lag1;
    else if (effects == "both")
        cfg.effects = PanelEffects::both;
    else
        throw ValidationError("config: effects must be 'lag0', 'lag1' or 'both'");
    cfg.panel_cfg.delta_feedback = j.value("delta_feedback", 0.0);
    cfg.panel_cfg.outcome_adapt = j.value("outcome_adapt", 0.0);
    cfg.panel_cfg.assign_persist = j.value("assign_persist", 0.0);
    cfg.workers = j.value("workers", 0);
    if (cfg.n_units < 1 || cfg.n_reps < 1 || cfg.n_periods < 1)
        throw ValidationError("config: n_units, n_periods and n_reps must be positive");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ValidationError("config: alpha must lie in (0,1)");
    return cfg;
}

}  // namespace fpiv
