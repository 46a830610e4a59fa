#include "fpiv/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "fpiv/baselines.hpp"
#include "fpiv/factorial.hpp"
#include "fpiv/panel.hpp"

namespace fpiv {

namespace {

double clipped(double p, const PanelDgpConfig& cfg) {
    return std::clamp(p, cfg.prob_floor, cfg.prob_ceil);
}

/// History-conditional assignment probability for period t (>= 1). The
/// outcome channel responds to the innovation in the last outcome (outcome
/// net of the current uptake effect), the persistence channel to the last
/// assignment itself.
double panel_prob(const PanelDgpConfig& cfg, int t, double y_prev, int d_prev, int z_prev) {
    if (t == 0) return clipped(cfg.base_prob, cfg);
    const double innovation = y_prev - cfg.beta_now * d_prev;
    return clipped(cfg.base_prob + cfg.outcome_adapt * std::tanh(innovation / 2.0) +
                       cfg.assign_persist * (z_prev - cfg.base_prob),
                   cfg);
}

}  // namespace

PotentialTable draw_factorial_population(CounterRng& rng, int n_units,
                                         const FactorialDgpConfig& cfg) {
    if (n_units < 1) throw ValidationError("n_units must be >= 1");
    PotentialTable t;
    t.n_units = n_units;
    t.n_stages = 2;
    t.is_panel = false;
    t.treat.assign(2, {std::vector<std::uint8_t>(n_units), std::vector<std::uint8_t>(n_units)});
    t.outcomes.assign(2, {});
    t.outcomes[1].assign(4, std::vector<double>(n_units));

    for (int i = 0; i < n_units; ++i) {
        const double eps = rng.normal();
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        // Single uniform per unit-factor couples D(1) to D(0) so that
        // monotonicity holds exactly.
        for (int z = 0; z < 2; ++z) {
            t.treat[0][z][i] = u1 < cfg.uptake_base1 + cfg.uptake_gain1 * z;
            t.treat[1][z][i] = u2 < cfg.uptake_base2 + cfg.uptake_gain2 * z;
        }
        for (unsigned mask = 0; mask < 4; ++mask) {
            const double d1 = mask & 1u;
            const double d2 = (mask >> 1) & 1u;
            t.outcomes[1][mask][i] =
                cfg.beta0 + cfg.beta1 * d1 + cfg.beta2 * d2 + cfg.beta12 * d1 * d2 + eps;
        }
    }
    return t;
}

FactorialDataset assign_factorial(const PotentialTable& pop, CounterRng& rng,
                                  const FactorialDgpConfig& cfg) {
    const int n = pop.n_units;
    BinaryMatrix z(n, 2), d(n, 2);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        const std::uint8_t z1 = rng.bernoulli(cfg.p1);
        const std::uint8_t z2 = rng.bernoulli(cfg.p2);
        z(i, 0) = z1;
        z(i, 1) = z2;
        d(i, 0) = pop.treat[0][z1][i];
        d(i, 1) = pop.treat[1][z2][i];
        y[i] = pop.outcome(1, d(i, 0) + 2u * d(i, 1), i);
    }
    return FactorialDataset::make(std::move(z), std::move(d), std::move(y),
                                  AssignmentModel::per_column({cfg.p1, cfg.p2}));
}

std::pair<FactorialDataset, PotentialTable> gen_factorial_dgp(std::uint64_t seed, int n_units,
                                                              const FactorialDgpConfig& cfg) {
    CounterRng rng = CounterRng::keyed(seed, 0);
    PotentialTable pop = draw_factorial_population(rng, n_units, cfg);
    FactorialDataset ds = assign_factorial(pop, rng, cfg);
    return {std::move(ds), std::move(pop)};
}

PotentialTable draw_panel_population(CounterRng& rng, int n_units, int n_periods,
                                     const PanelDgpConfig& cfg) {
    if (n_units < 1) throw ValidationError("n_units must be >= 1");
    if (n_periods < 1 || n_periods > 16)
        throw ValidationError("n_periods must lie in [1, 16] (potential table is exponential in T)");
    PotentialTable t;
    t.n_units = n_units;
    t.n_stages = n_periods;
    t.is_panel = true;
    t.treat.assign(n_periods,
                   {std::vector<std::uint8_t>(n_units), std::vector<std::uint8_t>(n_units)});
    t.outcomes.assign(n_periods, {});
    for (int s = 0; s < n_periods; ++s)
        t.outcomes[s].assign(1ull << (s + 1), std::vector<double>(n_units));

    std::vector<double> noise(n_periods);
    for (int i = 0; i < n_units; ++i) {
        for (int s = 0; s < n_periods; ++s) {
            noise[s] = rng.normal();
            const double u = rng.uniform();
            for (int z = 0; z < 2; ++z)
                t.treat[s][z][i] = u < cfg.uptake_base + cfg.uptake_gain * z;
        }
        for (int s = 0; s < n_periods; ++s) {
            for (unsigned mask = 0; mask < (1u << (s + 1)); ++mask) {
                double y = cfg.beta_now * ((mask >> s) & 1u) + noise[s];
                if (s >= 1) {
                    y += cfg.beta_lag * ((mask >> (s - 1)) & 1u);
                    y += cfg.delta_feedback * t.outcomes[s - 1][mask & ((1u << s) - 1u)][i];
                }
                t.outcomes[s][mask][i] = y;
            }
        }
    }

    // Exact probability of every assignment path, fixed by the design and the
    // unit's potential values.
    t.zpath_prob.assign(n_units, std::vector<double>(1ull << n_periods, 0.0));
    for (int i = 0; i < n_units; ++i) {
        for (unsigned zmask = 0; zmask < (1u << n_periods); ++zmask) {
            double prob = 1.0;
            double y_prev = 0.0;
            int d_prev = 0;
            int z_prev = 0;
            unsigned dmask = 0;
            for (int s = 0; s < n_periods; ++s) {
                const int zs = (zmask >> s) & 1u;
                const double p = panel_prob(cfg, s, y_prev, d_prev, z_prev);
                prob *= zs ? p : 1.0 - p;
                d_prev = t.treat[s][zs][i];
                dmask |= static_cast<unsigned>(d_prev) << s;
                y_prev = t.outcomes[s][dmask][i];
                z_prev = zs;
            }
            t.zpath_prob[i][zmask] = prob;
        }
    }
    return t;
}

PanelDataset assign_panel(const PotentialTable& pop, CounterRng& rng,
                          const PanelDgpConfig& cfg) {
    const int n = pop.n_units;
    const int T = pop.n_stages;
    BinaryMatrix z(n, T), d(n, T);
    std::vector<double> y(static_cast<std::size_t>(n) * T);
    std::vector<double> probs(static_cast<std::size_t>(n) * T);
    for (int i = 0; i < n; ++i) {
        double y_prev = 0.0;
        int d_prev = 0;
        int z_prev = 0;
        unsigned dmask = 0;
        for (int s = 0; s < T; ++s) {
            const double p = panel_prob(cfg, s, y_prev, d_prev, z_prev);
            const std::uint8_t zs = rng.bernoulli(p);
            z(i, s) = zs;
            d(i, s) = pop.treat[s][zs][i];
            d_prev = d(i, s);
            dmask |= static_cast<unsigned>(d(i, s)) << s;
            const double ys = pop.outcomes[s][dmask][i];
            y[static_cast<std::size_t>(i) * T + s] = ys;
            probs[static_cast<std::size_t>(i) * T + s] = p;
            y_prev = ys;
            z_prev = zs;
        }
    }
    return PanelDataset::make(std::move(z), std::move(d), std::move(y),
                              AssignmentModel::per_unit(n, T, std::move(probs)));
}

std::pair<PanelDataset, PotentialTable> gen_panel_dgp(std::uint64_t seed, int n_units,
                                                      int n_periods, const PanelDgpConfig& cfg) {
    CounterRng rng = CounterRng::keyed(seed, 0);
    PotentialTable pop = draw_panel_population(rng, n_units, n_periods, cfg);
    PanelDataset ds = assign_panel(pop, rng, cfg);
    return {std::move(ds), std::move(pop)};
}

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

namespace {

struct RepOutcome {
    double err = 0.0;
    double cil = 0.0;
    double var_bound = 0.0;
    double point = 0.0;
    bool covered = false;
    bool ok = false;
};

SequenceSpec make_spec(int hi, int lag, Pattern d, Pattern dt) {
    SequenceSpec s;
    s.hi_index = hi;
    s.lag = lag;
    s.pattern_d = std::move(d);
    s.pattern_dtilde = std::move(dt);
    return s;
}

std::string pat_str(const Pattern& p) {
    std::string s;
    for (auto b : p) s += b ? '1' : '0';
    return s;
}

RepOutcome score(const EffectEstimate& e, double truth) {
    RepOutcome r;
    r.err = e.point - truth;
    r.cil = e.ci_hi - e.ci_lo;
    r.var_bound = e.var_bound;
    r.point = e.point;
    r.covered = e.ci_lo <= truth && truth <= e.ci_hi;
    r.ok = true;
    return r;
}

McMetrics summarize(const std::vector<RepOutcome>& reps) {
    McMetrics m;
    m.n_reps = static_cast<int>(reps.size());
    std::vector<double> errs;
    errs.reserve(reps.size());
    double sum_err = 0, sum_sq = 0, sum_cov = 0, sum_cil = 0, sum_vb = 0;
    double sum_pt = 0;
    for (const auto& r : reps) {
        if (!r.ok) {
            ++m.n_failures;
            continue;
        }
        errs.push_back(r.err);
        sum_err += r.err;
        sum_sq += r.err * r.err;
        sum_cov += r.covered;
        sum_cil += r.cil;
        sum_vb += r.var_bound;
        sum_pt += r.point;
    }
    const double k = static_cast<double>(errs.size());
    if (k == 0) return m;
    m.av_bias = sum_err / k;
    m.rmse = std::sqrt(sum_sq / k);
    m.cover = sum_cov / k;
    m.cil = sum_cil / k;
    m.mean_var_bound = sum_vb / k;
    std::sort(errs.begin(), errs.end());
    m.med_bias = (errs.size() % 2 == 1)
                     ? errs[errs.size() / 2]
                     : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
    const double mean_pt = sum_pt / k;
    double ss = 0;
    for (const auto& r : reps) {
        if (r.ok) ss += (r.point - mean_pt) * (r.point - mean_pt);
    }
    m.emp_var = ss / k;
    return m;
}

struct TargetDef {
    std::string name;
    std::string estimator;
};

}  // namespace

std::vector<SimTargetResult> monte_carlo(const SimConfig& cfg) {
    if (cfg.n_reps < 1) throw ValidationError("n_reps must be >= 1");
    const bool factorial = cfg.profile == Profile::factorial;
    const bool want_ht =
        std::find(cfg.estimators.begin(), cfg.estimators.end(), "ht") != cfg.estimators.end();
    const bool want_tsls =
        std::find(cfg.estimators.begin(), cfg.estimators.end(), "tsls") != cfg.estimators.end();
    const bool want_mv = std::find(cfg.estimators.begin(), cfg.estimators.end(), "mv2sls") !=
                         cfg.estimators.end();
    const bool lag0 = cfg.effects != PanelEffects::lag1;
    const bool lag1 = cfg.effects != PanelEffects::lag0;

    // Target list, fixed order; the per-replicate runner appends outcomes in
    // this same order.
    std::vector<TargetDef> targets;
    const std::vector<std::pair<Pattern, Pattern>> joint_pairs = {
        {{1, 1}, {0, 0}}, {{1, 0}, {0, 0}}, {{0, 1}, {0, 0}}};
    if (factorial) {
        for (const auto& [d, dt] : joint_pairs)
            targets.push_back({"joint(" + pat_str(d) + "," + pat_str(dt) + ")", "ht"});
        targets.push_back({"factor1", "ht"});
        targets.push_back({"factor2", "ht"});
    } else {
        if (lag0) {
            for (int t = 0; t < cfg.n_periods; ++t) {
                const std::string nm = "lag0 t=" + std::to_string(t + 1);
                if (want_ht) targets.push_back({nm, "ht"});
                if (want_tsls) targets.push_back({nm, "tsls"});
            }
            if (want_ht) targets.push_back({"lag0 total", "ht"});
            if (want_tsls) targets.push_back({"lag0 total", "tsls"});
        }
        if (lag1) {
            if (cfg.n_periods != 2)
                throw ValidationError("lag-1 targets require exactly two periods");
            for (const auto& [d, dt] : joint_pairs) {
                const std::string nm = "lag1(" + pat_str(d) + "," + pat_str(dt) + ")";
                if (want_ht) targets.push_back({nm, "ht"});
                if (want_mv) targets.push_back({nm, "mv2sls"});
            }
        }
    }
    if (targets.empty()) throw ValidationError("no estimators selected for this profile");

    const std::size_t n_targets = targets.size();
    std::vector<std::vector<RepOutcome>> results(n_targets,
                                                 std::vector<RepOutcome>(cfg.n_reps));

    auto run_factorial_rep = [&](int rep) {
        CounterRng rng = CounterRng::keyed(cfg.seed, static_cast<std::uint64_t>(rep) + 1);
        const PotentialTable pop = draw_factorial_population(rng, cfg.n_units, cfg.factorial_cfg);
        const FactorialDataset ds = assign_factorial(pop, rng, cfg.factorial_cfg);
        std::size_t slot = 0;
        for (const auto& [d, dt] : joint_pairs) {
            auto& out = results[slot++][rep];
            try {
                const auto spec = make_spec(1, 1, d, dt);
                out = score(estimate_joint_effect(ds, spec, cfg.alpha),
                            oracle_truth(pop, spec, ds.d()));
            } catch (const EstimationError&) {
            }
        }
        for (int k = 0; k < 2; ++k) {
            auto& out = results[slot++][rep];
            try {
                out = score(estimate_factor_effect(ds, k, cfg.alpha),
                            oracle_truth(pop, make_spec(k, 0, {1}, {0}), ds.d()));
            } catch (const EstimationError&) {
            }
        }
    };

    auto run_panel_rep = [&](int rep) {
        CounterRng rng = CounterRng::keyed(cfg.seed, static_cast<std::uint64_t>(rep) + 1);
        const PotentialTable pop =
            draw_panel_population(rng, cfg.n_units, cfg.n_periods, cfg.panel_cfg);
        const PanelDataset ds = assign_panel(pop, rng, cfg.panel_cfg);
        std::size_t slot = 0;
        if (lag0) {
            std::vector<double> truths(cfg.n_periods);
            std::vector<double> complier_counts(cfg.n_periods);
            for (int t = 0; t < cfg.n_periods; ++t) {
                truths[t] = oracle_truth(pop, make_spec(t, 0, {1}, {0}), ds.d());
                int c = 0;
                for (int i = 0; i < pop.n_units; ++i)
                    c += pop.type(t, i) == ComplianceType::complier;
                complier_counts[t] = c;
            }
            for (int t = 0; t < cfg.n_periods; ++t) {
                if (want_ht) {
                    auto& out = results[slot++][rep];
                    try {
                        out = score(estimate_lag0_effect(ds, t, cfg.alpha), truths[t]);
                    } catch (const EstimationError&) {
                    }
                }
                if (want_tsls) {
                    auto& out = results[slot++][rep];
                    try {
                        out = score(tsls_period(ds, t, cfg.alpha), truths[t]);
                    } catch (const EstimationError&) {
                    }
                }
            }
            double wsum = 0, wtot = 0;
            for (int t = 0; t < cfg.n_periods; ++t) {
                wsum += complier_counts[t] * truths[t];
                wtot += complier_counts[t];
            }
            const double total_truth = wtot > 0 ? wsum / wtot : 0.0;
            if (want_ht) {
                auto& out = results[slot++][rep];
                try {
                    out = score(stack_lag0_effects(ds, cfg.alpha), total_truth);
                } catch (const EstimationError&) {
                }
            }
            if (want_tsls) {
                auto& out = results[slot++][rep];
                try {
                    out = score(tsls_pooled(ds, cfg.alpha), total_truth);
                } catch (const EstimationError&) {
                }
            }
        }
        if (lag1) {
            for (const auto& [d, dt] : joint_pairs) {
                const auto spec = make_spec(1, 1, d, dt);
                double truth = 0.0;
                bool have_truth = true;
                try {
                    truth = oracle_truth(pop, spec, ds.d());
                } catch (const EstimationError&) {
                    have_truth = false;
                }
                if (want_ht) {
                    auto& out = results[slot++][rep];
                    if (have_truth) {
                        try {
                            out = score(estimate_lagp_effect(ds, spec, cfg.alpha), truth);
                        } catch (const EstimationError&) {
                        }
                    }
                }
                if (want_mv) {
                    auto& out = results[slot++][rep];
                    if (have_truth) {
                        try {
                            out = score(tsls_multivariate(ds, d, dt, cfg.alpha), truth);
                        } catch (const EstimationError&) {
                        }
                    }
                }
            }
        }
    };

    const int n_workers = cfg.workers > 0
                              ? cfg.workers
                              : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int rep = next.fetch_add(1);
            if (rep >= cfg.n_reps) break;
            if (factorial)
                run_factorial_rep(rep);
            else
                run_panel_rep(rep);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<SimTargetResult> out;
    out.reserve(n_targets);
    for (std::size_t j = 0; j < n_targets; ++j)
        out.push_back({targets[j].name, targets[j].estimator, summarize(results[j])});
    return out;
}

}  // namespace fpiv
