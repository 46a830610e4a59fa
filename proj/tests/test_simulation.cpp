#include <doctest.h>

#include <array>
#include <cmath>

#include "fpiv/report.hpp"
#include "fpiv/simulation.hpp"
#include "helpers.hpp"

using namespace fpiv;

TEST_CASE("factorial population: monotone coupling and stated compliance rates") {
    CounterRng rng = CounterRng::keyed(2025, 0);
    const auto pop = draw_factorial_population(rng, 20000, {});
    pop.validate();
    double c1 = 0, c2 = 0;
    for (int i = 0; i < pop.n_units; ++i) {
        CHECK(pop.treat[0][1][i] >= pop.treat[0][0][i]);
        CHECK(pop.treat[1][1][i] >= pop.treat[1][0][i]);
        c1 += pop.type(0, i) == ComplianceType::complier;
        c2 += pop.type(1, i) == ComplianceType::complier;
    }
    CHECK(c1 / pop.n_units == doctest::Approx(0.70).epsilon(0.02));
    CHECK(c2 / pop.n_units == doctest::Approx(0.60).epsilon(0.02));
    // the joint uplift is the same 1.75 for every unit
    for (int i : {0, 7, 1999}) {
        CHECK(pop.outcome(1, 3, i) - pop.outcome(1, 0, i) == doctest::Approx(1.75));
    }
}

TEST_CASE("factorial oracle values") {
    auto [ds, pop] = gen_factorial_dgp(99, 5000);
    SequenceSpec spec;
    spec.hi_index = 1;
    spec.lag = 1;
    spec.pattern_d = {1, 1};
    spec.pattern_dtilde = Pattern{0, 0};
    CHECK(oracle_truth(pop, spec, ds.d()) == doctest::Approx(1.75).epsilon(1e-12));

    // factor-1 truth: 0.5 + 0.25 * mean of observed D2 over factor-1 compliers
    SequenceSpec f1;
    f1.hi_index = 0;
    f1.lag = 0;
    f1.pattern_d = {1};
    f1.pattern_dtilde = Pattern{0};
    double s = 0;
    int c = 0;
    for (int i = 0; i < pop.n_units; ++i) {
        if (pop.type(0, i) != ComplianceType::complier) continue;
        s += 0.5 + 0.25 * ds.d()(i, 1);
        ++c;
    }
    CHECK(oracle_truth(pop, f1, ds.d()) == doctest::Approx(s / c).epsilon(1e-12));
    CHECK(oracle_truth(pop, f1, ds.d()) == doctest::Approx(0.625).epsilon(0.05));
}

TEST_CASE("oracle rejects an empty complier set") {
    PotentialTable t;
    t.n_units = 1;
    t.n_stages = 1;
    t.is_panel = false;
    t.treat.assign(1, {std::vector<std::uint8_t>{0}, std::vector<std::uint8_t>{0}});
    t.outcomes.assign(1, std::vector<std::vector<double>>(2, std::vector<double>{1.0}));
    SequenceSpec spec;
    spec.hi_index = 0;
    spec.lag = 0;
    spec.pattern_d = {1};
    spec.pattern_dtilde = Pattern{0};
    BinaryMatrix d(1, 1);
    CHECK_THROWS_AS(oracle_truth(t, spec, d), EstimationError);
}

TEST_CASE("panel population: compliance, path propensities, constant truths") {
    CounterRng rng = CounterRng::keyed(2026, 0);
    const auto pop = draw_panel_population(rng, 20000, 2, {});
    pop.validate();
    double c = 0;
    for (int i = 0; i < pop.n_units; ++i) c += pop.type(0, i) == ComplianceType::complier;
    CHECK(c / pop.n_units == doctest::Approx(0.50).epsilon(0.02));
    // default design: both-treated assignment path has probability 0.36
    CHECK(pop.zpath_prob[0][3] == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(pop.zpath_prob[0][0] + pop.zpath_prob[0][1] + pop.zpath_prob[0][2] +
              pop.zpath_prob[0][3] ==
          doctest::Approx(1.0).epsilon(1e-12));
    // full-path uplift beta_now + beta_lag = 1.5, identical across units
    for (int i : {0, 3, 888}) {
        CHECK(pop.outcomes[1][3][i] - pop.outcomes[1][0][i] == doctest::Approx(1.5));
    }
}

TEST_CASE("panel oracle on the default profile") {
    auto [ds, pop] = gen_panel_dgp(7, 4000, 2);
    SequenceSpec spec;
    spec.hi_index = 1;
    spec.lag = 1;
    spec.pattern_d = {1, 0};
    spec.pattern_dtilde = Pattern{0, 0};
    CHECK(oracle_truth(pop, spec, ds.d()) == doctest::Approx(0.5).epsilon(1e-12));
    spec.pattern_d = {1, 1};
    CHECK(oracle_truth(pop, spec, ds.d()) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("same seed reproduces the dataset; different seeds do not") {
    auto [a, pa] = gen_factorial_dgp(123, 500);
    auto [b, pb] = gen_factorial_dgp(123, 500);
    auto [c, pc] = gen_factorial_dgp(124, 500);
    CHECK(a.z() == b.z());
    CHECK(a.d() == b.d());
    CHECK(a.y() == b.y());
    CHECK(a.z().data() != c.z().data());
}

TEST_CASE("single-replicate metrics collapse") {
    SimConfig cfg;
    cfg.profile = Profile::factorial;
    cfg.n_units = 400;
    cfg.n_reps = 1;
    cfg.seed = 5;
    cfg.workers = 1;
    const auto res = monte_carlo(cfg);
    REQUIRE(res.size() == 5);
    for (const auto& r : res) {
        CHECK(r.metrics.av_bias == r.metrics.med_bias);
        CHECK(r.metrics.rmse == doctest::Approx(std::abs(r.metrics.av_bias)));
        CHECK(r.metrics.n_reps == 1);
    }
}

TEST_CASE("metric output is byte-identical across worker counts") {
    SimConfig cfg;
    cfg.profile = Profile::panel;
    cfg.n_units = 200;
    cfg.n_periods = 2;
    cfg.n_reps = 60;
    cfg.seed = 42;
    cfg.estimators = {"ht", "tsls", "mv2sls"};
    cfg.effects = PanelEffects::both;
    cfg.panel_cfg.delta_feedback = 0.5;
    cfg.panel_cfg.outcome_adapt = 0.15;
    cfg.panel_cfg.assign_persist = 0.10;

    cfg.workers = 1;
    const auto r1 = monte_carlo(cfg);
    cfg.workers = 4;
    const auto r4 = monte_carlo(cfg);
    CHECK(mc_to_json(cfg, r1) == mc_to_json(cfg, r4));
    CHECK(mc_to_csv(r1) == mc_to_csv(r4));
}

TEST_CASE("rmse never falls below the absolute average bias") {
    SimConfig cfg;
    cfg.profile = Profile::factorial;
    cfg.n_units = 300;
    cfg.n_reps = 50;
    cfg.seed = 77;
    cfg.workers = 2;
    for (const auto& r : monte_carlo(cfg)) {
        CHECK(r.metrics.rmse >= std::abs(r.metrics.av_bias) - 1e-12);
        CHECK(r.metrics.cover >= 0.0);
        CHECK(r.metrics.cover <= 1.0);
    }
}
