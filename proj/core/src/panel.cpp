#include "fpiv/panel.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "estimator_detail.hpp"
#include "fpiv/multidiff.hpp"

namespace fpiv {

namespace {

std::vector<double> outcome_column(const PanelDataset& ds, int t) {
    std::vector<double> y(ds.n_units());
    for (int i = 0; i < ds.n_units(); ++i) y[i] = ds.y(i, t);
    return y;
}

}  // namespace

DynamicEffectEstimate estimate_lag0_effect(const PanelDataset& ds, int t, double alpha) {
    detail::check_alpha(alpha);
    if (t < 0 || t >= ds.n_periods()) throw ValidationError("period index out of range");
    const auto y = outcome_column(ds, t);
    const EffectEstimate base =
        detail::wald_effect(ds.z(), ds.d(), y, ds.propensity(), t, alpha);
    DynamicEffectEstimate e;
    static_cast<EffectEstimate&>(e) = base;
    e.t = t;
    e.lag = 0;
    e.pattern_d = {1};
    e.pattern_dtilde = {0};
    return e;
}

ResponseEstimate estimate_lagp_response(const PanelDataset& ds, int t, int p,
                                        std::span<const std::uint8_t> pattern) {
    if (t < 0 || t >= ds.n_periods()) throw ValidationError("period index out of range");
    if (p < 0 || t - p < 0) throw ValidationError("lag exceeds available history");
    const IndexRange range{t - p, t};
    detail::check_pattern(pattern, range.length());
    const auto y = outcome_column(ds, t);
    const auto acc =
        detail::response_over_range(ds.z(), ds.d(), y, ds.propensity(), range, pattern);
    if (acc.fs_mean == 0.0) {
        std::string s;
        for (auto b : pattern) s += b ? '1' : '0';
        throw EstimationError("degenerate first stage for pattern " + s +
                              " (no joint compliers detected)");
    }
    ResponseEstimate r;
    r.pattern.assign(pattern.begin(), pattern.end());
    r.rf_point = acc.rf_mean;
    r.fs_point = acc.fs_mean;
    r.point = acc.rf_mean / acc.fs_mean;
    r.rf_var_bound = acc.gamma2_sum / (static_cast<double>(acc.n) * acc.n);
    return r;
}

DynamicEffectEstimate estimate_lagp_effect(const PanelDataset& ds, const SequenceSpec& spec,
                                           double alpha) {
    detail::check_alpha(alpha);
    spec.validate(ds.n_periods());
    if (!spec.pattern_dtilde)
        throw ValidationError("estimate_lagp_effect requires both patterns");
    const auto rd = estimate_lagp_response(ds, spec.hi_index, spec.lag, spec.pattern_d);
    const auto rdt = estimate_lagp_response(ds, spec.hi_index, spec.lag, *spec.pattern_dtilde);

    const double point = rd.point - rdt.point;
    const double var_bound = rd.rf_var_bound / (rd.fs_point * rd.fs_point) +
                             rdt.rf_var_bound / (rdt.fs_point * rdt.fs_point);
    const double fs =
        std::abs(rd.fs_point) <= std::abs(rdt.fs_point) ? rd.fs_point : rdt.fs_point;

    DynamicEffectEstimate e;
    static_cast<EffectEstimate&>(e) =
        detail::bloom_interval(point, fs, var_bound, alpha, ds.n_units());
    e.t = spec.hi_index;
    e.lag = spec.lag;
    e.pattern_d = spec.pattern_d;
    e.pattern_dtilde = *spec.pattern_dtilde;
    return e;
}

EffectEstimate stack_lag0_effects(const PanelDataset& ds, double alpha, StackMode mode) {
    detail::check_alpha(alpha);
    const int n = ds.n_units();
    const int T = ds.n_periods();

    if (mode == StackMode::mean_of_points) {
        CompensatedSum point_sum, var_sum;
        double min_fs = std::numeric_limits<double>::infinity();
        for (int t = 0; t < T; ++t) {
            const auto e = estimate_lag0_effect(ds, t, alpha);
            point_sum.add(e.point);
            var_sum.add(e.var_bound);
            if (std::abs(e.fs_point) < std::abs(min_fs)) min_fs = e.fs_point;
        }
        return detail::bloom_interval(point_sum.value() / T, min_fs,
                                      var_sum.value() / (static_cast<double>(T) * T), alpha,
                                      n);
    }

    // Pooled ratio over all N*T unit-period contributions: weights each period
    // by its complier share.
    CompensatedSum rf, fs, g2;
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            const double p = ds.propensity().prob(i, t);
            const double pi = ds.z()(i, t) ? p : 1.0 - p;
            const double w = 1.0 / pi;
            const int sign = ds.z()(i, t) ? 1 : -1;
            const double y = ds.y(i, t);
            rf.add(sign * y * w);
            fs.add(sign * ds.d()(i, t) * w);
            g2.add(y * y * w * w);
        }
    }
    const double nt = static_cast<double>(n) * T;
    const double fs_mean = fs.value() / nt;
    if (fs_mean == 0.0) throw EstimationError("pooled first stage is exactly zero");
    const double point = (rf.value() / nt) / fs_mean;
    const double var_bound = g2.value() / (nt * nt) / (fs_mean * fs_mean);
    return detail::bloom_interval(point, fs_mean, var_bound, alpha, n);
}

}  // namespace fpiv
