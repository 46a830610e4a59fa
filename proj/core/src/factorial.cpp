#include "fpiv/factorial.hpp"

#include <cmath>
#include <string>

#include "estimator_detail.hpp"
#include "fpiv/multidiff.hpp"
#include "fpiv/propensity.hpp"

namespace fpiv {

namespace {

std::string pattern_str(std::span<const std::uint8_t> p) {
    std::string s;
    for (auto b : p) s += b ? '1' : '0';
    return s;
}

/// Shared by the factorial factor-k and panel lag-0 estimators: two-stage HT
/// on a single assignment column.
detail::ResponseAccum wald_column(const BinaryMatrix& z, const BinaryMatrix& d,
                                  std::span<const double> y, const AssignmentModel& probs,
                                  int col) {
    const int n = z.rows();
    CompensatedSum rf, fs, g2;
    for (int i = 0; i < n; ++i) {
        const double p = probs.prob(i, col);
        const double pi = z(i, col) ? p : 1.0 - p;
        const double w = 1.0 / pi;
        const int sign = z(i, col) ? 1 : -1;
        rf.add(sign * y[i] * w);
        fs.add(sign * d(i, col) * w);
        g2.add(y[i] * y[i] * w * w);
    }
    detail::ResponseAccum out;
    out.n = n;
    out.rf_mean = rf.value() / n;
    out.fs_mean = fs.value() / n;
    out.gamma2_sum = g2.value();
    return out;
}

}  // namespace

namespace detail {

EffectEstimate wald_effect(const BinaryMatrix& z, const BinaryMatrix& d,
                           std::span<const double> y, const AssignmentModel& probs, int col,
                           double alpha) {
    const auto acc = wald_column(z, d, y, probs, col);
    if (acc.fs_mean == 0.0)
        throw EstimationError("first stage is exactly zero (no compliers detected)");
    const double point = acc.rf_mean / acc.fs_mean;
    const double n2 = static_cast<double>(acc.n) * acc.n;
    const double var_bound = acc.gamma2_sum / n2 / (acc.fs_mean * acc.fs_mean);
    return bloom_interval(point, acc.fs_mean, var_bound, alpha, acc.n);
}

}  // namespace detail

EffectEstimate estimate_factor_effect(const FactorialDataset& ds, int k, double alpha) {
    detail::check_alpha(alpha);
    if (k < 0 || k >= ds.n_factors()) throw ValidationError("factor index out of range");
    return detail::wald_effect(ds.z(), ds.d(), ds.y(), ds.assign_probs(), k, alpha);
}

ResponseEstimate estimate_response_function(const FactorialDataset& ds, IndexRange range,
                                            std::span<const std::uint8_t> pattern) {
    detail::check_range(range, ds.n_factors(), "estimate_response_function");
    detail::check_pattern(pattern, range.length());
    const auto acc =
        detail::response_over_range(ds.z(), ds.d(), ds.y(), ds.assign_probs(), range, pattern);
    if (acc.fs_mean == 0.0)
        throw EstimationError("degenerate first stage for pattern " + pattern_str(pattern) +
                              " (no joint compliers detected)");
    ResponseEstimate r;
    r.pattern.assign(pattern.begin(), pattern.end());
    r.rf_point = acc.rf_mean;
    r.fs_point = acc.fs_mean;
    r.point = acc.rf_mean / acc.fs_mean;
    r.rf_var_bound = acc.gamma2_sum / (static_cast<double>(acc.n) * acc.n);
    return r;
}

EffectEstimate response_interval(const ResponseEstimate& r, double alpha, int n_units) {
    detail::check_alpha(alpha);
    const double var_bound = r.rf_var_bound / (r.fs_point * r.fs_point);
    return detail::bloom_interval(r.point, r.fs_point, var_bound, alpha, n_units);
}

namespace {

EffectEstimate joint_from_responses(const ResponseEstimate& rd, const ResponseEstimate& rdt,
                                    double alpha, int n_units) {
    const double point = rd.point - rdt.point;
    const double var_bound = rd.rf_var_bound / (rd.fs_point * rd.fs_point) +
                             rdt.rf_var_bound / (rdt.fs_point * rdt.fs_point);
    // Report the weaker of the two first stages; it is the one that limits
    // the reliability of the Bloom interval.
    const double fs =
        std::abs(rd.fs_point) <= std::abs(rdt.fs_point) ? rd.fs_point : rdt.fs_point;
    return detail::bloom_interval(point, fs, var_bound, alpha, n_units);
}

}  // namespace

EffectEstimate estimate_joint_effect(const FactorialDataset& ds, const SequenceSpec& spec,
                                     double alpha) {
    detail::check_alpha(alpha);
    spec.validate(ds.n_factors());
    if (!spec.pattern_dtilde)
        throw ValidationError("estimate_joint_effect requires both patterns");
    const auto rd = estimate_response_function(ds, spec.range(), spec.pattern_d);
    const auto rdt = estimate_response_function(ds, spec.range(), *spec.pattern_dtilde);
    return joint_from_responses(rd, rdt, alpha, ds.n_units());
}

std::vector<ComplianceRow> estimate_compliance_table(const FactorialDataset& ds,
                                                     IndexRange range, double alpha) {
    detail::check_alpha(alpha);
    detail::check_range(range, ds.n_factors(), "estimate_compliance_table");
    const int width = range.length();
    const double z_crit = detail::normal_quantile_two_sided(alpha);
    const int n = ds.n_units();

    std::vector<ComplianceRow> rows;
    for (unsigned m = 1u << width; m-- > 0;) {  // (1,1), (1,0), (0,1), (0,0) order
        const unsigned mask = m;
        Pattern pat(width);
        for (int j = 0; j < width; ++j) pat[j] = (mask >> (width - 1 - j)) & 1u;

        CompensatedSum fs, g2;
        for (int i = 0; i < n; ++i) {
            bool match = true;
            int zeros = 0;
            double pi = 1.0;
            for (int j = range.first; j <= range.last; ++j) {
                match = match && ds.d()(i, j) == pat[j - range.first];
                zeros += ds.z()(i, j) == 0;
                const double p = ds.assign_probs().prob(i, j);
                pi *= ds.z()(i, j) ? p : 1.0 - p;
            }
            if (!match) continue;
            const double w = 1.0 / pi;
            fs.add((zeros % 2 == 0 ? 1.0 : -1.0) * w);
            g2.add(w * w);
        }
        ComplianceRow row;
        row.pattern = std::move(pat);
        row.fs_point = fs.value() / n;
        const double half =
            z_crit * std::sqrt(g2.value() / (static_cast<double>(n) * n));
        row.ci_lo = row.fs_point - half;
        row.ci_hi = row.fs_point + half;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fpiv
