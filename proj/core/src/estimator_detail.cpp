#include "estimator_detail.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <string>

namespace fpiv::detail {

double normal_quantile_two_sided(double alpha) {
    boost::math::normal_distribution<double> n01;
    return boost::math::quantile(n01, 1.0 - alpha / 2.0);
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
}

void check_range(IndexRange range, int n_cols, const char* what) {
    if (range.first < 0 || range.last >= n_cols || range.first > range.last)
        throw ValidationError(std::string(what) + ": range out of bounds");
}

void check_pattern(std::span<const std::uint8_t> pattern, int expected_len) {
    if (static_cast<int>(pattern.size()) != expected_len)
        throw ValidationError("pattern length must equal range length");
    for (std::uint8_t b : pattern) {
        if (b > 1) throw ValidationError("pattern entries must be 0 or 1");
    }
}

ResponseAccum accumulate_response(std::span<const double> y,
                                  std::span<const std::uint8_t> match,
                                  std::span<const int> sign,
                                  std::span<const double> propensity) {
    const std::size_t n = y.size();
    CompensatedSum rf, fs, g2;
    for (std::size_t i = 0; i < n; ++i) {
        if (!match[i]) continue;  // empty-cell units contribute exactly zero
        const double w = 1.0 / propensity[i];
        rf.add(sign[i] * y[i] * w);
        fs.add(sign[i] * w);
        g2.add(y[i] * y[i] * w * w);
    }
    ResponseAccum out;
    out.n = static_cast<int>(n);
    out.rf_mean = rf.value() / static_cast<double>(n);
    out.fs_mean = fs.value() / static_cast<double>(n);
    out.gamma2_sum = g2.value();
    return out;
}

ResponseAccum response_over_range(const BinaryMatrix& z, const BinaryMatrix& d,
                                  std::span<const double> y, const AssignmentModel& probs,
                                  IndexRange range, std::span<const std::uint8_t> pattern) {
    const int n = z.rows();
    const int width = range.length();
    std::vector<std::uint8_t> match(n);
    std::vector<int> sign(n);
    std::vector<double> pi(n);
    for (int i = 0; i < n; ++i) {
        bool m = true;
        int zeros = 0;
        double prod = 1.0;
        for (int j = range.first; j <= range.last; ++j) {
            m = m && d(i, j) == pattern[j - range.first];
            zeros += z(i, j) == 0;
            const double p = probs.prob(i, j);
            prod *= z(i, j) ? p : 1.0 - p;
        }
        match[i] = m;
        sign[i] = (zeros % 2 == 0) ? 1 : -1;
        pi[i] = prod;
    }
    (void)width;
    return accumulate_response(y, match, sign, pi);
}

EffectEstimate bloom_interval(double point, double fs, double var_bound, double alpha,
                              int n_units) {
    EffectEstimate e;
    e.point = point;
    e.fs_point = fs;
    e.var_bound = var_bound;
    e.alpha = alpha;
    e.n_units = n_units;
    const double half = normal_quantile_two_sided(alpha) * std::sqrt(var_bound);
    e.ci_lo = point - half;
    e.ci_hi = point + half;
    e.weak_fs_flag = std::abs(fs) < kWeakFirstStageThreshold;
    return e;
}

}  // namespace fpiv::detail
