#ifndef FPIV_MULTIDIFF_HPP
#define FPIV_MULTIDIFF_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "fpiv/types.hpp"

namespace fpiv {

/// Mechanical sign carried by an assignment pattern in the multiple-differences
/// expansion: (-1)^(number of zero entries). Throws on an empty pattern.
int sign_factor(std::span<const std::uint8_t> pattern);

/// One unit's term in the multiple-differences Horvitz-Thompson sum.
struct HtContribution {
    int unit = 0;
    Pattern observed_pattern;
    double weight = 0.0;        // 1 / pi(observed pattern)
    double signed_value = 0.0;  // sign * value * weight
};

/// Kahan-compensated accumulator. Alternating signs in the multiple-differences
/// sums cancel heavily, so plain accumulation loses digits at N >= 1e4.
class CompensatedSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

/// Closed form of the (p+1)-fold difference of Horvitz-Thompson means across
/// assignment patterns: each unit contributes exactly one term, for its
/// observed pattern, with coefficient (-1)^(#zeros):
///
///   (1/N) * sum_i sign(pattern_i) * value_i / propensity_i
///
/// `observed_patterns` is flat row-major, `pattern_width` entries per unit.
double delta_ht(std::span<const double> values,
                std::span<const std::uint8_t> observed_patterns, int pattern_width,
                std::span<const double> propensities);

/// Per-unit breakdown of the same sum, mostly for diagnostics and tests.
std::vector<HtContribution> delta_ht_contributions(
    std::span<const double> values, std::span<const std::uint8_t> observed_patterns,
    int pattern_width, std::span<const double> propensities);

}  // namespace fpiv

#endif
