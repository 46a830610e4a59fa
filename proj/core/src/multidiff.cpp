#include "fpiv/multidiff.hpp"

#include <string>

namespace fpiv {

int sign_factor(std::span<const std::uint8_t> pattern) {
    if (pattern.empty()) throw ValidationError("sign_factor: empty pattern");
    int zeros = 0;
    for (std::uint8_t b : pattern) {
        if (b > 1) throw ValidationError("sign_factor: pattern entries must be 0 or 1");
        zeros += b == 0;
    }
    return (zeros % 2 == 0) ? 1 : -1;
}

namespace {

void check_inputs(std::size_t n, std::span<const std::uint8_t> patterns, int width,
                  std::span<const double> propensities) {
    if (width <= 0) throw ValidationError("delta_ht: pattern width must be positive");
    if (patterns.size() != n * static_cast<std::size_t>(width))
        throw ValidationError("delta_ht: pattern array size mismatch");
    if (propensities.size() != n) throw ValidationError("delta_ht: propensity length mismatch");
    for (double p : propensities) {
        if (!(p > 0.0 && p < 1.0))
            throw ValidationError("delta_ht: propensity " + std::to_string(p) +
                                  " outside (0,1)");
    }
}

}  // namespace

double delta_ht(std::span<const double> values, std::span<const std::uint8_t> observed_patterns,
                int pattern_width, std::span<const double> propensities) {
    const std::size_t n = values.size();
    check_inputs(n, observed_patterns, pattern_width, propensities);
    CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) {
        const auto pat = observed_patterns.subspan(i * pattern_width, pattern_width);
        sum.add(sign_factor(pat) * values[i] / propensities[i]);
    }
    return sum.value() / static_cast<double>(n);
}

std::vector<HtContribution> delta_ht_contributions(std::span<const double> values,
                                                   std::span<const std::uint8_t> observed_patterns,
                                                   int pattern_width,
                                                   std::span<const double> propensities) {
    const std::size_t n = values.size();
    check_inputs(n, observed_patterns, pattern_width, propensities);
    std::vector<HtContribution> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pat = observed_patterns.subspan(i * pattern_width, pattern_width);
        HtContribution c;
        c.unit = static_cast<int>(i);
        c.observed_pattern.assign(pat.begin(), pat.end());
        c.weight = 1.0 / propensities[i];
        c.signed_value = sign_factor(pat) * values[i] * c.weight;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace fpiv
