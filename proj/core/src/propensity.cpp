#include "fpiv/propensity.hpp"

#include <string>

namespace fpiv {

namespace {

double pattern_propensity(const AssignmentModel& probs, int unit, IndexRange range,
                          std::span<const std::uint8_t> pattern, int n_cols) {
    if (range.first < 0 || range.last >= n_cols || range.first > range.last)
        throw ValidationError("factor/period range out of bounds");
    if (static_cast<int>(pattern.size()) != range.length())
        throw ValidationError("pattern length must equal range length");
    double prod = 1.0;
    for (int j = range.first; j <= range.last; ++j) {
        const double p = probs.prob(unit, j);
        const std::uint8_t bit = pattern[j - range.first];
        if (bit > 1) throw ValidationError("pattern entries must be 0 or 1");
        prod *= bit ? p : 1.0 - p;
    }
    return prod;
}

}  // namespace

double adapted_propensity_factorial(const FactorialDataset& ds, int unit, IndexRange range,
                                    std::span<const std::uint8_t> pattern) {
    if (unit < 0 || unit >= ds.n_units()) throw ValidationError("unit index out of range");
    return pattern_propensity(ds.assign_probs(), unit, range, pattern, ds.n_factors());
}

double adapted_propensity_panel(const PanelDataset& ds, int unit, IndexRange range,
                                std::span<const std::uint8_t> pattern) {
    if (unit < 0 || unit >= ds.n_units()) throw ValidationError("unit index out of range");
    return pattern_propensity(ds.propensity(), unit, range, pattern, ds.n_periods());
}

double observed_propensity(const AssignmentModel& probs, const BinaryMatrix& z, int unit,
                           IndexRange range) {
    double prod = 1.0;
    for (int j = range.first; j <= range.last; ++j) {
        const double p = probs.prob(unit, j);
        prod *= z(unit, j) ? p : 1.0 - p;
    }
    return prod;
}

}  // namespace fpiv
