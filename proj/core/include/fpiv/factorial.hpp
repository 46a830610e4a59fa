#ifndef FPIV_FACTORIAL_HPP
#define FPIV_FACTORIAL_HPP

#include <span>
#include <vector>

#include "fpiv/dataset.hpp"
#include "fpiv/types.hpp"

namespace fpiv {

/// Two-stage Horvitz-Thompson estimate of the local factor-k causal effect
/// with a Bloom confidence interval. `k` is zero-based. Throws
/// EstimationError when the first stage is exactly zero; a nonzero but weak
/// first stage (|FS| < 0.10) only sets weak_fs_flag.
EffectEstimate estimate_factor_effect(const FactorialDataset& ds, int k, double alpha);

/// Multiple-differences estimate of the local response function m(d) over a
/// contiguous factor range.
ResponseEstimate estimate_response_function(const FactorialDataset& ds, IndexRange range,
                                            std::span<const std::uint8_t> pattern);

/// Difference of two response functions, with the conservative variance bound
/// summed across the two patterns.
EffectEstimate estimate_joint_effect(const FactorialDataset& ds, const SequenceSpec& spec,
                                     double alpha);

/// Bloom interval for a single response function: variance bound
/// rf_var_bound / fs^2. Works for factorial and panel responses alike.
EffectEstimate response_interval(const ResponseEstimate& r, double alpha, int n_units);

struct ComplianceRow {
    Pattern pattern;
    double fs_point = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

/// Signed first-stage (joint compliance) estimates for every treatment
/// pattern over the range, each with a Bloom-style interval. The expectation
/// of each row is sign_factor(pattern) * |compliers| / N, so compliance rates
/// are the absolute values.
std::vector<ComplianceRow> estimate_compliance_table(const FactorialDataset& ds,
                                                     IndexRange range, double alpha);

}  // namespace fpiv

#endif
