#ifndef FPIV_ESTIMATOR_DETAIL_HPP
#define FPIV_ESTIMATOR_DETAIL_HPP

#include <span>

#include "fpiv/dataset.hpp"
#include "fpiv/multidiff.hpp"
#include "fpiv/types.hpp"

namespace fpiv::detail {

double normal_quantile_two_sided(double alpha);

/// Reduced form, first stage and reduced-form variance bound of a response
/// function, accumulated in one pass. Both the factorial and panel estimators
/// route through this so that equivalent inputs give bit-identical output.
struct ResponseAccum {
    double rf_mean = 0.0;
    double fs_mean = 0.0;
    double gamma2_sum = 0.0;  // sum_i (y_i * match_i)^2 / pi_i^2
    int n = 0;
};

/// One unit's slice of the inputs: outcome, whether its observed treatments
/// match the target pattern, the sign of its observed assignment pattern and
/// the propensity of that pattern.
ResponseAccum accumulate_response(std::span<const double> y,
                                  std::span<const std::uint8_t> match,
                                  std::span<const int> sign,
                                  std::span<const double> propensity);

/// Builds the response inputs for a contiguous block of columns of (z, d) and
/// runs accumulate_response. `y` has one value per unit.
ResponseAccum response_over_range(const BinaryMatrix& z, const BinaryMatrix& d,
                                  std::span<const double> y, const AssignmentModel& probs,
                                  IndexRange range, std::span<const std::uint8_t> pattern);

/// point +/- z_{1-alpha/2} * sqrt(var_bound), flagging a weak first stage.
EffectEstimate bloom_interval(double point, double fs, double var_bound, double alpha,
                              int n_units);

/// Two-stage HT estimate on a single assignment column; the factorial
/// factor-k and panel lag-0 estimators are both thin wrappers over this.
EffectEstimate wald_effect(const BinaryMatrix& z, const BinaryMatrix& d,
                           std::span<const double> y, const AssignmentModel& probs, int col,
                           double alpha);

void check_alpha(double alpha);
void check_range(IndexRange range, int n_cols, const char* what);
void check_pattern(std::span<const std::uint8_t> pattern, int expected_len);

}  // namespace fpiv::detail

#endif
