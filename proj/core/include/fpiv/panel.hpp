#ifndef FPIV_PANEL_HPP
#define FPIV_PANEL_HPP

#include <span>

#include "fpiv/dataset.hpp"
#include "fpiv/types.hpp"

namespace fpiv {

/// Lag-0 dynamic effect at period t (zero-based): identical arithmetic to the
/// factorial factor-k estimator on period-t data.
DynamicEffectEstimate estimate_lag0_effect(const PanelDataset& ds, int t, double alpha);

/// Lag-p response function m_{t-p:t}(d) via the multiple-differences
/// Horvitz-Thompson estimator over periods t-p..t.
ResponseEstimate estimate_lagp_response(const PanelDataset& ds, int t, int p,
                                        std::span<const std::uint8_t> pattern);

/// Difference of two lag-p responses with summed Bloom variance bounds.
DynamicEffectEstimate estimate_lagp_effect(const PanelDataset& ds, const SequenceSpec& spec,
                                           double alpha);

enum class StackMode {
    pooled_ratio,  // sum of RF over sum of FS across all unit-periods
    mean_of_points,
};

/// Pools lag-0 contributions across all periods. The pooled ratio weights
/// each period by its complier share; mean_of_points averages the per-period
/// point estimates instead.
EffectEstimate stack_lag0_effects(const PanelDataset& ds, double alpha,
                                  StackMode mode = StackMode::pooled_ratio);

}  // namespace fpiv

#endif
