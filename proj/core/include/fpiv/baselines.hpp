#ifndef FPIV_BASELINES_HPP
#define FPIV_BASELINES_HPP

#include <span>
#include <utility>

#include "fpiv/dataset.hpp"
#include "fpiv/potential.hpp"
#include "fpiv/types.hpp"

namespace fpiv {

/// Period-specific Wald estimator: difference of group means of Y over
/// difference of group means of D, split on Z_t. Delta-method normal CI with
/// HC0-style group variances.
EffectEstimate tsls_period(const PanelDataset& ds, int t, double alpha);

/// The same Wald estimator pooled over all unit-periods (the cross-period
/// stacking counterpart for the 2SLS baseline).
EffectEstimate tsls_pooled(const PanelDataset& ds, double alpha);

/// Multivariate 2SLS for T = 2: Y_2 on (1, D_1, D_2) with instruments
/// (1, Z_1, Z_2), exactly identified 3x3 solve, HC0 delta-method variance for
/// the linear combination c = (d - dtilde). fs_point reports the weaker of
/// the two marginal first stages.
EffectEstimate tsls_multivariate(const PanelDataset& ds, std::span<const std::uint8_t> d,
                                 std::span<const std::uint8_t> dtilde, double alpha);

/// Exact causal decomposition of the period-2 Wald estimand on a simulated
/// population: complier lag-0 term, the two first-period-complier carryover
/// terms, and the covariance term, all computed from potential quantities
/// with expected group sizes. beta_rf reconstructs exactly as
/// complier + carryover.first - carryover.second + covariance.
struct WaldDecomposition {
    double beta_rf = 0.0;
    double beta_fs = 0.0;
    double complier_term = 0.0;
    std::pair<double, double> carryover_terms{0.0, 0.0};
    double covariance_term = 0.0;
    // First-stage analogues, reported separately: beta_fs = fs_complier_term
    // + fs_covariance_term, with no assumption that the covariance vanishes.
    double fs_complier_term = 0.0;
    double fs_covariance_term = 0.0;
    double ratio = 0.0;
};

WaldDecomposition wald_decomposition(const PotentialTable& truth, const PanelDataset& ds);

}  // namespace fpiv

#endif
