#ifndef FPIV_POTENTIAL_HPP
#define FPIV_POTENTIAL_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fpiv/dataset.hpp"
#include "fpiv/types.hpp"

namespace fpiv {

enum class ComplianceType { always_taker, never_taker, complier };

/// Full potential-outcome / potential-treatment table for a simulated
/// population (never observable in real data). Stages are factors in a
/// factorial design and periods in a panel.
///
/// Treatment-pattern masks use bit j for stage j. Factorial outcomes are
/// stored at stage K-1 under masks over all K bits; panel outcomes at stage t
/// use masks over bits 0..t.
struct PotentialTable {
    int n_units = 0;
    int n_stages = 0;
    bool is_panel = false;

    /// treat[stage][z][unit]: potential uptake D(z).
    std::vector<std::array<std::vector<std::uint8_t>, 2>> treat;

    /// outcomes[stage][mask][unit].
    std::vector<std::vector<std::vector<double>>> outcomes;

    /// Panel only: per-unit probability of each full assignment path (mask
    /// bit t = z_t). Fixed by the design and the unit's potential values, so
    /// it is computable without reference to a realized assignment.
    std::vector<std::vector<double>> zpath_prob;

    ComplianceType type(int stage, int unit) const {
        const auto d1 = treat[stage][1][unit];
        const auto d0 = treat[stage][0][unit];
        if (d1 == 1 && d0 == 0) return ComplianceType::complier;
        return d1 ? ComplianceType::always_taker : ComplianceType::never_taker;
    }

    double outcome(int stage, unsigned mask, int unit) const {
        return outcomes[stage][mask][unit];
    }

    /// Monotonicity D(1) >= D(0) at every stage.
    void validate() const;
};

/// Per-replicate finite-population estimand: identifies the compliers of the
/// targeted block from the potential treatments, evaluates the two potential
/// outcomes with out-of-block treatments held at their observed values, and
/// averages the difference over those compliers. Throws EstimationError when
/// the complier set is empty.
double oracle_truth(const PotentialTable& truth, const SequenceSpec& spec,
                    const BinaryMatrix& observed_d);

/// Complier average of a single potential response (the m(d) analogue).
double oracle_response(const PotentialTable& truth, IndexRange range,
                       std::span<const std::uint8_t> pattern, const BinaryMatrix& observed_d);

}  // namespace fpiv

#endif
