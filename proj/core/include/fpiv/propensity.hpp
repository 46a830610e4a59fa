#ifndef FPIV_PROPENSITY_HPP
#define FPIV_PROPENSITY_HPP

#include <span>

#include "fpiv/dataset.hpp"
#include "fpiv/types.hpp"

namespace fpiv {

/// Probability that unit's assignments over `range` equal `pattern`:
/// the product over the range of p or (1-p) per factor.
double adapted_propensity_factorial(const FactorialDataset& ds, int unit, IndexRange range,
                                    std::span<const std::uint8_t> pattern);

/// Panel analogue. Under a constant-per-period design this is the product of
/// period probabilities; with a per-unit matrix it is the product of the
/// supplied history-conditional probabilities along the observed history.
double adapted_propensity_panel(const PanelDataset& ds, int unit, IndexRange range,
                                std::span<const std::uint8_t> pattern);

/// Propensity of the unit's own observed assignment pattern over `range`.
double observed_propensity(const AssignmentModel& probs, const BinaryMatrix& z, int unit,
                           IndexRange range);

}  // namespace fpiv

#endif
