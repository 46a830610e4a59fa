#ifndef FPIV_CSV_HPP
#define FPIV_CSV_HPP

#include <optional>
#include <string>
#include <vector>

#include "fpiv/dataset.hpp"

namespace fpiv {

/// Wide factorial format: header row with columns z1..zK, d1..dK, y and
/// optionally pz1..pzK. Assignment probabilities come either from the pz
/// columns or from `probs` (exactly one of the two).
FactorialDataset load_factorial_csv(const std::string& path,
                                    const std::optional<std::vector<double>>& probs = {});

/// Long panel format: columns unit, t, z, d, y and optionally pz. Periods are
/// 1-based in the file. The panel must be balanced; unbalanced input fails
/// with the offending units listed. `probs` supplies one probability per
/// period when no pz column is present.
PanelDataset load_panel_csv(const std::string& path,
                            const std::optional<std::vector<double>>& probs = {});

/// Writers for the same two schemas. Probabilities and outcomes are printed
/// in shortest round-trip form, so re-ingesting reproduces the dataset
/// bit for bit.
void write_factorial_csv(const std::string& path, const FactorialDataset& ds);
void write_panel_csv(const std::string& path, const PanelDataset& ds);

/// FNV-1a content hash of a file, as a 16-hex-digit string.
std::string file_digest(const std::string& path);

}  // namespace fpiv

#endif
