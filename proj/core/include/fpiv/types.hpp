#ifndef FPIV_TYPES_HPP
#define FPIV_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpiv {

/// Compliance rate below which Bloom intervals become unreliable.
inline constexpr double kWeakFirstStageThreshold = 0.10;

/// Raised when inputs fail structural validation (dimensions, ranges,
/// probabilities outside common support).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an estimand is undefined on the realized data, e.g. a first
/// stage of exactly zero (no compliers detected for the requested pattern).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

using Pattern = std::vector<std::uint8_t>;

/// Contiguous block of factors (or periods), zero-based inclusive.
struct IndexRange {
    int first = 0;
    int last = 0;

    int length() const { return last - first + 1; }
};

/// Which treatment sequence(s) over a contiguous block are targeted.
/// `hi_index` is the last factor/period of the block and `lag` the number of
/// preceding ones included, so the block is [hi_index - lag, hi_index].
struct SequenceSpec {
    int hi_index = 0;
    int lag = 0;
    Pattern pattern_d;
    std::optional<Pattern> pattern_dtilde;

    IndexRange range() const { return {hi_index - lag, hi_index}; }
    void validate(int n_indices) const;
};

/// A point estimate with its signed first stage, a conservative variance
/// bound and the Bloom confidence interval built from it.
struct EffectEstimate {
    double point = 0.0;
    double fs_point = 0.0;
    double var_bound = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double alpha = 0.05;
    int n_units = 0;
    bool weak_fs_flag = false;
};

/// One local response function m(d): reduced form, signed first stage, their
/// ratio, and the estimable reduced-form variance bound (already divided by
/// N^2 but not yet by the squared first stage).
struct ResponseEstimate {
    Pattern pattern;
    double rf_point = 0.0;
    double fs_point = 0.0;
    double point = 0.0;
    double rf_var_bound = 0.0;
};

/// EffectEstimate for a dynamic (panel) effect, tagged with its period/lag.
struct DynamicEffectEstimate : EffectEstimate {
    int t = 0;
    int lag = 0;
    Pattern pattern_d;
    Pattern pattern_dtilde;
};

}  // namespace fpiv

#endif
