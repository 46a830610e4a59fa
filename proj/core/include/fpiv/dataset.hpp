#ifndef FPIV_DATASET_HPP
#define FPIV_DATASET_HPP

#include <cstdint>
#include <vector>

#include "fpiv/types.hpp"

namespace fpiv {

/// Dense row-major matrix of {0,1} indicators.
class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(int rows, int cols, std::uint8_t fill = 0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::uint8_t operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    std::uint8_t& operator()(int i, int j) {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    const std::vector<std::uint8_t>& data() const { return data_; }

    bool operator==(const BinaryMatrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Per-column Bernoulli probabilities, either one value per column or a full
/// per-unit matrix. All entries must lie in the hard common-support bounds
/// [1e-6, 1 - 1e-6]; violations are load errors, never silent clamps.
class AssignmentModel {
public:
    static constexpr double kLowerBound = 1e-6;
    static constexpr double kUpperBound = 1.0 - 1e-6;

    AssignmentModel() = default;

    /// One probability per column, shared by all units.
    static AssignmentModel per_column(std::vector<double> probs);
    /// Full N x K matrix, row-major.
    static AssignmentModel per_unit(int n_units, int n_cols, std::vector<double> probs);

    bool is_per_unit() const { return per_unit_; }
    int n_cols() const { return n_cols_; }

    double prob(int unit, int col) const {
        return per_unit_ ? probs_[static_cast<std::size_t>(unit) * n_cols_ + col]
                         : probs_[col];
    }

    const std::vector<double>& raw() const { return probs_; }

private:
    bool per_unit_ = false;
    int n_units_ = 0;
    int n_cols_ = 0;
    std::vector<double> probs_;
};

/// N units by K binary factors: assignments Z, uptakes D, scalar outcome Y,
/// and the Bernoulli assignment-probability model. Immutable after
/// construction; safe for shared read-only access.
class FactorialDataset {
public:
    static FactorialDataset make(BinaryMatrix z, BinaryMatrix d, std::vector<double> y,
                                 AssignmentModel assign_probs);

    int n_units() const { return z_.rows(); }
    int n_factors() const { return z_.cols(); }
    const BinaryMatrix& z() const { return z_; }
    const BinaryMatrix& d() const { return d_; }
    const std::vector<double>& y() const { return y_; }
    const AssignmentModel& assign_probs() const { return probs_; }

private:
    FactorialDataset() = default;
    BinaryMatrix z_, d_;
    std::vector<double> y_;
    AssignmentModel probs_;
};

/// Balanced panel: N units by T periods. The propensity model gives, for
/// each unit and period, the probability that Z_{i,t} = 1 conditional on the
/// unit's own realized history.
class PanelDataset {
public:
    static PanelDataset make(BinaryMatrix z, BinaryMatrix d, std::vector<double> y_flat,
                             AssignmentModel propensity);

    int n_units() const { return z_.rows(); }
    int n_periods() const { return z_.cols(); }
    const BinaryMatrix& z() const { return z_; }
    const BinaryMatrix& d() const { return d_; }
    double y(int unit, int t) const {
        return y_[static_cast<std::size_t>(unit) * z_.cols() + t];
    }
    const std::vector<double>& y_flat() const { return y_; }
    const AssignmentModel& propensity() const { return probs_; }

private:
    PanelDataset() = default;
    BinaryMatrix z_, d_;
    std::vector<double> y_;  // row-major N x T
    AssignmentModel probs_;
};

}  // namespace fpiv

#endif
