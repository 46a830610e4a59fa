#include "fpiv/dataset.hpp"

#include <cmath>
#include <utility>

namespace fpiv {

namespace {

void check_probs(const std::vector<double>& probs) {
    for (double p : probs) {
        if (!(p >= AssignmentModel::kLowerBound && p <= AssignmentModel::kUpperBound)) {
            throw ValidationError("assignment probability " + std::to_string(p) +
                                  " outside [1e-6, 1-1e-6]");
        }
    }
}

void check_binary(const BinaryMatrix& m, const char* name) {
    for (std::uint8_t v : m.data()) {
        if (v > 1) throw ValidationError(std::string(name) + " entries must be 0 or 1");
    }
}

void check_dims(const BinaryMatrix& z, const BinaryMatrix& d, std::size_t y_size,
                const AssignmentModel& probs) {
    if (z.rows() != d.rows() || z.cols() != d.cols())
        throw ValidationError("z and d dimensions differ");
    if (static_cast<std::size_t>(z.rows()) == 0 || z.cols() == 0)
        throw ValidationError("empty dataset");
    if (probs.n_cols() != z.cols())
        throw ValidationError("probability model width does not match data");
    if (probs.is_per_unit() &&
        probs.raw().size() != static_cast<std::size_t>(z.rows()) * z.cols())
        throw ValidationError("per-unit probability matrix size mismatch");
    if (y_size % static_cast<std::size_t>(z.rows()) != 0)
        throw ValidationError("y length does not match number of units");
}

void check_finite(const std::vector<double>& y) {
    for (double v : y) {
        if (!std::isfinite(v)) throw ValidationError("non-finite outcome value");
    }
}

}  // namespace

void SequenceSpec::validate(int n_indices) const {
    if (lag < 0) throw ValidationError("lag must be >= 0");
    if (hi_index - lag < 0 || hi_index >= n_indices)
        throw ValidationError("sequence range outside data");
    const std::size_t want = static_cast<std::size_t>(lag) + 1;
    if (pattern_d.size() != want)
        throw ValidationError("pattern_d length must equal lag+1");
    if (pattern_dtilde) {
        if (pattern_dtilde->size() != want)
            throw ValidationError("pattern_dtilde length must equal lag+1");
        if (*pattern_dtilde == pattern_d)
            throw ValidationError("pattern_d and pattern_dtilde must differ");
    }
}

AssignmentModel AssignmentModel::per_column(std::vector<double> probs) {
    if (probs.empty()) throw ValidationError("empty probability vector");
    check_probs(probs);
    AssignmentModel m;
    m.per_unit_ = false;
    m.n_cols_ = static_cast<int>(probs.size());
    m.probs_ = std::move(probs);
    return m;
}

AssignmentModel AssignmentModel::per_unit(int n_units, int n_cols, std::vector<double> probs) {
    if (n_units <= 0 || n_cols <= 0 ||
        probs.size() != static_cast<std::size_t>(n_units) * n_cols)
        throw ValidationError("per-unit probability matrix size mismatch");
    check_probs(probs);
    AssignmentModel m;
    m.per_unit_ = true;
    m.n_units_ = n_units;
    m.n_cols_ = n_cols;
    m.probs_ = std::move(probs);
    return m;
}

FactorialDataset FactorialDataset::make(BinaryMatrix z, BinaryMatrix d, std::vector<double> y,
                                        AssignmentModel assign_probs) {
    check_dims(z, d, y.size(), assign_probs);
    if (y.size() != static_cast<std::size_t>(z.rows()))
        throw ValidationError("y must have one entry per unit");
    check_binary(z, "z");
    check_binary(d, "d");
    check_finite(y);
    FactorialDataset ds;
    ds.z_ = std::move(z);
    ds.d_ = std::move(d);
    ds.y_ = std::move(y);
    ds.probs_ = std::move(assign_probs);
    return ds;
}

PanelDataset PanelDataset::make(BinaryMatrix z, BinaryMatrix d, std::vector<double> y_flat,
                                AssignmentModel propensity) {
    check_dims(z, d, y_flat.size(), propensity);
    if (y_flat.size() != static_cast<std::size_t>(z.rows()) * z.cols())
        throw ValidationError("y must have one entry per unit-period");
    check_binary(z, "z");
    check_binary(d, "d");
    check_finite(y_flat);
    PanelDataset ds;
    ds.z_ = std::move(z);
    ds.d_ = std::move(d);
    ds.y_ = std::move(y_flat);
    ds.probs_ = std::move(propensity);
    return ds;
}

}  // namespace fpiv
