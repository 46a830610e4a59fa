#include "fpiv/potential.hpp"

#include <string>

namespace fpiv {

void PotentialTable::validate() const {
    if (n_units <= 0 || n_stages <= 0) throw ValidationError("empty potential table");
    if (static_cast<int>(treat.size()) != n_stages)
        throw ValidationError("potential treatments missing for some stages");
    for (int s = 0; s < n_stages; ++s) {
        for (int z = 0; z < 2; ++z) {
            if (static_cast<int>(treat[s][z].size()) != n_units)
                throw ValidationError("potential treatment vector has wrong length");
        }
        for (int i = 0; i < n_units; ++i) {
            if (treat[s][1][i] < treat[s][0][i])
                throw ValidationError("monotonicity violated at stage " + std::to_string(s));
        }
    }
}

namespace {

/// Units that are compliers at every stage of the block.
std::vector<int> block_compliers(const PotentialTable& truth, IndexRange range) {
    std::vector<int> out;
    for (int i = 0; i < truth.n_units; ++i) {
        bool all = true;
        for (int s = range.first; s <= range.last && all; ++s)
            all = truth.type(s, i) == ComplianceType::complier;
        if (all) out.push_back(i);
    }
    return out;
}

unsigned build_mask(IndexRange range, std::span<const std::uint8_t> pattern,
                    const BinaryMatrix& observed_d, int unit, int eval_stage) {
    unsigned mask = 0;
    for (int j = 0; j <= eval_stage; ++j) {
        std::uint8_t bit;
        if (j >= range.first && j <= range.last)
            bit = pattern[j - range.first];
        else
            bit = observed_d(unit, j);
        mask |= static_cast<unsigned>(bit) << j;
    }
    return mask;
}

int eval_stage_for(const PotentialTable& truth, IndexRange range) {
    return truth.is_panel ? range.last : truth.n_stages - 1;
}

void check_oracle_args(const PotentialTable& truth, IndexRange range,
                       std::span<const std::uint8_t> pattern, const BinaryMatrix& observed_d) {
    if (range.first < 0 || range.last >= truth.n_stages || range.first > range.last)
        throw ValidationError("oracle: range out of bounds");
    if (static_cast<int>(pattern.size()) != range.length())
        throw ValidationError("oracle: pattern length mismatch");
    if (observed_d.rows() != truth.n_units || observed_d.cols() < truth.n_stages)
        throw ValidationError("oracle: observed treatment matrix mismatch");
    const int stage = eval_stage_for(truth, range);
    if (static_cast<int>(truth.outcomes.size()) <= stage ||
        truth.outcomes[stage].size() != (1ull << (stage + 1)))
        throw ValidationError("oracle: potential outcomes missing for evaluation stage");
}

}  // namespace

double oracle_response(const PotentialTable& truth, IndexRange range,
                       std::span<const std::uint8_t> pattern, const BinaryMatrix& observed_d) {
    check_oracle_args(truth, range, pattern, observed_d);
    const auto compliers = block_compliers(truth, range);
    if (compliers.empty()) throw EstimationError("oracle: empty complier set");
    const int stage = eval_stage_for(truth, range);
    double sum = 0.0;
    for (int i : compliers)
        sum += truth.outcome(stage, build_mask(range, pattern, observed_d, i, stage), i);
    return sum / static_cast<double>(compliers.size());
}

double oracle_truth(const PotentialTable& truth, const SequenceSpec& spec,
                    const BinaryMatrix& observed_d) {
    spec.validate(truth.n_stages);
    if (!spec.pattern_dtilde) throw ValidationError("oracle_truth requires both patterns");
    const IndexRange range = spec.range();
    check_oracle_args(truth, range, spec.pattern_d, observed_d);
    const auto compliers = block_compliers(truth, range);
    if (compliers.empty()) throw EstimationError("oracle: empty complier set");
    const int stage = eval_stage_for(truth, range);
    double sum = 0.0;
    for (int i : compliers) {
        const auto m_d = build_mask(range, spec.pattern_d, observed_d, i, stage);
        const auto m_dt = build_mask(range, *spec.pattern_dtilde, observed_d, i, stage);
        sum += truth.outcome(stage, m_d, i) - truth.outcome(stage, m_dt, i);
    }
    return sum / static_cast<double>(compliers.size());
}

}  // namespace fpiv
