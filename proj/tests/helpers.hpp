#ifndef FPIV_TEST_HELPERS_HPP
#define FPIV_TEST_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "fpiv/dataset.hpp"
#include "fpiv/potential.hpp"
#include "fpiv/rng.hpp"
#include "fpiv/types.hpp"

namespace fpiv::test {

// ---------------------------------------------------------------------------
// Literal recursive evaluation of the multiple-differences operator, used as
// an independent oracle for the closed form. H(pattern) is the HT mean of the
// units observed at that exact assignment pattern; the recursion splits on
// the leading bit.
// ---------------------------------------------------------------------------
inline double delta_recursive(std::span<const double> values,
                              std::span<const std::uint8_t> patterns, int width,
                              std::span<const double> props) {
    const std::size_t n = values.size();
    auto ht_mean = [&](const std::vector<std::uint8_t>& pattern) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            bool match = true;
            for (int j = 0; j < width; ++j)
                match = match && patterns[i * width + j] == pattern[j];
            if (match) s += values[i] / props[i];
        }
        return s / static_cast<double>(n);
    };
    std::function<double(std::vector<std::uint8_t>&)> rec =
        [&](std::vector<std::uint8_t>& prefix) -> double {
        if (static_cast<int>(prefix.size()) == width) return ht_mean(prefix);
        prefix.push_back(1);
        const double hi = rec(prefix);
        prefix.back() = 0;
        const double lo = rec(prefix);
        prefix.pop_back();
        return hi - lo;
    };
    std::vector<std::uint8_t> prefix;
    return rec(prefix);
}

// ---------------------------------------------------------------------------
// Small random populations with exact monotone compliance structure, for
// full-enumeration identification checks.
// ---------------------------------------------------------------------------
struct SmallPopulation {
    PotentialTable table;
    std::vector<double> probs;  // per unit per stage, row-major
};

inline SmallPopulation random_population(CounterRng& rng, int n_units, int n_stages,
                                         bool panel) {
    PotentialTable t;
    t.n_units = n_units;
    t.n_stages = n_stages;
    t.is_panel = panel;
    t.treat.assign(n_stages,
                   {std::vector<std::uint8_t>(n_units), std::vector<std::uint8_t>(n_units)});
    for (int s = 0; s < n_stages; ++s) {
        for (int i = 0; i < n_units; ++i) {
            const double u = rng.uniform();
            // roughly balanced always-taker / complier / never-taker mix
            const std::uint8_t d0 = u < 0.25;
            const std::uint8_t d1 = u < 0.70;
            t.treat[s][0][i] = d0;
            t.treat[s][1][i] = d1;
        }
    }
    t.outcomes.assign(n_stages, {});
    if (panel) {
        for (int s = 0; s < n_stages; ++s) {
            t.outcomes[s].assign(1ull << (s + 1), std::vector<double>(n_units));
            for (auto& v : t.outcomes[s])
                for (auto& x : v) x = 4.0 * rng.uniform() - 2.0;
        }
    } else {
        t.outcomes[n_stages - 1].assign(1ull << n_stages, std::vector<double>(n_units));
        for (auto& v : t.outcomes[n_stages - 1])
            for (auto& x : v) x = 4.0 * rng.uniform() - 2.0;
    }
    SmallPopulation pop;
    pop.table = std::move(t);
    pop.probs.resize(static_cast<std::size_t>(n_units) * n_stages);
    for (auto& p : pop.probs) p = 0.2 + 0.6 * rng.uniform();
    return pop;
}

inline FactorialDataset realize_factorial(const SmallPopulation& pop,
                                          const std::vector<std::uint8_t>& zflat) {
    const int n = pop.table.n_units;
    const int k = pop.table.n_stages;
    BinaryMatrix z(n, k), d(n, k);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        unsigned mask = 0;
        for (int s = 0; s < k; ++s) {
            z(i, s) = zflat[static_cast<std::size_t>(i) * k + s];
            d(i, s) = pop.table.treat[s][z(i, s)][i];
            mask |= static_cast<unsigned>(d(i, s)) << s;
        }
        y[i] = pop.table.outcome(k - 1, mask, i);
    }
    return FactorialDataset::make(std::move(z), std::move(d), std::move(y),
                                  AssignmentModel::per_unit(n, k, pop.probs));
}

inline PanelDataset realize_panel(const SmallPopulation& pop,
                                  const std::vector<std::uint8_t>& zflat) {
    const int n = pop.table.n_units;
    const int T = pop.table.n_stages;
    BinaryMatrix z(n, T), d(n, T);
    std::vector<double> y(static_cast<std::size_t>(n) * T);
    for (int i = 0; i < n; ++i) {
        unsigned mask = 0;
        for (int s = 0; s < T; ++s) {
            z(i, s) = zflat[static_cast<std::size_t>(i) * T + s];
            d(i, s) = pop.table.treat[s][z(i, s)][i];
            mask |= static_cast<unsigned>(d(i, s)) << s;
            y[static_cast<std::size_t>(i) * T + s] = pop.table.outcomes[s][mask][i];
        }
    }
    return PanelDataset::make(std::move(z), std::move(d), std::move(y),
                              AssignmentModel::per_unit(n, T, pop.probs));
}

/// Exact expectation over the assignment distribution of any scalar statistic
/// of the realized dataset, enumerating all assignment combinations for the
/// columns in `vary` while holding the other columns at `fixed`.
template <typename Realize, typename Stat>
double enumerate_expectation(const SmallPopulation& pop, const std::vector<int>& vary,
                             const std::vector<std::uint8_t>& fixed, Realize&& realize,
                             Stat&& stat) {
    const int n = pop.table.n_units;
    const int k = pop.table.n_stages;
    const int cells = static_cast<int>(vary.size()) * n;
    if (cells > 20) throw std::runtime_error("enumeration too large");
    std::vector<std::uint8_t> zflat = fixed;
    double total = 0.0;
    for (unsigned combo = 0; combo < (1u << cells); ++combo) {
        double prob = 1.0;
        int bit = 0;
        for (int i = 0; i < n; ++i) {
            for (int s : vary) {
                const std::uint8_t zz = (combo >> bit++) & 1u;
                zflat[static_cast<std::size_t>(i) * k + s] = zz;
                const double p = pop.probs[static_cast<std::size_t>(i) * k + s];
                prob *= zz ? p : 1.0 - p;
            }
        }
        total += prob * stat(realize(pop, zflat));
    }
    return total;
}

/// Complier share of a contiguous block, |C_range| / N.
inline double complier_share(const PotentialTable& t, IndexRange range) {
    int c = 0;
    for (int i = 0; i < t.n_units; ++i) {
        bool all = true;
        for (int s = range.first; s <= range.last && all; ++s)
            all = t.type(s, i) == ComplianceType::complier;
        c += all;
    }
    return static_cast<double>(c) / t.n_units;
}

}  // namespace fpiv::test

#endif
