#include <doctest.h>

#include <array>
#include <vector>

#include "fpiv/multidiff.hpp"
#include "fpiv/rng.hpp"
#include "helpers.hpp"

using namespace fpiv;

TEST_CASE("sign_factor follows the parity of zeros") {
    CHECK(sign_factor(std::array<std::uint8_t, 2>{1, 1}) == 1);
    CHECK(sign_factor(std::array<std::uint8_t, 2>{1, 0}) == -1);
    CHECK(sign_factor(std::array<std::uint8_t, 2>{0, 1}) == -1);
    CHECK(sign_factor(std::array<std::uint8_t, 2>{0, 0}) == 1);
    CHECK(sign_factor(std::array<std::uint8_t, 3>{0, 0, 0}) == -1);
    CHECK(sign_factor(std::array<std::uint8_t, 1>{1}) == 1);
    CHECK_THROWS_AS(sign_factor(std::span<const std::uint8_t>{}), ValidationError);
}

TEST_CASE("delta_ht single unit expands the recursion by hand") {
    // one unit observed at (1,0) with propensity 1/4 contributes -4v
    const std::vector<double> v = {2.5};
    const std::vector<std::uint8_t> pat = {1, 0};
    const std::vector<double> pi = {0.25};
    CHECK(delta_ht(v, pat, 2, pi) == doctest::Approx(-4.0 * 2.5).epsilon(1e-14));
}

TEST_CASE("delta_ht of a constant vanishes on balanced cells") {
    // N=8, two units in each of the four assignment cells, p = 1/2 each
    std::vector<double> v(8, 3.0);
    std::vector<std::uint8_t> pat;
    for (int rep = 0; rep < 2; ++rep)
        for (auto cell : {std::array<std::uint8_t, 2>{1, 1}, {1, 0}, {0, 1}, {0, 0}}) {
            pat.push_back(cell[0]);
            pat.push_back(cell[1]);
        }
    std::vector<double> pi(8, 0.25);
    CHECK(delta_ht(v, pat, 2, pi) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("delta_ht base case reduces to a difference in HT means") {
    const std::vector<double> y = {3, 1, 1, 1};
    const std::vector<std::uint8_t> pat = {1, 1, 0, 0};
    const std::vector<double> pi(4, 0.5);
    // (1/N) [ y1/p + y2/p - y3/(1-p) - y4/(1-p) ]
    CHECK(delta_ht(y, pat, 1, pi) == doctest::Approx((6 + 2 - 2 - 2) / 4.0));
}

TEST_CASE("closed form equals the literal recursion for p <= 2") {
    CounterRng rng = CounterRng::keyed(42, 7);
    for (int width = 1; width <= 3; ++width) {
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 17;
            std::vector<double> v(n), pi(n);
            std::vector<std::uint8_t> pat(n * width);
            for (int i = 0; i < n; ++i) {
                v[i] = 10.0 * rng.uniform() - 5.0;
                pi[i] = 0.05 + 0.9 * rng.uniform();
                for (int j = 0; j < width; ++j) pat[i * width + j] = rng.bernoulli(0.5);
            }
            const double closed = delta_ht(v, pat, width, pi);
            const double rec = test::delta_recursive(v, pat, width, pi);
            CHECK(closed == doctest::Approx(rec).epsilon(1e-12));
        }
    }
}

TEST_CASE("delta_ht is linear in the values") {
    CounterRng rng = CounterRng::keyed(5, 1);
    const int n = 25, width = 2;
    std::vector<double> v(n), w(n), pi(n);
    std::vector<std::uint8_t> pat(n * width);
    for (int i = 0; i < n; ++i) {
        v[i] = rng.normal();
        w[i] = rng.normal();
        pi[i] = 0.1 + 0.8 * rng.uniform();
        for (int j = 0; j < width; ++j) pat[i * width + j] = rng.bernoulli(0.6);
    }
    const double a = 2.25, b = -0.75;
    std::vector<double> combo(n);
    for (int i = 0; i < n; ++i) combo[i] = a * v[i] + b * w[i];
    CHECK(delta_ht(combo, pat, width, pi) ==
          doctest::Approx(a * delta_ht(v, pat, width, pi) + b * delta_ht(w, pat, width, pi))
              .epsilon(1e-12));
}

TEST_CASE("randomization unbiasedness against exact enumeration") {
    // Fixed population of 6 units with pattern-specific values R_i(z); the
    // Monte Carlo mean over Bernoulli assignments must match the exact
    // expectation sum_z sign(z) R_i(z), averaged over units.
    CounterRng rng = CounterRng::keyed(99, 3);
    const int n = 6, width = 2;
    std::vector<std::array<double, 4>> table(n);
    std::vector<double> pz1(n), pz2(n);
    for (int i = 0; i < n; ++i) {
        for (auto& x : table[i]) x = 6.0 * rng.uniform() - 3.0;
        pz1[i] = 0.3 + 0.4 * rng.uniform();
        pz2[i] = 0.3 + 0.4 * rng.uniform();
    }
    double exact = 0.0;
    for (int i = 0; i < n; ++i)
        for (unsigned m = 0; m < 4; ++m) {
            const int zeros = (1 - (m & 1)) + (1 - ((m >> 1) & 1));
            exact += ((zeros % 2 == 0) ? 1.0 : -1.0) * table[i][m];
        }
    exact /= n;

    const int reps = 100000;
    double sum = 0, sumsq = 0;
    std::vector<double> v(n), pi(n);
    std::vector<std::uint8_t> pat(n * width);
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i < n; ++i) {
            const std::uint8_t z1 = rng.bernoulli(pz1[i]);
            const std::uint8_t z2 = rng.bernoulli(pz2[i]);
            pat[i * width] = z1;
            pat[i * width + 1] = z2;
            v[i] = table[i][z1 + 2 * z2];
            pi[i] = (z1 ? pz1[i] : 1 - pz1[i]) * (z2 ? pz2[i] : 1 - pz2[i]);
        }
        const double x = delta_ht(v, pat, width, pi);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sumsq / reps - mean * mean) / (reps - 1));
    CHECK(std::abs(mean - exact) < 3.0 * se);
}

TEST_CASE("contributions carry positive weights and parity signs") {
    const std::vector<double> v = {1.0, -2.0};
    const std::vector<std::uint8_t> pat = {1, 0, 0, 0};
    const std::vector<double> pi = {0.2, 0.3};
    const auto contribs = delta_ht_contributions(v, pat, 2, pi);
    REQUIRE(contribs.size() == 2);
    for (const auto& c : contribs) {
        CHECK(c.weight > 0);
        int zeros = 0;
        for (auto b : c.observed_pattern) zeros += b == 0;
        const double sign = (zeros % 2 == 0) ? 1.0 : -1.0;
        CHECK(c.signed_value == doctest::Approx(sign * v[c.unit] * c.weight));
    }
    CHECK_THROWS_AS(delta_ht(v, pat, 2, std::vector<double>{0.2, 0.0}), ValidationError);
}
