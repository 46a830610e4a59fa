#include "fpiv/baselines.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "estimator_detail.hpp"

namespace fpiv {

namespace {

struct GroupMoments {
    double n1 = 0, n0 = 0;
    double my1 = 0, my0 = 0, md1 = 0, md0 = 0;
    double vy1 = 0, vy0 = 0, vd1 = 0, vd0 = 0;
    double cyd1 = 0, cyd0 = 0;
};

EffectEstimate wald_from_groups(const GroupMoments& g, double alpha, int n_units) {
    if (g.n1 == 0 || g.n0 == 0)
        throw EstimationError("2SLS requires both assignment groups to be non-empty");
    const double num = g.my1 - g.my0;
    const double den = g.md1 - g.md0;
    if (den == 0.0) throw EstimationError("2SLS first stage is exactly zero");
    const double point = num / den;
    const double vnum = g.vy1 / g.n1 + g.vy0 / g.n0;
    const double vden = g.vd1 / g.n1 + g.vd0 / g.n0;
    const double cnd = g.cyd1 / g.n1 + g.cyd0 / g.n0;
    double var = vnum / (den * den) + num * num * vden / (den * den * den * den) -
                 2.0 * num * cnd / (den * den * den);
    if (var < 0.0) var = 0.0;
    return detail::bloom_interval(point, den, var, alpha, n_units);
}

/// Population (biased) second moments within the two assignment groups.
template <typename YieldFn>
GroupMoments group_moments(int count, YieldFn&& yield) {
    GroupMoments g;
    double sy1 = 0, sy0 = 0, sd1 = 0, sd0 = 0;
    for (int idx = 0; idx < count; ++idx) {
        auto [z, d, y] = yield(idx);
        if (z) {
            g.n1 += 1;
            sy1 += y;
            sd1 += d;
        } else {
            g.n0 += 1;
            sy0 += y;
            sd0 += d;
        }
    }
    if (g.n1 > 0) {
        g.my1 = sy1 / g.n1;
        g.md1 = sd1 / g.n1;
    }
    if (g.n0 > 0) {
        g.my0 = sy0 / g.n0;
        g.md0 = sd0 / g.n0;
    }
    for (int idx = 0; idx < count; ++idx) {
        auto [z, d, y] = yield(idx);
        if (z) {
            g.vy1 += (y - g.my1) * (y - g.my1);
            g.vd1 += (d - g.md1) * (d - g.md1);
            g.cyd1 += (y - g.my1) * (d - g.md1);
        } else {
            g.vy0 += (y - g.my0) * (y - g.my0);
            g.vd0 += (d - g.md0) * (d - g.md0);
            g.cyd0 += (y - g.my0) * (d - g.md0);
        }
    }
    if (g.n1 > 0) {
        g.vy1 /= g.n1;
        g.vd1 /= g.n1;
        g.cyd1 /= g.n1;
    }
    if (g.n0 > 0) {
        g.vy0 /= g.n0;
        g.vd0 /= g.n0;
        g.cyd0 /= g.n0;
    }
    return g;
}

}  // namespace

EffectEstimate tsls_period(const PanelDataset& ds, int t, double alpha) {
    detail::check_alpha(alpha);
    if (t < 0 || t >= ds.n_periods()) throw ValidationError("period index out of range");
    const auto g = group_moments(ds.n_units(), [&](int i) {
        return std::tuple<bool, double, double>(ds.z()(i, t), ds.d()(i, t), ds.y(i, t));
    });
    return wald_from_groups(g, alpha, ds.n_units());
}

EffectEstimate tsls_pooled(const PanelDataset& ds, double alpha) {
    detail::check_alpha(alpha);
    const int n = ds.n_units();
    const int T = ds.n_periods();
    const auto g = group_moments(n * T, [&](int idx) {
        const int t = idx / n;
        const int i = idx % n;
        return std::tuple<bool, double, double>(ds.z()(i, t), ds.d()(i, t), ds.y(i, t));
    });
    return wald_from_groups(g, alpha, n);
}

EffectEstimate tsls_multivariate(const PanelDataset& ds, std::span<const std::uint8_t> d,
                                 std::span<const std::uint8_t> dtilde, double alpha) {
    detail::check_alpha(alpha);
    if (ds.n_periods() != 2)
        throw ValidationError("tsls_multivariate requires exactly two periods");
    if (d.size() != 2 || dtilde.size() != 2)
        throw ValidationError("tsls_multivariate patterns must have length 2");
    const int n = ds.n_units();

    Eigen::Matrix3d zx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d zy = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d zi(1.0, ds.z()(i, 0), ds.z()(i, 1));
        const Eigen::Vector3d xi(1.0, ds.d()(i, 0), ds.d()(i, 1));
        zx += zi * xi.transpose();
        zy += zi * ds.y(i, 1);
    }
    zx /= n;
    zy /= n;

    Eigen::FullPivLU<Eigen::Matrix3d> lu(zx);
    if (!lu.isInvertible())
        throw EstimationError("2SLS design is rank deficient (instruments do not move uptake)");
    const Eigen::Vector3d beta = lu.solve(zy);

    Eigen::Matrix3d meat = Eigen::Matrix3d::Zero();
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d zi(1.0, ds.z()(i, 0), ds.z()(i, 1));
        const Eigen::Vector3d xi(1.0, ds.d()(i, 0), ds.d()(i, 1));
        const double e = ds.y(i, 1) - xi.dot(beta);
        meat += zi * zi.transpose() * (e * e);
    }
    meat /= n;
    const Eigen::Matrix3d a = lu.inverse();
    const Eigen::Matrix3d vbeta = a * meat * a.transpose() / n;

    const Eigen::Vector3d c(0.0, static_cast<double>(d[0]) - dtilde[0],
                            static_cast<double>(d[1]) - dtilde[1]);
    const double point = c.dot(beta);
    const double var = c.dot(vbeta * c);

    // Marginal first stages per instrument; report the weaker one.
    const auto g1 = group_moments(n, [&](int i) {
        return std::tuple<bool, double, double>(ds.z()(i, 0), ds.d()(i, 0), 0.0);
    });
    const auto g2 = group_moments(n, [&](int i) {
        return std::tuple<bool, double, double>(ds.z()(i, 1), ds.d()(i, 1), 0.0);
    });
    const double fs1 = g1.md1 - g1.md0;
    const double fs2 = g2.md1 - g2.md0;
    const double fs = std::abs(fs1) <= std::abs(fs2) ? fs1 : fs2;

    return detail::bloom_interval(point, fs, var < 0 ? 0.0 : var, alpha, n);
}

WaldDecomposition wald_decomposition(const PotentialTable& truth, const PanelDataset& ds) {
    if (!truth.is_panel || truth.n_stages != 2)
        throw ValidationError("wald_decomposition requires a two-period panel table");
    if (ds.n_periods() != 2 || ds.n_units() != truth.n_units)
        throw ValidationError("panel dataset does not match the potential table");
    if (truth.outcomes.size() < 2 || truth.outcomes[1].size() < 4)
        throw ValidationError("potential table is missing period-2 outcome entries");
    const int n = truth.n_units;

    // Assignment-path probabilities: prefer the exact ones recorded with the
    // population; otherwise treat the dataset's propensities as
    // history-independent and take products.
    auto path_prob = [&](int i, int z1, int z2) {
        if (!truth.zpath_prob.empty()) return truth.zpath_prob[i][z1 + 2 * z2];
        const double p1 = ds.propensity().prob(i, 0);
        const double p2 = ds.propensity().prob(i, 1);
        return (z1 ? p1 : 1.0 - p1) * (z2 ? p2 : 1.0 - p2);
    };
    auto y2 = [&](int i, std::uint8_t d1, std::uint8_t d2) {
        return truth.outcome(1, static_cast<unsigned>(d1) + 2u * d2, i);
    };

    // Expected assignment-group sizes.
    double n2_1 = 0.0;
    for (int i = 0; i < n; ++i) n2_1 += path_prob(i, 0, 1) + path_prob(i, 1, 1);
    const double n2_0 = n - n2_1;
    if (n2_1 <= 0.0 || n2_0 <= 0.0)
        throw EstimationError("degenerate expected assignment group size");

    WaldDecomposition w;
    double rf_full = 0.0, fs_full = 0.0, fs_complier = 0.0;
    double complier = 0.0, carry1 = 0.0, carry2 = 0.0, cov = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pi11 = path_prob(i, 1, 1);
        const double pi01 = path_prob(i, 0, 1);
        const double pi10 = path_prob(i, 1, 0);
        const double pi00 = path_prob(i, 0, 0);
        const double omega = pi11 + pi01;
        const std::uint8_t d1_1 = truth.treat[0][1][i], d1_0 = truth.treat[0][0][i];
        const std::uint8_t d2_1 = truth.treat[1][1][i], d2_0 = truth.treat[1][0][i];

        rf_full += (pi11 * y2(i, d1_1, d2_1) + pi01 * y2(i, d1_0, d2_1)) / n2_1 -
                   (pi10 * y2(i, d1_1, d2_0) + pi00 * y2(i, d1_0, d2_0)) / n2_0;
        fs_full += (omega * d2_1) / n2_1 - ((1.0 - omega) * d2_0) / n2_0;

        // Lag-0 complier component, kept as the exact path-probability
        // mixture over the unit's two possible first-period uptakes.
        complier += (pi11 * (y2(i, d1_1, d2_1) - y2(i, d1_1, d2_0)) +
                     pi01 * (y2(i, d1_0, d2_1) - y2(i, d1_0, d2_0))) /
                    n2_1;
        if (truth.type(1, i) == ComplianceType::complier) fs_complier += omega / n2_1;

        const double tau_carry = y2(i, 1, d2_0) - y2(i, 0, d2_0);
        if (truth.type(0, i) == ComplianceType::complier) {
            carry1 += pi11 * tau_carry / n2_1;
            carry2 += pi10 * tau_carry / n2_0;
        }

        const double y_base = y2(i, d1_0, d2_0);
        cov += omega * y_base / n2_1 - (1.0 - omega) * y_base / n2_0;
    }
    w.beta_rf = rf_full;
    w.beta_fs = fs_full;
    w.complier_term = complier;
    w.carryover_terms = {carry1, carry2};
    w.covariance_term = cov;
    w.fs_complier_term = fs_complier;
    w.fs_covariance_term = fs_full - fs_complier;
    if (fs_full == 0.0) throw EstimationError("Wald estimand has a zero first stage");
    w.ratio = rf_full / fs_full;
    return w;
}

}  // namespace fpiv
