#include "crystalwalk/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace crystalwalk {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kCancellationBand = 1e-9;

// FMA contraction and scalar-into-product folding can round the two
// triangles of an algebraically symmetric expression differently; a
// covariance matrix should be exactly symmetric, so average them.
Mat3 symmetrized(const Mat3& M) { return Mat3(0.5 * (M + M.transpose())); }

// Shared tail: lln_limit, Gamma, Lambda and the helper vectors are all
// determined by the coefficient fields, so both evaluation routes funnel
// through here once those are set.
void finalize_ice(AsymptoticSummary& s) {
    const double p = s.p;
    s.lln_limit = s.mu;

    s.Lambda = MatX::Zero(4, 4);
    s.Lambda.topLeftCorner<3, 3>() = s.sigma2;
    s.Lambda.block<3, 1>(0, 3) = -2.0 * p * s.theta;
    s.Lambda.block<1, 3>(3, 0) = -2.0 * p * s.theta.transpose();
    s.Lambda(3, 3) = 4.0 * p * (1.0 - p);

    if (p < 1.0) {
        s.theta_p = s.theta / (2.0 * (1.0 - p));
        if (p > 1.0 - kCancellationBand) s.cancellation_flag = true;
        s.Gamma = symmetrized(s.sigma2 - (p / (1.0 - p)) * (s.theta * s.theta.transpose()));
    } else {
        s.Gamma = s.sigma2;
    }
}

void finalize_graphite(AsymptoticSummary& s) {
    const double p = s.p;
    const double q = 2.0 - p;

    s.Lambda = MatX::Zero(5, 5);
    s.Lambda.topLeftCorner<3, 3>() = ((q * s.sigma2 + p * s.gamma) / q);
    const Vec3 lam_mj = 2.0 * (s.zeta - p * (s.mu + s.m)) / q;
    const Vec3 lam_mk = 2.0 * p * (s.theta + s.rho) / q;
    s.Lambda.block<3, 1>(0, 3) = lam_mj;
    s.Lambda.block<1, 3>(3, 0) = lam_mj.transpose();
    s.Lambda.block<3, 1>(0, 4) = lam_mk;
    s.Lambda.block<1, 3>(4, 0) = lam_mk.transpose();
    s.Lambda(3, 3) = 4.0 * p * (1.0 - p) / q;
    s.Lambda(4, 4) = 4.0 * p * (1.0 - p) / q;

    s.m_p = s.m / q;
    if (p > 0.0) {
        s.rho_p = s.rho / p;
        s.lln_limit = s.mu + (p / q) * s.m;
    } else {
        s.lln_limit = s.mu + s.rho;
    }
}

// Direct six-term covariance display for graphite with p > 0.
Mat3 graphite_gamma_direct(const AsymptoticSummary& s) {
    const double p = s.p;
    const double q = 2.0 - p;
    const Vec3 zpm = s.zeta - p * s.mu;
    Mat3 G = s.sigma2 + (p / q) * s.gamma;
    G += (2.0 / (q * q)) * (zpm * s.m.transpose() + s.m * zpm.transpose());
    G -= (4.0 * p / (q * q * q)) * (s.m * s.m.transpose());
    G += (2.0 / q) * (s.theta * s.rho.transpose() + s.rho * s.theta.transpose());
    G += (4.0 / (p * q)) * (s.rho * s.rho.transpose());
    return symmetrized(G);
}

}  // namespace

DerivedRates derived_rates(const TransitionTable& table) {
    DerivedRates r;
    if (table.kind == LatticeKind::Ice1h) {
        for (int i = 0; i < 2; ++i) {
            r.u[i] = table.ice_rows[i][1] + table.ice_rows[i][2];
            r.v[i] = table.ice_rows[i][1] - table.ice_rows[i][2];
        }
    } else {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const auto& row = table.graphite_rows[i][j];
                r.ug[i][j] = row[1] + row[2];
                r.vg[i][j] = row[1] - row[2];
                r.sg[i][j] = r.ug[i][j] * (1.0 - r.ug[i][j]);
                r.tg[i][j] = r.vg[i][j] * (r.ug[i][j] - 1.0);
            }
        }
    }
    return r;
}

AsymptoticSummary ice_summary(const TransitionTable& table) {
    AsymptoticSummary s;
    s.kind = LatticeKind::Ice1h;
    s.p = table.p;
    s.alpha = table.alpha;
    s.geometry = table.geometry;
    s.rates = derived_rates(table);

    const double a = table.geometry.a;
    const double h = table.geometry.h;
    const double p = table.p;
    const double drift = 2.0 * table.alpha - 1.0;
    const double u0 = s.rates.u[0], u1 = s.rates.u[1];
    const double v0 = s.rates.v[0], v1 = s.rates.v[1];

    s.mu = Vec3(0.75 * a * (u1 - u0), 0.25 * a * kSqrt3 * (v0 - v1), h * p * drift);
    s.theta = Vec3(a * ((1.0 - p) - 0.75 * (u0 + u1)), 0.25 * a * kSqrt3 * (v0 + v1), 0.0);
    s.zeta = Vec3(0.0, 0.0, h * p * drift);

    const double a2 = a * a;
    s.sigma2(0, 0) =
        a2 * (p * (1.0 - p) + 0.375 * (3.0 - 4.0 * p) * (u0 + u1) - 1.125 * (u0 * u0 + u1 * u1));
    s.sigma2(1, 1) = 0.375 * a2 * ((u0 + u1) - (v0 * v0 + v1 * v1));
    s.sigma2(2, 2) = h * h * p * (1.0 - p * drift * drift);
    s.sigma2(0, 1) = s.sigma2(1, 0) =
        0.125 * a2 * kSqrt3 * ((2.0 * p - 3.0) * (v0 + v1) + 3.0 * (u0 * v0 + u1 * v1));

    s.nu(0, 0) = 0.375 * a2 * (u0 - u1) * (3.0 - 4.0 * p - 3.0 * (u0 + u1));
    s.nu(1, 1) = 0.375 * a2 * ((u0 - u1) - (v0 * v0 - v1 * v1));
    s.nu(0, 1) = s.nu(1, 0) =
        0.125 * a2 * kSqrt3 * ((2.0 * p - 3.0) * (v0 - v1) + 3.0 * (u0 * v0 - u1 * v1));

    // A step is either horizontal or vertical, never both, so E[xi_x xi_z | class] = 0
    // identically; the vertical-coupling entries are therefore fixed by the
    // conditional-mean components rather than by independent row statistics.
    for (int x = 0; x < 2; ++x) {
        s.sigma2(x, 2) = s.sigma2(2, x) = -s.mu[x] * s.mu[2];
        s.nu(x, 2) = s.nu(2, x) = -s.theta[x] * s.mu[2];
    }

    finalize_ice(s);
    return s;
}

AsymptoticSummary graphite_summary(const TransitionTable& table) {
    AsymptoticSummary s;
    s.kind = LatticeKind::Graphite2h;
    s.p = table.p;
    s.alpha = table.alpha;
    s.geometry = table.geometry;
    s.rates = derived_rates(table);

    const double a = table.geometry.a;
    const double h = table.geometry.h;
    const double p = table.p;
    const double drift = 2.0 * table.alpha - 1.0;
    const auto& u = s.rates.ug;
    const auto& v = s.rates.vg;
    const auto& su = s.rates.sg;
    const auto& t = s.rates.tg;

    s.mu = Vec3(0.375 * a * ((u[1][0] + u[1][1]) - (u[0][0] + u[0][1])),
                0.125 * a * kSqrt3 * ((v[0][0] + v[0][1]) - (v[1][0] + v[1][1])),
                0.5 * h * p * drift);
    s.m = Vec3(0.375 * a * ((u[1][0] - u[1][1]) - (u[0][0] - u[0][1])),
               0.125 * a * kSqrt3 * ((v[0][0] - v[0][1]) - (v[1][0] - v[1][1])),
               0.5 * h * p * drift);
    s.theta = Vec3(a * ((1.0 - 0.5 * p) - 0.375 * ((u[0][0] + u[0][1]) + (u[1][0] + u[1][1]))),
                   0.125 * a * kSqrt3 * ((v[0][0] + v[0][1]) + (v[1][0] + v[1][1])), 0.0);
    s.rho = Vec3(a * (-0.5 * p - 0.375 * ((u[0][0] - u[0][1]) + (u[1][0] - u[1][1]))),
                 0.125 * a * kSqrt3 * ((v[0][0] - v[0][1]) + (v[1][0] - v[1][1])), 0.0);
    s.zeta = Vec3(0.0, 0.0, h * p * drift);

    const double a2 = a * a;
    s.sigma2(0, 0) = 0.25 * a2 *
                     (2.0 * p * (1.0 - p) +
                      2.25 * (su[0][0] + su[1][0] + su[0][1] + su[1][1]) -
                      3.0 * p * (u[0][0] + u[1][0]));
    s.sigma2(1, 1) = 0.1875 * a2 *
                     ((u[0][0] + u[1][0] + u[0][1] + u[1][1]) -
                      (v[0][0] * v[0][0] + v[1][0] * v[1][0] + v[0][1] * v[0][1] +
                       v[1][1] * v[1][1]));
    s.sigma2(2, 2) = 0.5 * h * h * p * (1.0 - p * drift * drift);
    s.sigma2(0, 1) = s.sigma2(1, 0) =
        0.0625 * a2 * kSqrt3 *
        (3.0 * (t[0][0] + t[1][0] + t[0][1] + t[1][1]) + 2.0 * p * (v[0][0] + v[1][0]));

    s.gamma(0, 0) = 0.25 * a2 *
                    (2.0 * p * (1.0 - p) +
                     2.25 * (su[0][0] + su[1][0] - su[0][1] - su[1][1]) -
                     3.0 * p * (u[0][0] + u[1][0]));
    s.gamma(1, 1) = 0.1875 * a2 *
                    ((u[0][0] + u[1][0] - u[0][1] - u[1][1]) -
                     (v[0][0] * v[0][0] + v[1][0] * v[1][0] - v[0][1] * v[0][1] -
                      v[1][1] * v[1][1]));
    s.gamma(2, 2) = s.sigma2(2, 2);
    s.gamma(0, 1) = s.gamma(1, 0) =
        0.0625 * a2 * kSqrt3 *
        (3.0 * (t[0][0] + t[1][0] - t[0][1] - t[1][1]) + 2.0 * p * (v[0][0] + v[1][0]));

    s.nu(0, 0) = 0.25 * a2 * (2.25 * (su[0][0] - su[1][0] + su[0][1] - su[1][1]) -
                              3.0 * p * (u[0][0] - u[1][0]));
    s.nu(1, 1) = 0.1875 * a2 *
                 ((u[0][0] - u[1][0] + u[0][1] - u[1][1]) -
                  (v[0][0] * v[0][0] - v[1][0] * v[1][0] + v[0][1] * v[0][1] -
                   v[1][1] * v[1][1]));
    s.nu(0, 1) = s.nu(1, 0) =
        0.0625 * a2 * kSqrt3 *
        (3.0 * (t[0][0] - t[1][0] + t[0][1] - t[1][1]) + 2.0 * p * (v[0][0] - v[1][0]));

    s.delta(0, 0) = 0.25 * a2 * (2.25 * (su[0][0] - su[1][0] - su[0][1] + su[1][1]) -
                                 3.0 * p * (u[0][0] - u[1][0]));
    s.delta(1, 1) = 0.1875 * a2 *
                    ((u[0][0] - u[1][0] - u[0][1] + u[1][1]) -
                     (v[0][0] * v[0][0] - v[1][0] * v[1][0] - v[0][1] * v[0][1] +
                      v[1][1] * v[1][1]));
    s.delta(0, 1) = s.delta(1, 0) =
        0.0625 * a2 * kSqrt3 *
        (3.0 * (t[0][0] - t[1][0] - t[0][1] + t[1][1]) + 2.0 * p * (v[0][0] - v[1][0]));
    // A step is either horizontal or vertical, never both, so E[xi_x xi_z | class] = 0
    // identically; solving the four sign-pattern equations pins every
    // vertical-coupling entry to products of the conditional-mean components.
    for (int x = 0; x < 2; ++x) {
        s.sigma2(x, 2) = s.sigma2(2, x) = -(s.mu[x] * s.mu[2] + s.m[x] * s.m[2]);
        s.nu(x, 2) = s.nu(2, x) = -(s.theta[x] * s.mu[2] + s.rho[x] * s.m[2]);
        s.gamma(x, 2) = s.gamma(2, x) = -(s.mu[x] * s.m[2] + s.m[x] * s.mu[2]);
        s.delta(x, 2) = s.delta(2, x) = -(s.rho[x] * s.mu[2] + s.theta[x] * s.m[2]);
    }

    finalize_graphite(s);
    s.Gamma = (table.p > 0.0) ? graphite_gamma_direct(s) : Mat3(s.sigma2 + s.delta);
    return s;
}

AsymptoticSummary summarize(const TransitionTable& table) {
    return table.kind == LatticeKind::Ice1h ? ice_summary(table) : graphite_summary(table);
}

AsymptoticSummary summary_from_moments(const TransitionTable& table) {
    AsymptoticSummary s;
    s.kind = table.kind;
    s.p = table.p;
    s.alpha = table.alpha;
    s.geometry = table.geometry;
    s.rates = derived_rates(table);

    if (table.kind == LatticeKind::Ice1h) {
        const Vec3 mean_w = conditional_mean(table, {0, 0});
        const Vec3 mean_b = conditional_mean(table, {1, 0});
        const Mat3 sec_w = conditional_second_moment(table, {0, 0});
        const Mat3 sec_b = conditional_second_moment(table, {1, 0});

        s.mu = 0.5 * (mean_w + mean_b);
        s.theta = 0.5 * (mean_w - mean_b);
        s.zeta = Vec3(0.0, 0.0, s.mu[2]);
        s.sigma2 = 0.5 * (sec_w + sec_b) - s.mu * s.mu.transpose() -
                   s.theta * s.theta.transpose();
        s.nu = 0.5 * (sec_w - sec_b) - s.mu * s.theta.transpose() -
               s.theta * s.mu.transpose();

        finalize_ice(s);
        if (table.p < 1.0) {
            // Covariance via the bracket algebra: variance of the limit
            // combination M + theta_p * N read off the Lambda blocks.
            const Vec3 lam_mn = -2.0 * table.p * s.theta;
            s.Gamma = s.sigma2 + lam_mn * s.theta_p.transpose() +
                      s.theta_p * lam_mn.transpose() +
                      4.0 * table.p * (1.0 - table.p) * (s.theta_p * s.theta_p.transpose());
        }
        return s;
    }

    // Graphite: invert the sign decomposition over the four classes.
    // Sign triples (i, j, k) per class: V_00 (+,+,+), V_10 (-,+,-),
    // V_01 (+,-,-), V_11 (-,-,+).
    const std::vector<VertexClass> classes = all_classes(table.kind);
    Vec3 mean[4];
    Mat3 sec[4];
    for (const VertexClass c : classes) {
        const int idx = class_index(table.kind, c);
        mean[idx] = conditional_mean(table, c);
        sec[idx] = conditional_second_moment(table, c);
    }
    const auto signed_avg_vec = [&](const int sign[4]) {
        Vec3 out = Vec3::Zero();
        for (int idx = 0; idx < 4; ++idx) out += 0.25 * sign[idx] * mean[idx];
        return out;
    };
    const auto signed_avg_mat = [&](const int sign[4]) {
        Mat3 out = Mat3::Zero();
        for (int idx = 0; idx < 4; ++idx) out += 0.25 * sign[idx] * sec[idx];
        return out;
    };
    static constexpr int kOne[4] = {1, 1, 1, 1};
    static constexpr int kSi[4] = {1, -1, 1, -1};
    static constexpr int kSj[4] = {1, 1, -1, -1};
    static constexpr int kSk[4] = {1, -1, -1, 1};

    s.mu = signed_avg_vec(kOne);
    s.theta = signed_avg_vec(kSi);
    s.m = signed_avg_vec(kSj);
    s.rho = signed_avg_vec(kSk);
    s.zeta = Vec3(0.0, 0.0, s.mu[2] + s.m[2]);

    const auto outer = [](const Vec3& x, const Vec3& y) -> Mat3 {
        return x * y.transpose() + y * x.transpose();
    };
    s.sigma2 = signed_avg_mat(kOne) - s.mu * s.mu.transpose() - s.theta * s.theta.transpose() -
               s.m * s.m.transpose() - s.rho * s.rho.transpose();
    s.nu = signed_avg_mat(kSi) - outer(s.mu, s.theta) - outer(s.m, s.rho);
    s.gamma = signed_avg_mat(kSj) - outer(s.mu, s.m) - outer(s.theta, s.rho);
    s.delta = signed_avg_mat(kSk) - outer(s.mu, s.rho) - outer(s.theta, s.m);

    finalize_graphite(s);
    if (table.p > 0.0) {
        // Variance of M + m_p * N^J + rho_p * N^K from the Lambda blocks.
        const Mat3 lam_mm = s.Lambda.topLeftCorner<3, 3>();
        const Vec3 lam_mj = s.Lambda.block<3, 1>(0, 3);
        const Vec3 lam_mk = s.Lambda.block<3, 1>(0, 4);
        const double lam_nn = s.Lambda(3, 3);
        s.Gamma = lam_mm + outer(lam_mj, s.m_p) + outer(lam_mk, s.rho_p) +
                  lam_nn * (s.m_p * s.m_p.transpose() + s.rho_p * s.rho_p.transpose());
    } else {
        s.Gamma = s.sigma2 + s.delta;
    }
    return s;
}

double lln_rate_bound(std::int64_t n) {
    if (n < 2) throw std::domain_error("lln_rate_bound requires n >= 2");
    const double x = static_cast<double>(n);
    return std::log(x) / x;
}

double counter_j_variance(const AsymptoticSummary& s) {
    const double q = 2.0 - s.p;
    return 4.0 * s.p * (1.0 - s.p) / (q * q * q);
}

}  // namespace crystalwalk
