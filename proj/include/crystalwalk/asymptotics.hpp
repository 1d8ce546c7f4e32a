#pragma once

#include <array>
#include <cstdint>

#include "crystalwalk/kernels.hpp"

namespace crystalwalk {

// Row aggregates the closed forms are written in. For a horizontal row
// (q_0, q_1, q_2): u = q_1 + q_2 (mass leaving the H0 axis) and
// v = q_1 - q_2 (lateral imbalance). Graphite additionally uses
// s = u(1 - u) and t = v(u - 1).
struct DerivedRates {
    std::array<double, 2> u{}, v{};                      // ice, by color i
    std::array<std::array<double, 2>, 2> ug{}, vg{};     // graphite, [i][j]
    std::array<std::array<double, 2>, 2> sg{}, tg{};
};

DerivedRates derived_rates(const TransitionTable& table);

// Every closed-form limit object of one model: the class decomposition of
// the one-step conditional moments (mu, theta, m, rho, zeta, sigma2, nu,
// gamma, delta), the law-of-large-numbers limit of S_n/n, the CLT
// covariance Gamma of (S_n - n*lln_limit)/sqrt(n), and the limiting
// bracket matrix Lambda of the joint martingale (4x4 for ice: blocks
// [[sigma2, -2p*theta], [., 4p(1-p)]]; 5x5 for graphite as displayed in
// graphite_summary). theta_p, m_p, rho_p are the rescaled helper vectors
// used by the Lambda-based covariance assembly.
struct AsymptoticSummary {
    LatticeKind kind = LatticeKind::Ice1h;
    double p = 0.0;
    double alpha = 0.5;
    GeometryParams geometry;
    DerivedRates rates;

    Vec3 mu = Vec3::Zero();
    Vec3 theta = Vec3::Zero();
    Vec3 zeta = Vec3::Zero();
    Vec3 m = Vec3::Zero();    // graphite only
    Vec3 rho = Vec3::Zero();  // graphite only
    Mat3 sigma2 = Mat3::Zero();
    Mat3 nu = Mat3::Zero();
    Mat3 gamma = Mat3::Zero();  // graphite only
    Mat3 delta = Mat3::Zero();  // graphite only

    Vec3 lln_limit = Vec3::Zero();
    Mat3 Gamma = Mat3::Zero();
    MatX Lambda;

    Vec3 theta_p = Vec3::Zero();  // theta / (2(1-p)),   ice, p < 1
    Vec3 m_p = Vec3::Zero();      // m / (2-p),          graphite
    Vec3 rho_p = Vec3::Zero();    // rho / p,            graphite, p > 0

    // Set when p is so close to 1 (within 1e-9) that the ice covariance
    // formula sigma2 - (p/(1-p)) theta theta^T risks catastrophic
    // cancellation; the value is still computed.
    bool cancellation_flag = false;
};

// Closed-form evaluation from the coefficient displays ("route one").
AsymptoticSummary ice_summary(const TransitionTable& table);
AsymptoticSummary graphite_summary(const TransitionTable& table);
AsymptoticSummary summarize(const TransitionTable& table);

// Independent re-derivation ("route two"): solves the class decomposition
// out of the brute-force conditional moments of the kernel and assembles
// Gamma from the Lambda bracket algebra instead of the direct formula.
// Tests cross-check the two routes; transcription slips in either one
// cannot pass both.
AsymptoticSummary summary_from_moments(const TransitionTable& table);

// Normalization log(n)/n against which squared LLN error is compared.
// Requires n >= 2 (throws std::domain_error otherwise).
double lln_rate_bound(std::int64_t n);

// Asymptotic variance of J_n/sqrt(n) for graphite: 4p(1-p)/(2-p)^3.
// Drives the standard-error band of the counter convergence test.
double counter_j_variance(const AsymptoticSummary& summary);

}  // namespace crystalwalk
