#pragma once

#include <string>
#include <vector>

#include "crystalwalk/asymptotics.hpp"
#include "crystalwalk/walker.hpp"

namespace crystalwalk {

// Tolerances of the verification harness. exact_eps bounds pathwise
// algebraic identities; stat_z is the z-score bound of mean tests
// (4.0 keeps the per-test false-failure probability below 1e-4 under the
// null); cov_rel bounds relative covariance-entry error with an absolute
// floor for near-zero entries; moment_abs bounds standardized skewness
// deviation from 0 and kurtosis deviation from 3.
struct Tolerance {
    double exact_eps = 1e-9;
    double stat_z = 4.0;
    double cov_rel = 0.05;
    double moment_abs = 0.1;
};

enum class CheckStatus { Pass, Fail, Flagged };

struct VerificationReport {
    std::string check_name;
    CheckStatus status = CheckStatus::Pass;
    double observed = 0.0;
    double target = 0.0;
    double tolerance_used = 0.0;
    std::int64_t steps = 0;
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
    std::string detail;
};

inline bool all_passed(const std::vector<VerificationReport>& reports) {
    for (const VerificationReport& r : reports) {
        if (r.status == CheckStatus::Fail) return false;
    }
    return true;
}

// One-step identity oracles: brute-force conditional moments over the
// increment atoms versus the closed-form class decompositions, the sign
// recursions, and the vertical-drift cross identities, class by class.
// The *_against variant takes an explicit summary so that fault-injection
// tests can feed a perturbed one.
std::vector<VerificationReport> check_oracles(const TransitionTable& table,
                                              const Tolerance& tol = {});
std::vector<VerificationReport> check_oracles_against(const TransitionTable& table,
                                                      const AsymptoticSummary& summary,
                                                      const Tolerance& tol = {});

// Pathwise ledger identities of one simulated walk: the decomposition
// S_n = M_n + R_n, the closed forms of R_n and of every bracket in terms
// of n and the counters, the sign-martingale closed forms, and (graphite)
// the parity law i_n = (-1)^n.
std::vector<VerificationReport> check_ledger(const WalkRecord& record,
                                             const AsymptoticSummary& summary,
                                             const Tolerance& tol = {});

// Strong law with rate: runs a single path with dyadic checkpoints and
// tests ||S_n/n - lln_limit||^2 against 25 * trace(Gamma) * log(n)/n.
// Exceedances strictly before the final checkpoint are flagged, not
// failed. Degenerate models (trace(Gamma) ~ 0) walk a deterministic
// orbit, so the error is tested against (B/n)^2 with B twice the orbit
// scale instead. Graphite also tests J_n/n against p/(2-p) within
// stat_z standard errors (p = 0: against an exact 2/n band).
std::vector<VerificationReport> check_lln(const TransitionTable& table,
                                          const AsymptoticSummary& summary, std::int64_t n_final,
                                          RngSpec rng, const Tolerance& tol = {});

// CLT checks of a finished batch: per-coordinate mean z-tests of
// (S_n - n*lln_limit)/sqrt(n), covariance entries against Gamma (relative
// bound with absolute floor 2e-3 * max(1, ||Gamma||_max)), standardized
// skewness/kurtosis for non-degenerate coordinates, and five Cramer-Wold
// projections (three axes plus two seeded random unit vectors).
std::vector<VerificationReport> check_clt(const BatchStatistics& batch,
                                          const AsymptoticSummary& summary, std::uint64_t seed,
                                          const Tolerance& tol = {});

// Seeded generator of valid random tables used by the fuzz oracles:
// geometry in [0.5, 2], p uniform, alpha in (0,1), rows renormalized
// positive noise.
TransitionTable random_table(LatticeKind kind, PhiloxStream& rng);

// Result of perturbing one closed-form coefficient by `rel` and re-running
// the oracle and ledger checks against the perturbed summary.
struct FaultProbe {
    std::string coefficient;
    double value = 0.0;
    bool detected = false;
    std::string failed_check;
};

// Sensitivity sweep over every coefficient of the summary with magnitude
// at least min_coeff (a 1e-3 relative nudge below that would vanish under
// exact_eps). Every probe is expected to be detected.
std::vector<FaultProbe> fault_injection_sweep(const TransitionTable& table,
                                              double rel = 1e-3, std::int64_t ledger_steps = 2000,
                                              RngSpec rng = {20240915, 0},
                                              double min_coeff = 1e-5,
                                              const Tolerance& tol = {});

}  // namespace crystalwalk
