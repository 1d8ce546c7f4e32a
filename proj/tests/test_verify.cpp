#include <string>

#include "doctest.h"

#include "crystalwalk/config.hpp"
#include "crystalwalk/verify.hpp"
#include "crystalwalk/walker.hpp"

using namespace crystalwalk;

namespace {

bool any_fail_containing(const std::vector<VerificationReport>& reports,
                         const std::string& needle) {
    for (const VerificationReport& rep : reports) {
        if (rep.status == CheckStatus::Fail &&
            rep.check_name.find(needle) != std::string::npos)
            return true;
    }
    return false;
}

}  // namespace

TEST_CASE("random tables validate and cover the parameter box") {
    PhiloxStream rng(404, 0);
    double p_lo = 1.0, p_hi = 0.0;
    for (int k = 0; k < 200; ++k) {
        const TransitionTable t = random_table(LatticeKind::Graphite2h, rng);
        CHECK_NOTHROW(validate(t));
        p_lo = std::min(p_lo, t.p);
        p_hi = std::max(p_hi, t.p);
    }
    CHECK(p_lo < 0.1);
    CHECK(p_hi > 0.9);
}

TEST_CASE("oracle checks pass on random models of both lattices") {
    PhiloxStream rng(505, 0);
    for (const LatticeKind kind : {LatticeKind::Ice1h, LatticeKind::Graphite2h}) {
        for (int k = 0; k < 50; ++k) {
            const auto reports = check_oracles(random_table(kind, rng));
            CHECK(all_passed(reports));
        }
    }
}

TEST_CASE("oracle checks localize a corrupted coefficient") {
    PhiloxStream rng(606, 0);
    const TransitionTable t = random_table(LatticeKind::Graphite2h, rng);
    AsymptoticSummary s = summarize(t);
    REQUIRE(all_passed(check_oracles_against(t, s)));

    SUBCASE("second-moment corruption") {
        s.sigma2(0, 1) *= 1.001;
        s.sigma2(1, 0) = s.sigma2(0, 1);
        const auto reports = check_oracles_against(t, s);
        CHECK(!all_passed(reports));
        CHECK(any_fail_containing(reports, "second_moment"));
        // The failing report names the class and the matrix entry.
        for (const VerificationReport& rep : reports) {
            if (rep.status == CheckStatus::Fail) {
                CHECK(rep.check_name.find("V_") != std::string::npos);
                CHECK(rep.detail.find("entry") != std::string::npos);
            }
        }
    }
    SUBCASE("mean corruption") {
        s.mu[0] += 1e-6;
        CHECK(any_fail_containing(check_oracles_against(t, s), "mean"));
    }
    SUBCASE("vertical coupling corruption") {
        s.zeta[2] *= 1.001;
        CHECK(!all_passed(check_oracles_against(t, s)));
    }
}

TEST_CASE("ledger checks catch a wrong remainder coefficient") {
    PhiloxStream rng(707, 0);
    const TransitionTable t = random_table(LatticeKind::Ice1h, rng);
    const WalkRecord rec = simulate(t, 20'000, {707, 1});
    AsymptoticSummary s = summarize(t);
    REQUIRE(all_passed(check_ledger(rec, s)));
    s.mu[1] *= 1.0 + 1e-6;
    const auto reports = check_ledger(rec, s);
    CHECK(any_fail_containing(reports, "remainder"));
}

TEST_CASE("lln check passes for the symmetric models at small horizons") {
    for (const char* name : {"ice-symmetric", "graphite-symmetric"}) {
        const TransitionTable t = builtin_config(name).table;
        const auto reports = check_lln(t, summarize(t), 1 << 16, {2024, 0});
        for (const VerificationReport& rep : reports) {
            CAPTURE(rep.check_name);
            CHECK(rep.status != CheckStatus::Fail);
        }
    }
}

TEST_CASE("lln check uses the deterministic envelope for degenerate walks") {
    const TransitionTable t = builtin_config("ice-zigzag").table;
    const auto reports = check_lln(t, summarize(t), 1 << 12, {1, 0});
    bool saw_rate = false;
    for (const VerificationReport& rep : reports) {
        if (rep.check_name == "lln.rate") {
            saw_rate = true;
            CHECK(rep.status == CheckStatus::Pass);
            CHECK(rep.tolerance_used > 0.0);  // finite orbit envelope, not 25*trace
        }
    }
    CHECK(saw_rate);
}

TEST_CASE("lln check rejects horizons below two steps") {
    const TransitionTable t = builtin_config("ice-symmetric").table;
    CHECK_THROWS_AS(check_lln(t, summarize(t), 1, {1, 0}), std::domain_error);
}

TEST_CASE("clt check passes at a verified batch scale") {
    const TransitionTable t = builtin_config("ice-symmetric").table;
    const BatchStatistics batch = run_batch(t, 200, 100'000, {20240915, 0});
    const auto reports = check_clt(batch, summarize(t), 20240915);
    for (const VerificationReport& rep : reports) {
        CAPTURE(rep.check_name);
        CHECK(rep.status == CheckStatus::Pass);
    }
    // 3 means + 6 covariance entries + 3 skew + 3 kurt + 5 projections.
    CHECK(reports.size() == 20);
}

TEST_CASE("clt check flags a covariance that drifts beyond tolerance") {
    const TransitionTable t = builtin_config("ice-symmetric").table;
    const BatchStatistics batch = run_batch(t, 200, 20'000, {11, 0});
    AsymptoticSummary s = summarize(t);
    s.Gamma(0, 0) *= 1.2;  // 20% off, outside the 5% band
    const auto reports = check_clt(batch, s, 11);
    CHECK(any_fail_containing(reports, "cov.xx"));
}

TEST_CASE("fault injection detects every perturbed coefficient") {
    PhiloxStream rng(808, 0);
    for (const LatticeKind kind : {LatticeKind::Ice1h, LatticeKind::Graphite2h}) {
        const TransitionTable t = random_table(kind, rng);
        const auto probes = fault_injection_sweep(t);
        CHECK(!probes.empty());
        for (const FaultProbe& probe : probes) {
            CAPTURE(probe.coefficient);
            CAPTURE(probe.value);
            CHECK(probe.detected);
            CHECK(!probe.failed_check.empty());
        }
    }
}

TEST_CASE("flagged reports do not fail the aggregate") {
    VerificationReport flagged;
    flagged.status = CheckStatus::Flagged;
    VerificationReport pass;
    CHECK(all_passed({pass, flagged}));
    VerificationReport fail;
    fail.status = CheckStatus::Fail;
    CHECK(!all_passed({pass, flagged, fail}));
}
