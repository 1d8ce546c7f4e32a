#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crystalwalk/asymptotics.hpp"
#include "crystalwalk/config.hpp"
#include "crystalwalk/errors.hpp"
#include "crystalwalk/report.hpp"
#include "crystalwalk/verify.hpp"
#include "crystalwalk/walker.hpp"

namespace cw = crystalwalk;

namespace {

// Dedicated stream ids for the single-path verification walks, far above
// the replicate streams 0..R-1 used by the CLT batch.
constexpr std::uint64_t kLedgerStream = 1ull << 32;
constexpr std::uint64_t kLlnStream = (1ull << 32) + 1;

std::uint64_t resolve_seed(bool cli_seed_set, std::uint64_t cli_seed, const cw::RunConfig& cfg) {
    if (cli_seed_set) return cli_seed;
    if (cfg.seed_set) return cfg.seed;
    if (const char* env = std::getenv("CRYSTALWALK_SEED")) {
        try {
            std::size_t used = 0;
            const std::string text(env);
            const std::uint64_t value = std::stoull(text, &used, 0);
            if (used != text.size()) throw std::invalid_argument(text);
            return value;
        } catch (const std::exception&) {
            throw cw::ConfigError(std::string("CRYSTALWALK_SEED is not a valid seed: '") +
                                  env + "'");
        }
    }
    return cw::kDefaultSeed;
}

void print_reports(const std::vector<cw::VerificationReport>& reports) {
    for (const cw::VerificationReport& rep : reports) std::cout << format_report_line(rep) << '\n';
}

int finish_verification(const std::vector<cw::VerificationReport>& reports,
                        const std::string& out_path) {
    print_reports(reports);
    const bool passed = cw::all_passed(reports);
    std::cout << (passed ? "verification passed" : "verification FAILED") << " ("
              << reports.size() << " checks)\n";
    if (!out_path.empty()) cw::write_text_file(out_path, cw::report_json(reports));
    return passed ? 0 : 1;
}

cw::VerificationReport approx_report(const std::string& name, double observed, double target,
                                     double tol) {
    cw::VerificationReport rep;
    rep.check_name = name;
    rep.observed = observed;
    rep.target = target;
    rep.tolerance_used = tol;
    rep.status =
        std::abs(observed - target) <= tol ? cw::CheckStatus::Pass : cw::CheckStatus::Fail;
    return rep;
}

int run_selftest() {
    std::vector<cw::VerificationReport> reports;
    const auto push_max = [&](const std::string& name, const cw::Mat3& observed,
                              const cw::Mat3& target, double tol) {
        reports.push_back(
            approx_report(name, cw::max_abs(cw::Mat3(observed - target)), 0.0, tol));
    };

    // Symmetric ice: isotropic in-plane diffusion with Gamma known in
    // closed form.
    {
        const cw::RunConfig cfg = cw::builtin_config("ice-symmetric");
        const cw::AsymptoticSummary s = cw::summarize(cfg.table);
        cw::Mat3 expected = cw::Mat3::Zero();
        expected.diagonal() << 0.4, 0.4, 0.2;
        push_max("selftest.ice_symmetric.gamma", s.Gamma, expected, 1e-12);
        for (cw::VerificationReport rep : cw::check_oracles(cfg.table)) {
            if (rep.status != cw::CheckStatus::Pass) reports.push_back(rep);
        }
        reports.push_back(approx_report("selftest.ice_symmetric.oracles", 1.0, 1.0, 0.0));
    }
    // Symmetric graphite: mean drift vanishes and Gamma is the known
    // diagonal with the slow vertical component.
    {
        const cw::RunConfig cfg = cw::builtin_config("graphite-symmetric");
        const cw::AsymptoticSummary s = cw::summarize(cfg.table);
        cw::Mat3 expected = cw::Mat3::Zero();
        expected.diagonal() << 4.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0;
        push_max("selftest.graphite_symmetric.gamma", s.Gamma, expected, 1e-12);
        reports.push_back(approx_report("selftest.graphite_symmetric.lln",
                                        s.lln_limit.norm(), 0.0, 1e-12));
    }
    // Degenerate zig-zag: Gamma = 0 and the orbit oscillates between two
    // sites.
    {
        const cw::RunConfig cfg = cw::builtin_config("ice-zigzag");
        const cw::AsymptoticSummary s = cw::summarize(cfg.table);
        reports.push_back(
            approx_report("selftest.zigzag.gamma", cw::max_abs(s.Gamma), 0.0, 1e-15));
        const cw::WalkRecord rec =
            cw::simulate(cfg.table, 64, {7, 0}, cw::SimMode::Trajectory);
        double max_norm = 0.0;
        for (const cw::LatticeState& st : rec.states) {
            max_norm = std::max(max_norm,
                                cw::position(st, cfg.table.geometry, rec.kind).norm());
        }
        reports.push_back(approx_report("selftest.zigzag.bounded", max_norm <= cfg.table.geometry.a
                                                                       ? 0.0
                                                                       : max_norm,
                                        0.0, 1e-15));
    }
    // Pure vertical ice (p = 1): Gamma collapses to the vertical variance.
    {
        const cw::RunConfig cfg = cw::builtin_config("ice-vertical");
        const cw::AsymptoticSummary s = cw::summarize(cfg.table);
        cw::Mat3 expected = cw::Mat3::Zero();
        expected(2, 2) = 1.0;
        push_max("selftest.ice_vertical.gamma", s.Gamma, expected, 1e-12);
        push_max("selftest.ice_vertical.gamma_equals_sigma2", s.Gamma, s.sigma2, 0.0);
    }
    // Ledger identities on short walks of both lattices.
    for (const char* name : {"ice-symmetric", "graphite-symmetric"}) {
        const cw::RunConfig cfg = cw::builtin_config(name);
        const cw::WalkRecord rec = cw::simulate(cfg.table, 10'000, {20240915, kLedgerStream});
        const auto ledger = cw::check_ledger(rec, cw::summarize(cfg.table));
        bool ok = cw::all_passed(ledger);
        for (const cw::VerificationReport& rep : ledger) {
            if (rep.status == cw::CheckStatus::Fail) reports.push_back(rep);
        }
        reports.push_back(approx_report(std::string("selftest.ledger.") + name, ok ? 1.0 : 0.0,
                                        1.0, 0.0));
    }
    return finish_verification(reports, "");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random walks on ice-1h and graphite-2h lattices"};
    app.set_version_flag("--version", CRYSTALWALK_VERSION);
    app.require_subcommand(1);

    std::string config_ref = "builtin:ice-symmetric";
    std::int64_t steps = -1;
    std::int64_t replicates = -1;
    std::int64_t clt_steps = 400;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string trajectory_path, summary_path, out_path, suite;
    cw::Tolerance tol;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_ref,
                        "config file path or builtin:<name> (ice-symmetric, graphite-symmetric, "
                        "ice-zigzag, ice-vertical)");
        return cmd->add_option("--seed", seed, "RNG seed (also CRYSTALWALK_SEED)");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run a single walk");
    CLI::Option* sim_seed = add_common(sim);
    sim->add_option("--steps", steps, "number of steps");
    sim->add_option("--trajectory", trajectory_path, "write the trajectory CSV here");
    sim->add_option("--summary", summary_path, "write the walk summary JSON here");

    CLI::App* asym = app.add_subcommand("asymptotics", "print closed-form walk asymptotics");
    asym->add_option("--config", config_ref, "config file path or builtin:<name>");
    asym->add_option("--out", out_path, "write the JSON here instead of stdout");

    CLI::App* ver = app.add_subcommand("verify", "run verification suites");
    CLI::Option* ver_seed = add_common(ver);
    ver->add_option("suite", suite, "oracles | ledger | lln | clt | all")
        ->required()
        ->check(CLI::IsMember({"oracles", "ledger", "lln", "clt", "all"}));
    ver->add_option("--steps", steps, "single-path horizon for ledger/lln");
    ver->add_option("--replicates", replicates, "CLT batch size");
    ver->add_option("--clt-steps", clt_steps, "per-replicate horizon for the CLT batch");
    ver->add_option("--threads", threads, "worker threads for the CLT batch (0 = auto)");
    ver->add_option("--out", out_path, "write the JSON report here");
    ver->add_option("--exact-eps", tol.exact_eps, "tolerance for exact identities");
    ver->add_option("--stat-z", tol.stat_z, "z-score bound for mean tests");
    ver->add_option("--cov-rel", tol.cov_rel, "relative tolerance for covariance entries");
    ver->add_option("--moment-abs", tol.moment_abs, "absolute tolerance for skewness/kurtosis");

    CLI::App* self = app.add_subcommand("selftest", "run the built-in reference cases");
    (void)self;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(sim)) {
            const cw::RunConfig cfg = cw::load_config(config_ref);
            const std::int64_t n = sim->count("--steps") ? steps : cfg.steps;
            const std::uint64_t s = resolve_seed(sim_seed->count() > 0, seed, cfg);
            const std::string traj =
                !trajectory_path.empty() ? trajectory_path : cfg.trajectory_out;
            const std::string summ = !summary_path.empty() ? summary_path : cfg.summary_out;
            const cw::SimMode mode =
                !traj.empty() ? cw::SimMode::Trajectory : cfg.mode;
            const cw::WalkRecord rec = cw::simulate(cfg.table, n, {s, 0}, mode);
            if (!traj.empty()) cw::write_trajectory_csv(traj, rec, cfg.table.geometry);
            if (!summ.empty()) cw::write_text_file(summ, cw::record_json(rec, cfg.table.geometry));
            std::cout << "lattice="
                      << (rec.kind == cw::LatticeKind::Graphite2h ? "graphite" : "ice")
                      << " steps=" << rec.steps << " seed=" << s << " S=(" << rec.S[0] << ", "
                      << rec.S[1] << ", " << rec.S[2] << ") I=" << rec.I;
            if (rec.kind == cw::LatticeKind::Graphite2h)
                std::cout << " J=" << rec.J << " K=" << rec.K;
            std::cout << '\n';
            return 0;
        }
        if (app.got_subcommand(asym)) {
            const cw::RunConfig cfg = cw::load_config(config_ref);
            const std::string body = cw::summary_json(cw::summarize(cfg.table));
            if (out_path.empty()) {
                std::cout << body;
            } else {
                cw::write_text_file(out_path, body);
            }
            return 0;
        }
        if (app.got_subcommand(ver)) {
            const cw::RunConfig cfg = cw::load_config(config_ref);
            const std::uint64_t s = resolve_seed(ver_seed->count() > 0, seed, cfg);
            const std::int64_t path_steps = ver->count("--steps") ? steps : cfg.steps;
            const std::int64_t reps = ver->count("--replicates") ? replicates : cfg.replicates;
            const std::string report_path = !out_path.empty() ? out_path : cfg.report_out;
            const cw::AsymptoticSummary summary = cw::summarize(cfg.table);

            std::vector<cw::VerificationReport> reports;
            const auto append = [&](std::vector<cw::VerificationReport> batch,
                                    std::int64_t used_steps, std::int64_t used_reps) {
                for (cw::VerificationReport& rep : batch) {
                    if (rep.steps == 0) rep.steps = used_steps;
                    if (rep.replicates == 0) rep.replicates = used_reps;
                    if (rep.seed == 0) rep.seed = s;
                    reports.push_back(std::move(rep));
                }
            };
            if (suite == "oracles" || suite == "all") {
                append(cw::check_oracles(cfg.table, tol), 0, 0);
            }
            if (suite == "ledger" || suite == "all") {
                const cw::WalkRecord rec =
                    cw::simulate(cfg.table, path_steps, {s, kLedgerStream});
                append(cw::check_ledger(rec, summary, tol), path_steps, 1);
            }
            if (suite == "lln" || suite == "all") {
                append(cw::check_lln(cfg.table, summary, std::max<std::int64_t>(path_steps, 2),
                                     {s, kLlnStream}, tol),
                       path_steps, 1);
            }
            if (suite == "clt" || suite == "all") {
                const cw::BatchStatistics batch =
                    cw::run_batch(cfg.table, clt_steps, reps, {s, 0}, threads);
                append(cw::check_clt(batch, summary, s, tol), clt_steps, reps);
            }
            return finish_verification(reports, report_path);
        }
        return run_selftest();
    } catch (const cw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
