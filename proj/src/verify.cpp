#include "crystalwalk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

namespace crystalwalk {

namespace {

constexpr double kDegenerateFloor = 1e-10;

Mat3 sym_outer(const Vec3& x, const Vec3& y) {
    return x * y.transpose() + y * x.transpose();
}

// Index of the largest absolute entry, for naming failures precisely.
std::pair<int, int> argmax_abs(const Mat3& m) {
    int br = 0, bc = 0;
    double best = -1.0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (std::abs(m(r, c)) > best) {
                best = std::abs(m(r, c));
                br = r;
                bc = c;
            }
        }
    }
    return {br, bc};
}

int argmax_abs(const Vec3& v) {
    int b = 0;
    for (int r = 1; r < 3; ++r) {
        if (std::abs(v[r]) > std::abs(v[b])) b = r;
    }
    return b;
}

const char* coord_name(int r) {
    static const char* names[3] = {"x", "y", "z"};
    return names[r];
}

VerificationReport make_report(std::string name, double observed, double target, double tol,
                               std::string detail = {}) {
    VerificationReport rep;
    rep.check_name = std::move(name);
    rep.observed = observed;
    rep.target = target;
    rep.tolerance_used = tol;
    rep.detail = std::move(detail);
    rep.status = (std::abs(observed - target) <= tol) ? CheckStatus::Pass : CheckStatus::Fail;
    return rep;
}

// Brute-force one-step expectations over the increment atoms, including
// the post-move sign variables.
struct ClassBrute {
    Vec3 mean = Vec3::Zero();
    Mat3 second = Mat3::Zero();
    double e_si = 0.0, e_sj = 0.0, e_sk = 0.0;
    Vec3 e_xi_si = Vec3::Zero(), e_xi_sj = Vec3::Zero(), e_xi_sk = Vec3::Zero();
};

ClassBrute brute_moments(const TransitionTable& table, VertexClass c) {
    ClassBrute b;
    for (const IncrementAtom& atom : increment_distribution(table, c)) {
        const double p = atom.probability;
        const Vec3& xi = atom.displacement;
        b.mean += p * xi;
        b.second += p * (xi * xi.transpose());
        const double si = sign_i(atom.class_after);
        const double sj = sign_j(atom.class_after);
        const double sk = sign_k(atom.class_after);
        b.e_si += p * si;
        b.e_sj += p * sj;
        b.e_sk += p * sk;
        b.e_xi_si += p * si * xi;
        b.e_xi_sj += p * sj * xi;
        b.e_xi_sk += p * sk * xi;
    }
    return b;
}

}  // namespace

std::vector<VerificationReport> check_oracles(const TransitionTable& table, const Tolerance& tol) {
    return check_oracles_against(table, summarize(table), tol);
}

std::vector<VerificationReport> check_oracles_against(const TransitionTable& table,
                                                      const AsymptoticSummary& s,
                                                      const Tolerance& tol) {
    std::vector<VerificationReport> reports;
    const double eps = tol.exact_eps;
    const bool ice = table.kind == LatticeKind::Ice1h;

    for (const VertexClass c : all_classes(table.kind)) {
        const std::string cname = class_name(table.kind, c);
        const double si = sign_i(c), sj = sign_j(c), sk = sign_k(c);
        const ClassBrute b = brute_moments(table, c);

        const Vec3 mean_closed =
            ice ? Vec3(s.mu + si * s.theta) : Vec3(s.mu + si * s.theta + sj * s.m + sk * s.rho);
        {
            const Vec3 diff = b.mean - mean_closed;
            const int r = argmax_abs(diff);
            VerificationReport rep = make_report("oracle.mean." + cname, b.mean[r],
                                                 mean_closed[r], eps,
                                                 std::string("component ") + coord_name(r));
            reports.push_back(rep);
        }
        {
            Mat3 second_closed = s.sigma2 + s.mu * s.mu.transpose() +
                                 s.theta * s.theta.transpose() +
                                 si * (s.nu + sym_outer(s.mu, s.theta));
            if (!ice) {
                second_closed += s.m * s.m.transpose() + s.rho * s.rho.transpose() +
                                 si * sym_outer(s.m, s.rho) +
                                 sj * (s.gamma + sym_outer(s.mu, s.m) + sym_outer(s.theta, s.rho)) +
                                 sk * (s.delta + sym_outer(s.mu, s.rho) + sym_outer(s.theta, s.m));
            }
            const Mat3 diff = b.second - second_closed;
            const auto [r, col] = argmax_abs(diff);
            reports.push_back(make_report(
                "oracle.second_moment." + cname, b.second(r, col), second_closed(r, col), eps,
                "class " + cname + ", entry (" + std::to_string(r) + "," + std::to_string(col) +
                    ")"));
        }
        if (ice) {
            reports.push_back(make_report("oracle.sign_eps." + cname, b.e_si,
                                          (2.0 * s.p - 1.0) * si, eps));
            const Vec3 cross_closed = (2.0 * s.zeta - mean_closed) * si;
            const Vec3 diff = b.e_xi_si - cross_closed;
            const int r = argmax_abs(diff);
            reports.push_back(make_report("oracle.cross_eps." + cname, b.e_xi_si[r],
                                          cross_closed[r], eps,
                                          std::string("component ") + coord_name(r)));
        } else {
            reports.push_back(make_report("oracle.sign_i." + cname, b.e_si, -si, eps));
            reports.push_back(
                make_report("oracle.sign_j." + cname, b.e_sj, s.p - (1.0 - s.p) * sj, eps));
            reports.push_back(make_report("oracle.sign_k." + cname, b.e_sk,
                                          (1.0 - s.p) * sk - s.p * si, eps));
            {
                const Vec3 closed = (1.0 + sj) * s.zeta - mean_closed * sj;
                const int r = argmax_abs(Vec3(b.e_xi_sj - closed));
                reports.push_back(make_report("oracle.cross_j." + cname, b.e_xi_sj[r], closed[r],
                                              eps, std::string("component ") + coord_name(r)));
            }
            {
                const Vec3 closed = mean_closed * sk - (si + sk) * s.zeta;
                const int r = argmax_abs(Vec3(b.e_xi_sk - closed));
                reports.push_back(make_report("oracle.cross_k." + cname, b.e_xi_sk[r], closed[r],
                                              eps, std::string("component ") + coord_name(r)));
            }
        }
    }
    return reports;
}

std::vector<VerificationReport> check_ledger(const WalkRecord& record,
                                             const AsymptoticSummary& s, const Tolerance& tol) {
    std::vector<VerificationReport> reports;
    const double eps = tol.exact_eps;
    const double n = static_cast<double>(record.steps);
    const double p = s.p;
    const bool ice = record.kind == LatticeKind::Ice1h;
    const MartingaleLedger& led = record.ledger;

    // Counters through time n-1 (the predictable side of every closed
    // form); empty sums at n = 0.
    const double i_prev =
        record.steps == 0 ? 0.0 : static_cast<double>(record.I - sign_i(record.final_state.cls));
    const double j_prev =
        record.steps == 0 ? 0.0 : static_cast<double>(record.J - sign_j(record.final_state.cls));
    const double k_prev =
        record.steps == 0 ? 0.0 : static_cast<double>(record.K - sign_k(record.final_state.cls));

    const auto push_vec = [&](const std::string& name, const Vec3& observed, const Vec3& target) {
        const int r = argmax_abs(Vec3(observed - target));
        reports.push_back(make_report(name, observed[r], target[r], eps,
                                      std::string("component ") + coord_name(r)));
    };
    const auto push_mat = [&](const std::string& name, const Mat3& observed, const Mat3& target) {
        const auto [r, c] = argmax_abs(Mat3(observed - target));
        reports.push_back(make_report(name, observed(r, c), target(r, c), eps,
                                      "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                          ")"));
    };

    push_vec("ledger.decomposition", record.S, led.M + led.R);
    {
        Vec3 r_closed = n * s.mu + i_prev * s.theta;
        if (!ice) r_closed += j_prev * s.m + k_prev * s.rho;
        push_vec("ledger.remainder", led.R, r_closed);
    }
    push_vec("ledger.position", record.S, position(record.final_state, s.geometry, record.kind));

    {
        Mat3 closed = n * s.sigma2 + i_prev * s.nu;
        if (!ice) closed += j_prev * s.gamma + k_prev * s.delta;
        push_mat("ledger.bracket.M", led.bracket_M, closed);
    }
    if (ice) {
        reports.push_back(make_report("ledger.bracket.N", led.bracket_N,
                                      4.0 * p * (1.0 - p) * n, eps));
        push_vec("ledger.bracket.C", led.bracket_C,
                 Vec3(-2.0 * n * p * s.theta + 2.0 * (s.zeta - p * s.mu) * i_prev));
        reports.push_back(make_report("ledger.sign_martingale.N", led.N,
                                      static_cast<double>(record.I - 1) -
                                          (2.0 * p - 1.0) * i_prev,
                                      eps));
    } else {
        const double nj_closed = 2.0 * p * (1.0 - p) * (n + j_prev);
        reports.push_back(make_report("ledger.bracket.NJ", led.bracket_NJ, nj_closed, eps));
        reports.push_back(make_report("ledger.bracket.NK", led.bracket_NK, nj_closed, eps));
        push_vec("ledger.bracket.C", led.bracket_C,
                 Vec3((s.zeta - p * (s.mu + s.m)) * (n + j_prev) -
                      p * (s.theta + s.rho) * (i_prev + k_prev)));
        push_vec("ledger.bracket.E", led.bracket_E,
                 Vec3((p * (s.mu + s.m) - s.zeta) * (i_prev + k_prev) +
                      p * (s.theta + s.rho) * (n + j_prev)));
        reports.push_back(make_report("ledger.bracket.D", led.bracket_D,
                                      -2.0 * p * (1.0 - p) * (i_prev + k_prev), eps));
        reports.push_back(make_report(
            "ledger.sign_martingale.NJ", led.NJ,
            static_cast<double>(record.J - 1) - p * n + (1.0 - p) * j_prev, eps));
        reports.push_back(make_report(
            "ledger.sign_martingale.NK", led.NK,
            static_cast<double>(record.K - 1) - (1.0 - p) * k_prev + p * i_prev, eps));
        // Parity: i_n = (-1)^n, hence I_n alternates between 1 and 0.
        const double parity_target = (record.steps % 2 == 0) ? 1.0 : 0.0;
        reports.push_back(make_report("ledger.parity", static_cast<double>(record.I),
                                      parity_target, 0.0));
    }
    return reports;
}

std::vector<VerificationReport> check_lln(const TransitionTable& table,
                                          const AsymptoticSummary& s, std::int64_t n_final,
                                          RngSpec rng, const Tolerance& tol) {
    std::vector<VerificationReport> reports;
    if (n_final < 2) throw std::domain_error("check_lln requires n_final >= 2");

    const double trace = s.Gamma.trace();
    const bool degenerate = trace <= kDegenerateFloor;
    // Deterministic orbits (every class law a single atom) stay within a
    // bounded cell, so the error decays like orbit-size/n instead of the
    // stochastic rate.
    const double orbit_scale =
        2.0 * (s.geometry.a + s.geometry.h + s.theta.norm() + s.m.norm() + s.rho.norm());

    Simulation sim(table, rng, SimMode::Summary);
    std::int64_t done = 0;
    bool flagged_before_final = false;
    double final_err2 = 0.0, final_bound = 0.0;

    std::vector<std::int64_t> checkpoints;
    for (std::int64_t n = 2; n < n_final; n *= 2) checkpoints.push_back(n);
    checkpoints.push_back(n_final);

    for (const std::int64_t n : checkpoints) {
        sim.advance(n - done);
        done = n;
        const double dn = static_cast<double>(n);
        const Vec3 avg = sim.S() / dn;
        const double err2 = (avg - s.lln_limit).squaredNorm();
        const double bound = degenerate ? (orbit_scale / dn) * (orbit_scale / dn)
                                        : 25.0 * trace * lln_rate_bound(n);
        if (n == n_final) {
            final_err2 = err2;
            final_bound = bound;
        } else if (err2 > bound) {
            VerificationReport rep = make_report("lln.checkpoint." + std::to_string(n), err2,
                                                 0.0, bound);
            rep.status = CheckStatus::Flagged;
            rep.steps = n;
            rep.seed = rng.seed;
            reports.push_back(rep);
            flagged_before_final = true;
        }
    }

    VerificationReport rate = make_report("lln.rate", final_err2, 0.0, final_bound);
    rate.steps = n_final;
    rate.seed = rng.seed;
    rate.detail = flagged_before_final ? "isolated pre-final exceedances flagged" : "";
    reports.push_back(rate);

    if (table.kind == LatticeKind::Graphite2h) {
        const double dn = static_cast<double>(n_final);
        const double observed = static_cast<double>(sim.counter_J()) / dn;
        const double target = (s.p > 0.0) ? s.p / (2.0 - s.p) : 0.0;
        const double band = (s.p > 0.0)
                                ? tol.stat_z * std::sqrt(counter_j_variance(s) / dn)
                                : 2.0 / dn;
        VerificationReport rep = make_report("lln.counter_j", observed, target, band);
        rep.steps = n_final;
        rep.seed = rng.seed;
        reports.push_back(rep);
    }
    return reports;
}

std::vector<VerificationReport> check_clt(const BatchStatistics& batch,
                                          const AsymptoticSummary& s, std::uint64_t seed,
                                          const Tolerance& tol) {
    std::vector<VerificationReport> reports;
    const double n = static_cast<double>(batch.n);
    const double reps = static_cast<double>(batch.replicates);
    const Mat3& G = s.Gamma;
    const double floor_abs = 2e-3 * std::max(1.0, max_abs(G));

    const auto finalize = [&](VerificationReport rep) {
        rep.steps = batch.n;
        rep.replicates = batch.replicates;
        rep.seed = seed;
        reports.push_back(std::move(rep));
    };

    const Vec3 mean_t = (batch.mean_S - n * s.lln_limit) / std::sqrt(n);
    for (int r = 0; r < 3; ++r) {
        const std::string name = std::string("clt.mean.") + coord_name(r);
        if (G(r, r) > kDegenerateFloor) {
            const double se = std::sqrt(G(r, r) / reps);
            finalize(make_report(name, mean_t[r], 0.0, tol.stat_z * se));
        } else {
            finalize(make_report(name, mean_t[r], 0.0, floor_abs, "degenerate coordinate"));
        }
    }

    for (int r = 0; r < 3; ++r) {
        for (int c = r; c < 3; ++c) {
            const double bound = std::max(tol.cov_rel * std::abs(G(r, c)), floor_abs);
            finalize(make_report(std::string("clt.cov.") + coord_name(r) + coord_name(c),
                                 batch.cov_scaled(r, c), G(r, c), bound));
        }
    }

    for (int r = 0; r < 3; ++r) {
        if (G(r, r) <= kDegenerateFloor) continue;
        finalize(make_report(std::string("clt.skewness.") + coord_name(r), batch.skewness[r],
                             0.0, tol.moment_abs));
        finalize(make_report(std::string("clt.kurtosis.") + coord_name(r), batch.kurtosis[r],
                             3.0, tol.moment_abs));
    }

    // Cramer-Wold projections: the three axes plus two seeded unit vectors.
    std::vector<std::pair<std::string, Vec3>> dirs = {
        {"axis_x", Vec3::UnitX()}, {"axis_y", Vec3::UnitY()}, {"axis_z", Vec3::UnitZ()}};
    PhiloxStream pr(seed, 0x70726f6aull);  // dedicated projection stream
    for (int k = 1; k <= 2; ++k) {
        Vec3 u;
        double norm2 = 0.0;
        do {
            u = Vec3(2.0 * pr.next_double() - 1.0, 2.0 * pr.next_double() - 1.0,
                     2.0 * pr.next_double() - 1.0);
            norm2 = u.squaredNorm();
        } while (norm2 < 1e-4 || norm2 > 1.0);
        dirs.emplace_back("rand_" + std::to_string(k), u / std::sqrt(norm2));
    }
    for (const auto& [name, u] : dirs) {
        const double observed = u.dot(batch.cov_scaled * u);
        const double target = u.dot(G * u);
        const double bound = std::max(tol.cov_rel * std::abs(target), floor_abs);
        finalize(make_report("clt.projection." + name, observed, target, bound));
    }
    return reports;
}

TransitionTable random_table(LatticeKind kind, PhiloxStream& rng) {
    TransitionTable t;
    t.kind = kind;
    t.geometry.a = 0.5 + 1.5 * rng.next_double();
    t.geometry.h = 0.5 + 1.5 * rng.next_double();
    t.p = rng.next_double();
    t.alpha = 0.02 + 0.96 * rng.next_double();

    const auto fill_row = [&](std::array<double, 3>& row, double total) {
        double g[3], sum = 0.0;
        for (double& x : g) {
            x = 0.05 + rng.next_double();
            sum += x;
        }
        for (int jp = 0; jp < 3; ++jp) row[jp] = total * g[jp] / sum;
    };
    if (kind == LatticeKind::Ice1h) {
        for (int i = 0; i < 2; ++i) fill_row(t.ice_rows[i], 1.0 - t.p);
    } else {
        for (int i = 0; i < 2; ++i) {
            fill_row(t.graphite_rows[i][0], 1.0 - t.p);
            fill_row(t.graphite_rows[i][1], 1.0);
        }
    }
    validate(t);
    return t;
}

std::vector<FaultProbe> fault_injection_sweep(const TransitionTable& table, double rel,
                                              std::int64_t ledger_steps, RngSpec rng,
                                              double min_coeff, const Tolerance& tol) {
    const AsymptoticSummary base = summarize(table);
    const WalkRecord record = simulate(table, ledger_steps, rng);

    struct Slot {
        std::string name;
        std::function<double(const AsymptoticSummary&)> get;
        std::function<void(AsymptoticSummary&, double)> scale;
    };
    std::vector<Slot> slots;
    const auto add_vec = [&](const std::string& label, Vec3 AsymptoticSummary::* field) {
        for (int r = 0; r < 3; ++r) {
            slots.push_back({label + "[" + coord_name(r) + "]",
                             [field, r](const AsymptoticSummary& s) { return (s.*field)[r]; },
                             [field, r](AsymptoticSummary& s, double f) { (s.*field)[r] *= f; }});
        }
    };
    const auto add_mat = [&](const std::string& label, Mat3 AsymptoticSummary::* field) {
        for (int r = 0; r < 3; ++r) {
            for (int c = r; c < 3; ++c) {
                slots.push_back(
                    {label + "(" + std::to_string(r) + "," + std::to_string(c) + ")",
                     [field, r, c](const AsymptoticSummary& s) { return (s.*field)(r, c); },
                     [field, r, c](AsymptoticSummary& s, double f) {
                         // Scale the mirror entry too so the matrix stays symmetric.
                         (s.*field)(r, c) *= f;
                         if (r != c) (s.*field)(c, r) *= f;
                     }});
            }
        }
    };
    add_vec("mu", &AsymptoticSummary::mu);
    add_vec("theta", &AsymptoticSummary::theta);
    add_vec("zeta", &AsymptoticSummary::zeta);
    add_mat("sigma2", &AsymptoticSummary::sigma2);
    add_mat("nu", &AsymptoticSummary::nu);
    if (table.kind == LatticeKind::Graphite2h) {
        add_vec("m", &AsymptoticSummary::m);
        add_vec("rho", &AsymptoticSummary::rho);
        add_mat("gamma", &AsymptoticSummary::gamma);
        add_mat("delta", &AsymptoticSummary::delta);
    }

    std::vector<FaultProbe> probes;
    for (const Slot& slot : slots) {
        const double value = slot.get(base);
        if (std::abs(value) < min_coeff) continue;

        AsymptoticSummary probe_summary = base;
        slot.scale(probe_summary, 1.0 + rel);

        FaultProbe probe;
        probe.coefficient = slot.name;
        probe.value = value;
        auto reports = check_oracles_against(table, probe_summary, tol);
        auto ledger_reports = check_ledger(record, probe_summary, tol);
        reports.insert(reports.end(), ledger_reports.begin(), ledger_reports.end());
        for (const VerificationReport& rep : reports) {
            if (rep.status == CheckStatus::Fail) {
                probe.detected = true;
                probe.failed_check = rep.check_name;
                break;
            }
        }
        probes.push_back(std::move(probe));
    }
    return probes;
}

}  // namespace crystalwalk
