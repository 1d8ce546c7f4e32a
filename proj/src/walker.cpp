#include "crystalwalk/walker.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

namespace crystalwalk {

namespace detail {

namespace {

// Sign tables by class index (ice: i; graphite: i + 2j).
constexpr int kSi[4] = {+1, -1, +1, -1};
constexpr int kSj[4] = {+1, +1, -1, -1};
constexpr int kSk[4] = {+1, -1, -1, +1};

}  // namespace

SamplerTables build_sampler_tables(const TransitionTable& table) {
    validate(table);
    SamplerTables tables;
    tables.kind = table.kind;
    tables.class_count = (table.kind == LatticeKind::Ice1h) ? 2 : 4;

    for (const VertexClass c : all_classes(table.kind)) {
        ClassLaw& law = tables.laws[class_index(table.kind, c)];
        LatticeState site;
        site.cls = c;

        double cum = 0.0;
        double mean_si = 0.0, mean_sj = 0.0, mean_sk = 0.0;
        double exx[3][3] = {};
        double e_xi_sj[3] = {}, e_xi_sk[3] = {};
        double e_sj_sk = 0.0;
        Vec3 mean = Vec3::Zero();

        for (const IncrementAtom& atom : increment_distribution(table, c)) {
            const int a = law.atom_count++;
            cum += atom.probability;
            law.cdf[a] = cum;
            law.dx[a] = atom.displacement[0];
            law.dy[a] = atom.displacement[1];
            law.dz[a] = atom.displacement[2];
            law.move[a] = atom.move;
            const LatticeState next = apply_move(site, atom.move, table.kind);
            law.dk[a] = static_cast<std::int8_t>(next.cell_k);
            law.dl[a] = static_cast<std::int8_t>(next.cell_l);
            law.dn[a] = static_cast<std::int8_t>(next.sheet_n);
            const int nidx = class_index(table.kind, next.cls);
            law.next_idx[a] = static_cast<std::uint8_t>(nidx);

            mean += atom.probability * atom.displacement;
            for (int r = 0; r < 3; ++r) {
                for (int col = 0; col < 3; ++col) {
                    exx[r][col] +=
                        atom.probability * atom.displacement[r] * atom.displacement[col];
                }
            }
            const int si = kSi[nidx], sj = kSj[nidx], sk = kSk[nidx];
            mean_si += atom.probability * si;
            mean_sj += atom.probability * sj;
            mean_sk += atom.probability * sk;
            for (int r = 0; r < 3; ++r) {
                e_xi_sj[r] += atom.probability * atom.displacement[r] * sj;
                e_xi_sk[r] += atom.probability * atom.displacement[r] * sk;
            }
            e_sj_sk += atom.probability * sj * sk;
        }
        // Guard the inverse-CDF search against u landing on rounded-up mass.
        law.cdf[law.atom_count - 1] = 2.0;

        law.mean = mean;
        law.mean_si = mean_si;
        law.mean_sj = mean_sj;
        law.mean_sk = mean_sk;
        for (int r = 0; r < 3; ++r) {
            for (int col = 0; col < 3; ++col) {
                law.cov(r, col) = exx[r][col] - mean[r] * mean[col];
            }
        }
        if (table.kind == LatticeKind::Ice1h) {
            // Ice classes always carry j = 0, so the sk lanes accumulated
            // E[. * eps'] already: sign_k == sign_i there.
            law.var_sj = 1.0 - mean_si * mean_si;
            for (int r = 0; r < 3; ++r) law.cov_C[r] = e_xi_sk[r] - mean[r] * mean_si;
        } else {
            law.var_sj = 1.0 - mean_sj * mean_sj;
            law.var_sk = 1.0 - mean_sk * mean_sk;
            for (int r = 0; r < 3; ++r) {
                law.cov_C[r] = e_xi_sj[r] - mean[r] * mean_sj;
                law.cov_E[r] = e_xi_sk[r] - mean[r] * mean_sk;
            }
            law.cov_D = e_sj_sk - mean_sj * mean_sk;
        }
    }
    return tables;
}

}  // namespace detail

std::pair<LatticeState, IncrementAtom> step(const LatticeState& state,
                                            const TransitionTable& table, PhiloxStream& rng) {
    const std::vector<IncrementAtom> atoms = increment_distribution(table, state.cls);
    const double u = rng.next_double();
    double cum = 0.0;
    std::size_t pick = atoms.size() - 1;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        cum += atoms[a].probability;
        if (u < cum) {
            pick = a;
            break;
        }
    }
    return {apply_move(state, atoms[pick].move, table.kind), atoms[pick]};
}

Simulation::Simulation(const TransitionTable& table, RngSpec rng, SimMode mode,
                       std::int64_t trajectory_cap)
    : tables_(detail::build_sampler_tables(table)),
      geometry_(table.geometry),
      p_(table.p),
      mode_(mode),
      trajectory_cap_(trajectory_cap),
      spec_(rng),
      rng_(rng.seed, rng.stream_id) {
    // Inclusive counters: the origin contributes its time-0 signs.
    I_ = 1;
    if (tables_.kind == LatticeKind::Graphite2h) {
        J_ = 1;
        K_ = 1;
    }
    if (mode_ == SimMode::Trajectory) {
        states_.push_back(LatticeState{});
    }
}

template <LatticeKind Kind>
void Simulation::advance_impl(std::int64_t steps) {
    for (std::int64_t s = 0; s < steps; ++s) {
        const detail::ClassLaw& law = tables_.laws[idx_];
        ++visits_[idx_];

        const double u = rng_.next_double();
        int a = 0;
        while (u >= law.cdf[a]) ++a;

        S_acc_.add(law.dx[a], law.dy[a], law.dz[a]);
        M_acc_.add(law.dx[a] - law.mean[0], law.dy[a] - law.mean[1], law.dz[a] - law.mean[2]);
        R_acc_.add(law.mean[0], law.mean[1], law.mean[2]);

        cell_k_ += law.dk[a];
        cell_l_ += law.dl[a];
        sheet_n_ += law.dn[a];
        const int nidx = law.next_idx[a];

        if constexpr (Kind == LatticeKind::Ice1h) {
            const int si = detail::kSi[nidx];
            I_ += si;
            N_acc_.add(static_cast<double>(si) - law.mean_si);
        } else {
            const int si = detail::kSi[nidx];
            const int sj = detail::kSj[nidx];
            const int sk = detail::kSk[nidx];
            I_ += si;
            J_ += sj;
            K_ += sk;
            NJ_acc_.add(static_cast<double>(sj) - law.mean_sj);
            NK_acc_.add(static_cast<double>(sk) - law.mean_sk);
        }
        idx_ = nidx;

        if (mode_ == SimMode::Trajectory) {
            LatticeState st;
            st.cell_k = cell_k_;
            st.cell_l = cell_l_;
            st.sheet_n = sheet_n_;
            st.cls.i = static_cast<std::uint8_t>(idx_ & 1);
            st.cls.j = static_cast<std::uint8_t>(idx_ >> 1);
            states_.push_back(st);
        }
    }
    steps_ += steps;
}

void Simulation::advance(std::int64_t steps) {
    if (steps < 0) throw RangeError("step count must be non-negative");
    if (mode_ == SimMode::Trajectory && steps_ + steps > trajectory_cap_) {
        throw std::length_error("trajectory retention cap exceeded");
    }
    if (mode_ == SimMode::Trajectory) states_.reserve(static_cast<std::size_t>(steps_ + steps) + 1);
    if (tables_.kind == LatticeKind::Ice1h) {
        advance_impl<LatticeKind::Ice1h>(steps);
    } else {
        advance_impl<LatticeKind::Graphite2h>(steps);
    }
}

Vec3 Simulation::S() const { return S_acc_.value(); }

void Simulation::fill_record(WalkRecord& out) const {
    out.kind = tables_.kind;
    out.final_state.cell_k = cell_k_;
    out.final_state.cell_l = cell_l_;
    out.final_state.sheet_n = sheet_n_;
    out.final_state.cls.i = static_cast<std::uint8_t>(idx_ & 1);
    out.final_state.cls.j = static_cast<std::uint8_t>(idx_ >> 1);
    out.S = S_acc_.value();
    out.I = I_;
    out.J = J_;
    out.K = K_;
    out.steps = steps_;
    out.class_visits = visits_;
    out.rng = spec_;

    MartingaleLedger& led = out.ledger;
    led.M = M_acc_.value();
    led.R = R_acc_.value();
    led.N = N_acc_.value();
    led.NJ = NJ_acc_.value();
    led.NK = NK_acc_.value();
    // Bracket increments are deterministic given the pre-step class, so the
    // exact pathwise accumulation is visits * increment.
    for (int c = 0; c < tables_.class_count; ++c) {
        const double n_c = static_cast<double>(visits_[c]);
        if (n_c == 0.0) continue;
        const detail::ClassLaw& law = tables_.laws[c];
        led.bracket_M += n_c * law.cov;
        if (tables_.kind == LatticeKind::Ice1h) {
            led.bracket_N += n_c * law.var_sj;
            led.bracket_C += n_c * law.cov_C;
        } else {
            led.bracket_NJ += n_c * law.var_sj;
            led.bracket_NK += n_c * law.var_sk;
            led.bracket_C += n_c * law.cov_C;
            led.bracket_E += n_c * law.cov_E;
            led.bracket_D += n_c * law.cov_D;
        }
    }
}

WalkRecord Simulation::record() const {
    WalkRecord out;
    fill_record(out);
    out.states = states_;
    return out;
}

WalkRecord Simulation::finish() {
    WalkRecord out;
    fill_record(out);
    out.states = std::move(states_);
    return out;
}

WalkRecord simulate(const TransitionTable& table, std::int64_t n, RngSpec rng, SimMode mode,
                    std::int64_t trajectory_cap) {
    if (n < 0) throw RangeError("simulate requires n >= 0");
    Simulation sim(table, rng, mode, trajectory_cap);
    sim.advance(n);
    return sim.finish();
}

BatchStatistics run_batch(const TransitionTable& table, std::int64_t n, std::int64_t replicates,
                          RngSpec base_rng, int threads) {
    if (replicates < 2) throw RangeError("run_batch requires at least 2 replicates");
    if (n < 0) throw RangeError("run_batch requires n >= 0");
    validate(table);

    struct Row {
        double s[3];
        std::int64_t I, J, K;
    };
    std::vector<Row> rows(static_cast<std::size_t>(replicates));

    int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (worker_count < 1) worker_count = 1;
    if (static_cast<std::int64_t>(worker_count) > replicates) {
        worker_count = static_cast<int>(replicates);
    }

    std::exception_ptr failure;
    std::mutex failure_guard;
    const auto work = [&](int worker) {
        try {
            for (std::int64_t r = worker; r < replicates; r += worker_count) {
                Simulation sim(table, RngSpec{base_rng.seed,
                                              base_rng.stream_id + static_cast<std::uint64_t>(r)});
                sim.advance(n);
                const Vec3 s = sim.S();
                rows[static_cast<std::size_t>(r)] =
                    Row{{s[0], s[1], s[2]}, sim.counter_I(), sim.counter_J(), sim.counter_K()};
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_guard);
            if (!failure) failure = std::current_exception();
        }
    };

    if (worker_count == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(worker_count));
        for (int w = 0; w < worker_count; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Deterministic sequential reduction in replicate order: results do not
    // depend on the thread count.
    BatchStatistics stats;
    stats.replicates = replicates;
    stats.n = n;
    const double inv_r = 1.0 / static_cast<double>(replicates);

    KahanVec3 sum_s;
    KahanScalar sum_i, sum_j, sum_k;
    for (const Row& row : rows) {
        sum_s.add(row.s[0], row.s[1], row.s[2]);
        sum_i.add(static_cast<double>(row.I));
        sum_j.add(static_cast<double>(row.J));
        sum_k.add(static_cast<double>(row.K));
    }
    stats.mean_S = inv_r * sum_s.value();
    if (n > 0) {
        stats.counter_means = Vec3(sum_i.value(), sum_j.value(), sum_k.value()) * inv_r /
                              static_cast<double>(n);
    }

    KahanScalar cov[3][3], m2[3], m3[3], m4[3];
    for (const Row& row : rows) {
        const double d[3] = {row.s[0] - stats.mean_S[0], row.s[1] - stats.mean_S[1],
                             row.s[2] - stats.mean_S[2]};
        for (int r = 0; r < 3; ++r) {
            for (int c = r; c < 3; ++c) cov[r][c].add(d[r] * d[c]);
            const double d2 = d[r] * d[r];
            m2[r].add(d2);
            m3[r].add(d2 * d[r]);
            m4[r].add(d2 * d2);
        }
    }
    const double scale = (n > 0) ? 1.0 / (static_cast<double>(replicates - 1) * static_cast<double>(n))
                                 : 0.0;
    for (int r = 0; r < 3; ++r) {
        for (int c = r; c < 3; ++c) {
            stats.cov_scaled(r, c) = stats.cov_scaled(c, r) = cov[r][c].value() * scale;
        }
    }
    for (int r = 0; r < 3; ++r) {
        const double v2 = m2[r].value() * inv_r;
        if (v2 > 0.0) {
            stats.skewness[r] = m3[r].value() * inv_r / std::pow(v2, 1.5);
            stats.kurtosis[r] = m4[r].value() * inv_r / (v2 * v2);
        }
    }
    return stats;
}

}  // namespace crystalwalk
