#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "crystalwalk/kernels.hpp"
#include "crystalwalk/rng.hpp"

namespace crystalwalk {

// Identifies one reproducible stream: same (seed, stream_id) means the
// bit-identical trajectory on every platform. run_batch gives replicate r
// the stream base.stream_id + r.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

enum class SimMode { Summary, Trajectory };

inline constexpr std::int64_t kDefaultTrajectoryCap = 10'000'000;

// Pathwise martingale bookkeeping. M and R are the two halves of the
// decomposition S_n = M_n + R_n; N (ice) and N^J, N^K (graphite) are the
// sign martingales. The brackets are the predictable quadratic variations
// and cross-variations; their per-step increments depend only on the
// pre-step class, so they are reconstructed exactly from per-class visit
// counts instead of being rounded into a float every step.
struct MartingaleLedger {
    Vec3 M = Vec3::Zero();
    Vec3 R = Vec3::Zero();
    double N = 0.0;
    double NJ = 0.0;
    double NK = 0.0;
    Mat3 bracket_M = Mat3::Zero();
    double bracket_N = 0.0;
    double bracket_NJ = 0.0;
    double bracket_NK = 0.0;
    Vec3 bracket_C = Vec3::Zero();
    double bracket_D = 0.0;
    Vec3 bracket_E = Vec3::Zero();
};

// One simulated path. Counters follow the inclusive convention: I_n, J_n,
// K_n sum the sign processes from time 0, so I_0 = 1 at the white origin.
// J and K stay 0 for ice. class_visits[c] counts steps taken *from* class
// index c (these drive the bracket reconstruction).
struct WalkRecord {
    LatticeKind kind = LatticeKind::Ice1h;
    std::vector<LatticeState> states;  // trajectory mode only: states[0..n]
    LatticeState final_state;
    Vec3 S = Vec3::Zero();
    std::int64_t I = 0;
    std::int64_t J = 0;
    std::int64_t K = 0;
    std::int64_t steps = 0;
    MartingaleLedger ledger;
    std::array<std::int64_t, 4> class_visits{};
    RngSpec rng;
};

// Monte-Carlo summary of a batch of independent replicates of fixed
// length n. cov_scaled is the unbiased empirical covariance of S_n/sqrt(n)
// (equivalently of (S_n - mean)/sqrt(n)); skewness/kurtosis are the
// standardized per-coordinate central moments of S_n across replicates
// (reported as 0 when a coordinate is exactly constant); counter_means
// holds the averages of I_n/n, J_n/n, K_n/n.
struct BatchStatistics {
    std::int64_t replicates = 0;
    std::int64_t n = 0;
    Vec3 mean_S = Vec3::Zero();
    Mat3 cov_scaled = Mat3::Zero();
    Vec3 skewness = Vec3::Zero();
    Vec3 kurtosis = Vec3::Zero();
    Vec3 counter_means = Vec3::Zero();
};

namespace detail {

// Flattened per-class sampling law: cumulative probabilities in the fixed
// atom order (Up, Down, H0, H1, H2), displacement and integer-state deltas
// per atom, and the brute-force conditional moments that feed the ledger.
struct ClassLaw {
    int atom_count = 0;
    double cdf[5] = {};
    double dx[5] = {}, dy[5] = {}, dz[5] = {};
    std::int8_t dk[5] = {}, dl[5] = {}, dn[5] = {};
    std::uint8_t next_idx[5] = {};
    MoveLabel move[5] = {};
    Vec3 mean = Vec3::Zero();
    double mean_si = 0.0, mean_sj = 0.0, mean_sk = 0.0;  // E[sign'|class]
    Mat3 cov = Mat3::Zero();                             // Var(xi|class)
    double var_sj = 0.0, var_sk = 0.0;                   // ice uses var of eps in var_sj
    Vec3 cov_C = Vec3::Zero();                           // Cov(xi, eps') / Cov(xi, j')
    Vec3 cov_E = Vec3::Zero();                           // Cov(xi, k')
    double cov_D = 0.0;                                  // Cov(j', k')
};

struct SamplerTables {
    LatticeKind kind = LatticeKind::Ice1h;
    int class_count = 0;
    std::array<ClassLaw, 4> laws;
};

SamplerTables build_sampler_tables(const TransitionTable& table);

}  // namespace detail

// Samples one move from `state` by inverse-CDF over the fixed atom order;
// returns the successor state and the chosen atom. Convenience wrapper for
// tests and tools; long runs should use Simulation, which avoids
// rebuilding the per-class law tables.
std::pair<LatticeState, IncrementAtom> step(const LatticeState& state,
                                            const TransitionTable& table, PhiloxStream& rng);

// Incremental simulation driver: advance() may be called repeatedly, and
// record() snapshots the walk (used for dyadic LLN checkpoints).
class Simulation {
public:
    Simulation(const TransitionTable& table, RngSpec rng, SimMode mode = SimMode::Summary,
               std::int64_t trajectory_cap = kDefaultTrajectoryCap);

    void advance(std::int64_t steps);
    std::int64_t steps() const { return steps_; }
    Vec3 S() const;
    std::int64_t counter_I() const { return I_; }
    std::int64_t counter_J() const { return J_; }
    std::int64_t counter_K() const { return K_; }

    WalkRecord record() const;  // copies the trajectory buffer if present
    WalkRecord finish();        // moves the trajectory buffer out

private:
    template <LatticeKind Kind>
    void advance_impl(std::int64_t steps);
    void fill_record(WalkRecord& out) const;

    detail::SamplerTables tables_;
    GeometryParams geometry_;
    double p_ = 0.0;
    SimMode mode_;
    std::int64_t trajectory_cap_;
    RngSpec spec_;
    PhiloxStream rng_;

    std::int64_t cell_k_ = 0, cell_l_ = 0, sheet_n_ = 0;
    int idx_ = 0;  // current class index
    std::int64_t steps_ = 0;
    std::int64_t I_ = 0, J_ = 0, K_ = 0;
    std::array<std::int64_t, 4> visits_{};
    KahanVec3 S_acc_, M_acc_, R_acc_;
    KahanScalar N_acc_, NJ_acc_, NK_acc_;
    std::vector<LatticeState> states_;
};

// Runs one walk of n >= 0 steps from the origin.
WalkRecord simulate(const TransitionTable& table, std::int64_t n, RngSpec rng,
                    SimMode mode = SimMode::Summary,
                    std::int64_t trajectory_cap = kDefaultTrajectoryCap);

// Runs `replicates` (>= 2) independent summary walks on streams
// base_rng.stream_id + 0 .. + replicates-1, optionally across threads.
// Replicate results land in slots indexed by replicate and are reduced
// sequentially afterwards, so any thread count gives bit-identical output.
BatchStatistics run_batch(const TransitionTable& table, std::int64_t n, std::int64_t replicates,
                          RngSpec base_rng, int threads = 0);

}  // namespace crystalwalk
