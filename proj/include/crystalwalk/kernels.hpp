#pragma once

#include <array>
#include <vector>

#include "crystalwalk/lattice.hpp"

namespace crystalwalk {

// Complete parameter set of one walk model. p is the total vertical-jump
// probability, alpha the upward share of it. Horizontal rows hold the
// per-direction probabilities: ice_rows[i][jp] for ice, and
// graphite_rows[i][j][jp] for graphite. Normalization ties the rows to p:
// every ice row and every graphite j = 0 row sums to 1 - p, every graphite
// j = 1 row sums to 1 (those sites cannot jump vertically).
struct TransitionTable {
    LatticeKind kind = LatticeKind::Ice1h;
    double p = 0.0;
    double alpha = 0.5;
    std::array<std::array<double, 3>, 2> ice_rows{};
    std::array<std::array<std::array<double, 3>, 2>, 2> graphite_rows{};
    GeometryParams geometry;

    const std::array<double, 3>& row(VertexClass c) const {
        return kind == LatticeKind::Ice1h ? ice_rows[c.i] : graphite_rows[c.i][c.j];
    }
};

// Throws NormalizationError / RangeError if any invariant fails
// (tolerance 1e-12 on row sums). alpha must lie strictly inside (0,1);
// p = 0 and p = 1 are legitimate degenerate models.
void validate(const TransitionTable& table);

// Whether sites of this class may move vertically.
inline bool vertical_allowed(const TransitionTable& table, VertexClass c) {
    return table.kind == LatticeKind::Ice1h || c.j == 0;
}

// One support point of the one-step increment law.
struct IncrementAtom {
    MoveLabel move = MoveLabel::Up;
    Vec3 displacement = Vec3::Zero();
    double probability = 0.0;
    VertexClass class_after;
};

// Full support of the increment law from a site of class `c`, in the fixed
// order Up, Down, H0, H1, H2 with zero-probability atoms dropped. At most
// 5 atoms (exactly 3 for graphite j = 1 classes).
std::vector<IncrementAtom> increment_distribution(const TransitionTable& table, VertexClass c);

// Brute-force conditional moments of the increment given the current class,
// straight sums over the atoms. These are the oracle side checked against
// the closed-form class decompositions.
Vec3 conditional_mean(const TransitionTable& table, VertexClass c);
Mat3 conditional_second_moment(const TransitionTable& table, VertexClass c);

// All classes of a lattice, in canonical order (ice: V_0, V_1; graphite:
// V_00, V_10, V_01, V_11 -- index i + 2j).
std::vector<VertexClass> all_classes(LatticeKind kind);
int class_index(LatticeKind kind, VertexClass c);
const char* class_name(LatticeKind kind, VertexClass c);

}  // namespace crystalwalk
