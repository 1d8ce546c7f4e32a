#pragma once

#include <cstdint>

#include "crystalwalk/errors.hpp"
#include "crystalwalk/linalg.hpp"

namespace crystalwalk {

// Bond geometry: a = intra-sheet bond length, h = inter-sheet spacing.
struct GeometryParams {
    double a = 1.0;
    double h = 1.0;
};

enum class LatticeKind { Ice1h, Graphite2h };

// Local-geometry label of a vertex. i is the horizontal color
// (0 = white, 1 = black). j exists only on the graphite lattice and marks
// whether the site lacks vertical neighbors (j = 1) or has them (j = 0).
// Ice ignores j entirely.
struct VertexClass {
    std::uint8_t i = 0;
    std::uint8_t j = 0;

    friend bool operator==(const VertexClass&, const VertexClass&) = default;
};

// +-1 sign encodings used by the martingale bookkeeping.
inline int sign_i(VertexClass c) { return 1 - 2 * static_cast<int>(c.i); }
inline int sign_j(VertexClass c) { return 1 - 2 * static_cast<int>(c.j); }
// Altitude parity; always derived, never stored.
inline int sign_k(VertexClass c) { return sign_i(c) * sign_j(c); }

// Exact integer description of a vertex: unit-cell indices (cell_k, cell_l),
// sheet index sheet_n, and the class bits. Real coordinates are derived on
// demand by position(); no floating-point state is ever stored.
struct LatticeState {
    std::int64_t cell_k = 0;
    std::int64_t cell_l = 0;
    std::int64_t sheet_n = 0;
    VertexClass cls;

    friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

// Up/Down move vertically between sheets; H0/H1/H2 are the three horizontal
// bonds, indexed by the direction index j' of the transition kernel.
enum class MoveLabel : std::uint8_t { Up = 0, Down = 1, H0 = 2, H1 = 3, H2 = 4 };

inline bool is_vertical(MoveLabel m) { return m == MoveLabel::Up || m == MoveLabel::Down; }
inline int horizontal_index(MoveLabel m) { return static_cast<int>(m) - 2; }

// Real-space embedding of a state. Ice sheets sit at z = h*n; graphite
// pairs classes across sheets at z = h*(2n + [i != j]).
Vec3 position(const LatticeState& state, const GeometryParams& geometry, LatticeKind kind);

// Horizontal bond vector leaving a color-i site along direction index jp:
// (a*cos(2*pi*jp/3 + i*pi), a*sin(2*pi*jp/3 + i*pi), 0), evaluated from
// exact constants so that the zero components are exact.
Vec3 horizontal_displacement(const GeometryParams& geometry, int color_i, int jp);

// Returns the stored class after re-deriving it from the embedded
// coordinates as a consistency check; throws LatticeError on mismatch.
VertexClass classify(const LatticeState& state, LatticeKind kind);

// Inverse of position(): reconstructs the exact state from coordinates.
// Throws LatticeError if the point is not a lattice vertex (tolerance
// 1e-9 relative to the geometry scale).
LatticeState state_from_position(const Vec3& point, const GeometryParams& geometry,
                                 LatticeKind kind);

// Applies one move. Class transitions: ice H-moves flip i and vertical
// moves preserve it; graphite H-moves flip both i and j (preserving
// altitude parity), vertical moves flip i, keep j = 0 and flip parity.
// Throws LatticeError for Up/Down from a graphite j = 1 site.
LatticeState apply_move(const LatticeState& state, MoveLabel move, LatticeKind kind);

// The move that undoes `move` when applied from the image state:
// Up <-> Down, while each H-move reverses itself (the bond vector from the
// flipped color is the exact negation).
MoveLabel inverse_move(MoveLabel move);

}  // namespace crystalwalk
