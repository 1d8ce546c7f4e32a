#include "crystalwalk/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace crystalwalk {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// cos/sin of (2*pi*jp/3) for jp = 0,1,2, written out so the zeros and
// halves are exact.
constexpr double kCos[3] = {1.0, -0.5, -0.5};
const double kSin[3] = {0.0, kSqrt3 / 2.0, -kSqrt3 / 2.0};

// Integer (cell_k, cell_l) deltas of the three horizontal bonds, by color.
// Derived once from the vertex-set parametrization and locked in by the
// embedding-consistency tests: e.g. H1 from a white site at (k, l) lands on
// the black site at (k-1, l+1).
constexpr std::int64_t kDeltaK[2][3] = {{0, -1, -1}, {0, +1, +1}};
constexpr std::int64_t kDeltaL[2][3] = {{0, +1, 0}, {0, -1, 0}};

std::int64_t round_to_int(double x) { return static_cast<std::int64_t>(std::llround(x)); }

}  // namespace

Vec3 position(const LatticeState& s, const GeometryParams& g, LatticeKind kind) {
    const double x_cell = 1.5 * static_cast<double>(s.cell_k);
    const double y = g.a * kSqrt3 * (0.5 * static_cast<double>(s.cell_k) +
                                     static_cast<double>(s.cell_l));
    if (kind == LatticeKind::Ice1h) {
        return Vec3(g.a * (static_cast<double>(s.cls.i) + x_cell), y,
                    g.h * static_cast<double>(s.sheet_n));
    }
    // Graphite: the j = 1 classes are shifted horizontally by -a (white)
    // or +a (black); altitude parity is encoded by i != j.
    const double offset = s.cls.j ? (s.cls.i ? 1.0 : -1.0) : 0.0;
    const double parity = (s.cls.i != s.cls.j) ? 1.0 : 0.0;
    return Vec3(g.a * (offset + x_cell), y,
                g.h * (2.0 * static_cast<double>(s.sheet_n) + parity));
}

Vec3 horizontal_displacement(const GeometryParams& g, int color_i, int jp) {
    const double sign = color_i ? -1.0 : 1.0;
    return Vec3(sign * g.a * kCos[jp], sign * g.a * kSin[jp], 0.0);
}

VertexClass classify(const LatticeState& state, LatticeKind kind) {
    const GeometryParams unit{1.0, 1.0};
    const LatticeState rebuilt = state_from_position(position(state, unit, kind), unit, kind);
    if (!(rebuilt == state)) {
        throw LatticeError("lattice state inconsistent with its embedding");
    }
    return state.cls;
}

LatticeState state_from_position(const Vec3& point, const GeometryParams& g, LatticeKind kind) {
    const double tol = 1e-9;
    const auto near_int = [tol](double x, std::int64_t& out) {
        const std::int64_t r = round_to_int(x);
        if (std::abs(x - static_cast<double>(r)) > tol * (1.0 + std::abs(x))) return false;
        out = r;
        return true;
    };

    LatticeState s;
    std::int64_t two_x, level, ell;
    if (!near_int(2.0 * point[0] / g.a, two_x) || !near_int(point[2] / g.h, level)) {
        throw LatticeError("point is not a lattice vertex");
    }
    // 2x/a = 2*offset + 3k, so the residue mod 3 identifies the class column.
    const int residue = static_cast<int>(((two_x % 3) + 3) % 3);

    if (kind == LatticeKind::Ice1h) {
        if (residue == 1) throw LatticeError("point is not a lattice vertex");
        s.cls.i = (residue == 2) ? 1 : 0;
        s.cell_k = (two_x - 2 * static_cast<std::int64_t>(s.cls.i)) / 3;
        s.sheet_n = level;
    } else {
        const int parity = static_cast<int>(((level % 2) + 2) % 2);
        std::int64_t offset;  // in units of a: -1, 0, +1
        if (residue == 0) {
            s.cls = {static_cast<std::uint8_t>(parity), 0};
            offset = 0;
        } else if (residue == 1) {
            if (parity != 1) throw LatticeError("point is not a lattice vertex");
            s.cls = {0, 1};
            offset = -1;
        } else {
            if (parity != 0) throw LatticeError("point is not a lattice vertex");
            s.cls = {1, 1};
            offset = +1;
        }
        s.cell_k = (two_x - 2 * offset) / 3;
        s.sheet_n = (level - ((s.cls.i != s.cls.j) ? 1 : 0)) / 2;
    }
    if (!near_int(point[1] / (g.a * kSqrt3) - 0.5 * static_cast<double>(s.cell_k), ell)) {
        throw LatticeError("point is not a lattice vertex");
    }
    s.cell_l = ell;

    const Vec3 rebuilt = position(s, g, kind);
    const double scale = std::abs(g.a) + std::abs(g.h);
    if ((rebuilt - point).cwiseAbs().maxCoeff() > tol * scale) {
        throw LatticeError("point is not a lattice vertex");
    }
    return s;
}

LatticeState apply_move(const LatticeState& state, MoveLabel move, LatticeKind kind) {
    LatticeState s = state;
    if (is_vertical(move)) {
        if (kind == LatticeKind::Ice1h) {
            s.sheet_n += (move == MoveLabel::Up) ? 1 : -1;
            return s;
        }
        if (state.cls.j != 0) {
            throw LatticeError("vertical move from a graphite site without vertical neighbors");
        }
        // V_{0,0} <-> V_{1,0} pairs across half-sheets: the sheet index
        // changes only when the jump crosses a cell boundary.
        if (move == MoveLabel::Up) {
            if (state.cls.i == 1) s.sheet_n += 1;
        } else {
            if (state.cls.i == 0) s.sheet_n -= 1;
        }
        s.cls.i ^= 1;
        return s;
    }
    const int jp = horizontal_index(move);
    s.cell_k += kDeltaK[state.cls.i][jp];
    s.cell_l += kDeltaL[state.cls.i][jp];
    s.cls.i ^= 1;
    if (kind == LatticeKind::Graphite2h) s.cls.j ^= 1;
    return s;
}

MoveLabel inverse_move(MoveLabel move) {
    switch (move) {
        case MoveLabel::Up:
            return MoveLabel::Down;
        case MoveLabel::Down:
            return MoveLabel::Up;
        default:
            return move;
    }
}

}  // namespace crystalwalk
