#include "crystalwalk/kernels.hpp"

#include <cmath>
#include <string>

namespace crystalwalk {

namespace {

constexpr double kRowTol = 1e-12;

void check_probability(double value, const std::string& what) {
    if (!(value >= 0.0 && value <= 1.0) || std::isnan(value)) {
        throw RangeError(what + " = " + std::to_string(value) + " outside [0,1]");
    }
}

void check_row(const std::array<double, 3>& row, double expected_sum, const std::string& name) {
    double sum = 0.0;
    for (int jp = 0; jp < 3; ++jp) {
        check_probability(row[jp], name + "[" + std::to_string(jp) + "]");
        sum += row[jp];
    }
    const double residual = sum - expected_sum;
    if (std::abs(residual) > kRowTol) {
        throw NormalizationError(name, residual);
    }
}

}  // namespace

void validate(const TransitionTable& table) {
    if (!(table.geometry.a > 0.0) || !(table.geometry.h > 0.0)) {
        throw RangeError("geometry requires a > 0 and h > 0");
    }
    check_probability(table.p, "p");
    if (!(table.alpha > 0.0 && table.alpha < 1.0)) {
        throw RangeError("alpha = " + std::to_string(table.alpha) +
                         " outside the open interval (0,1)");
    }
    if (table.kind == LatticeKind::Ice1h) {
        for (int i = 0; i < 2; ++i) {
            check_row(table.ice_rows[i], 1.0 - table.p, "(i=" + std::to_string(i) + ")");
        }
    } else {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double expected = (j == 0) ? 1.0 - table.p : 1.0;
                check_row(table.graphite_rows[i][j], expected,
                          "(i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")");
            }
        }
    }
}

std::vector<IncrementAtom> increment_distribution(const TransitionTable& table, VertexClass c) {
    std::vector<IncrementAtom> atoms;
    atoms.reserve(5);
    const GeometryParams& g = table.geometry;
    LatticeState site;
    site.cls = c;

    const auto push = [&](MoveLabel move, const Vec3& disp, double prob) {
        if (prob <= 0.0) return;
        IncrementAtom atom;
        atom.move = move;
        atom.displacement = disp;
        atom.probability = prob;
        atom.class_after = apply_move(site, move, table.kind).cls;
        atoms.push_back(atom);
    };

    if (vertical_allowed(table, c)) {
        push(MoveLabel::Up, Vec3(0, 0, g.h), table.alpha * table.p);
        push(MoveLabel::Down, Vec3(0, 0, -g.h), (1.0 - table.alpha) * table.p);
    }
    const auto& row = table.row(c);
    for (int jp = 0; jp < 3; ++jp) {
        push(static_cast<MoveLabel>(static_cast<int>(MoveLabel::H0) + jp),
             horizontal_displacement(g, c.i, jp), row[jp]);
    }
    return atoms;
}

Vec3 conditional_mean(const TransitionTable& table, VertexClass c) {
    Vec3 mean = Vec3::Zero();
    for (const IncrementAtom& atom : increment_distribution(table, c)) {
        mean += atom.probability * atom.displacement;
    }
    return mean;
}

Mat3 conditional_second_moment(const TransitionTable& table, VertexClass c) {
    Mat3 second = Mat3::Zero();
    for (const IncrementAtom& atom : increment_distribution(table, c)) {
        second += atom.probability * (atom.displacement * atom.displacement.transpose());
    }
    return second;
}

std::vector<VertexClass> all_classes(LatticeKind kind) {
    if (kind == LatticeKind::Ice1h) {
        return {VertexClass{0, 0}, VertexClass{1, 0}};
    }
    return {VertexClass{0, 0}, VertexClass{1, 0}, VertexClass{0, 1}, VertexClass{1, 1}};
}

int class_index(LatticeKind kind, VertexClass c) {
    return kind == LatticeKind::Ice1h ? c.i : c.i + 2 * c.j;
}

const char* class_name(LatticeKind kind, VertexClass c) {
    if (kind == LatticeKind::Ice1h) {
        return c.i ? "V_1" : "V_0";
    }
    static const char* names[4] = {"V_00", "V_10", "V_01", "V_11"};
    return names[c.i + 2 * c.j];
}

}  // namespace crystalwalk
