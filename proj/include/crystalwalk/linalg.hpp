#pragma once

#include <Eigen/Dense>

namespace crystalwalk {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Kahan-compensated scalar accumulator. Used for every floating-point
// quantity accumulated over long walks so that pathwise identities stay
// near machine precision after 10^6+ steps.
struct KahanScalar {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
    void reset() { sum = comp = 0.0; }
};

// Three compensated lanes, one per coordinate.
struct KahanVec3 {
    KahanScalar lane[3];

    void add(const Vec3& v) {
        lane[0].add(v[0]);
        lane[1].add(v[1]);
        lane[2].add(v[2]);
    }
    void add(double x, double y, double z) {
        lane[0].add(x);
        lane[1].add(y);
        lane[2].add(z);
    }
    Vec3 value() const { return Vec3(lane[0].value(), lane[1].value(), lane[2].value()); }
    void reset() {
        lane[0].reset();
        lane[1].reset();
        lane[2].reset();
    }
};

inline double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace crystalwalk
