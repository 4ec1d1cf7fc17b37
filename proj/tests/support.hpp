#pragma once

// Shared test utilities and independent oracles. Everything here is
// deliberately written against the raw math (series, quadrature-free RK,
// direct arithmetic) rather than the library implementations it checks.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "attbound/dynamics.hpp"
#include "attbound/types.hpp"

namespace testsupport {

using attbound::AttitudeState;
using attbound::InertiaParams;
using attbound::Mat3;
using attbound::Mat6;
using attbound::PotentialModel;
using attbound::Vec3;
using attbound::Vec6;

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline double normal01(std::mt19937_64& rng) {
    const double u1 = std::max(uniform01(rng), 0x1.0p-53);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Vec3 random_vec3(std::mt19937_64& rng, double scale = 1.0) {
    return scale * Vec3(normal01(rng), normal01(rng), normal01(rng));
}

inline Vec3 random_unit_vec3(std::mt19937_64& rng) {
    Vec3 v;
    do {
        v = random_vec3(rng);
    } while (v.norm() < 1e-6);
    return v.normalized();
}

// Uniform rotation from three uniform variates (subgroup algorithm): a
// uniform planar rotation about z pushed around the sphere by a Householder
// reflection through a uniformly distributed axis.
inline Mat3 random_rotation(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double u3 = uniform01(rng);

    const double a = 2.0 * M_PI * u1;
    Mat3 rz;
    rz << std::cos(a), -std::sin(a), 0.0,
          std::sin(a), std::cos(a), 0.0,
          0.0, 0.0, 1.0;

    const double b = 2.0 * M_PI * u2;
    const Vec3 v(std::cos(b) * std::sqrt(u3), std::sin(b) * std::sqrt(u3), std::sqrt(1.0 - u3));
    return (2.0 * v * v.transpose() - Mat3::Identity()) * rz;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double ridge = 1e-3) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = normal01(rng);
        }
    }
    Eigen::MatrixXd out = a * a.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
    return 0.5 * (out + out.transpose());
}

inline Mat3 rot_z(double angle) {
    Mat3 r;
    r << std::cos(angle), -std::sin(angle), 0.0,
         std::sin(angle), std::cos(angle), 0.0,
         0.0, 0.0, 1.0;
    return r;
}

// Random unit reference directions, pairwise separated and jointly well
// conditioned (non-coplanar for count >= 3), with weights in [0.5, 2].
inline std::pair<Eigen::Matrix3Xd, Eigen::VectorXd> random_directions(std::mt19937_64& rng,
                                                                      int count) {
    Eigen::Matrix3Xd dirs(3, count);
    while (true) {
        bool separated = true;
        for (int i = 0; i < count && separated; ++i) {
            dirs.col(i) = random_unit_vec3(rng);
            for (int j = 0; j < i; ++j) {
                if (std::abs(dirs.col(i).dot(dirs.col(j))) > 0.9) {
                    separated = false;
                    break;
                }
            }
        }
        if (!separated) continue;
        if (count < 3) break;
        const Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(dirs);
        if (svd.singularValues()(2) > 0.3) break;
    }
    Eigen::VectorXd weights(count);
    for (int i = 0; i < count; ++i) weights[i] = uniform(rng, 0.5, 2.0);
    return {dirs, weights};
}

inline Mat3 skew_oracle(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

// Truncated matrix-exponential series, the independent oracle for exp_so3.
inline Mat3 matrix_exp_series(const Mat3& a, int terms = 30) {
    Mat3 sum = Mat3::Identity();
    Mat3 power = Mat3::Identity();
    for (int k = 1; k <= terms; ++k) {
        power = (power * a).eval() / static_cast<double>(k);
        sum += power;
    }
    return sum;
}

// Nearest rotation (polar factor), used to read attitudes out of the
// off-manifold RK reference solution.
inline Mat3 nearest_rotation(const Mat3& m) {
    const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        r = svd.matrixU() * Eigen::DiagonalMatrix<double, 3>(1.0, 1.0, -1.0) *
            svd.matrixV().transpose();
    }
    return r;
}

// Geodesic attitude distance through an independent quaternion-free route:
// acos of the clamped trace identity.
inline double geodesic_distance(const Mat3& a, const Mat3& b) {
    const double c = std::clamp(0.5 * ((a.transpose() * b).trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

// Adaptive Dormand-Prince 4(5) integration of the continuous rigid-body
// equations Cdot = C S(w), J wdot = M(C) - w x J w. Reference oracle for
// the discrete integrator; tolerances default to 1e-12.
inline AttitudeState integrate_reference(const AttitudeState& initial,
                                         const InertiaParams& inertia, const PotentialModel& pot,
                                         double t_final, double tol = 1e-12) {
    using Vec12 = Eigen::Matrix<double, 12, 1>;
    const auto pack = [](const Mat3& c, const Vec3& w) {
        Vec12 y;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) y[3 * i + j] = c(i, j);
        }
        y.tail<3>() = w;
        return y;
    };
    const auto unpack_c = [](const Vec12& y) {
        Mat3 c;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) c(i, j) = y[3 * i + j];
        }
        return c;
    };

    const Mat3 j_inv = inertia.inertia.inverse();
    const auto deriv = [&](const Vec12& y) {
        const Mat3 c = unpack_c(y);
        const Vec3 w = y.tail<3>();
        const Mat3 grad = pot.potential_gradient(c);
        Vec3 moment = Vec3::Zero();
        for (int i = 0; i < 3; ++i) {
            moment += c.row(i).transpose().cross(grad.row(i).transpose());
        }
        Vec12 dy;
        const Mat3 cdot = c * skew_oracle(w);
        for (int i = 0; i < 3; ++i) {
            for (int jj = 0; jj < 3; ++jj) dy[3 * i + jj] = cdot(i, jj);
        }
        dy.tail<3>() = j_inv * (moment - w.cross(inertia.inertia * w));
        return dy;
    };

    // Dormand-Prince tableau.
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 5179.0 / 57600.0, e3 = 7571.0 / 16695.0, e4 = 393.0 / 640.0,
                     e5 = -92097.0 / 339200.0, e6 = 187.0 / 2100.0, e7 = 1.0 / 40.0;

    Vec12 y = pack(initial.attitude, initial.omega);
    double t = 0.0;
    double h = std::min(1e-3, t_final);
    while (t < t_final) {
        h = std::min(h, t_final - t);
        const Vec12 k1 = deriv(y);
        const Vec12 k2 = deriv(y + h * a21 * k1);
        const Vec12 k3 = deriv(y + h * (a31 * k1 + a32 * k2));
        const Vec12 k4 = deriv(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec12 k5 = deriv(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec12 k6 = deriv(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vec12 y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec12 k7 = deriv(y5);
        const Vec12 y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double d = (y5[i] - y4[i]) / sc;
            err += d * d;
        }
        err = std::sqrt(err / 12.0);

        if (err <= 1.0) {
            t += h;
            y = y5;
        }
        const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h *= factor;
        h = std::max(h, 1e-12);
    }

    AttitudeState out;
    out.attitude = unpack_c(y);
    out.omega = y.tail<3>();
    return out;
}

}  // namespace testsupport
