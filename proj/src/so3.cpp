#include "attbound/so3.hpp"

#include <cmath>

namespace attbound {

namespace {

// sin(t)/t and (1-cos(t))/t^2 with 4th-order series below the branch point.
constexpr double kSmallAngle = 1e-6;

double sinc(double t) {
    if (std::abs(t) < kSmallAngle) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

double cosc(double t) {
    if (std::abs(t) < kSmallAngle) {
        const double t2 = t * t;
        return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    }
    return (1.0 - std::cos(t)) / (t * t);
}

Vec3 vee_unchecked(const Mat3& a) {
    return Vec3(a(2, 1), a(0, 2), a(1, 0));
}

}  // namespace

Mat3 hat(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

Vec3 vee(const Mat3& a, double tol) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a + a.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
        throw Error("vee: input is not skew-symmetric within tolerance");
    }
    const Mat3 skew = 0.5 * (a - a.transpose());
    return vee_unchecked(skew);
}

Mat3 exp_so3(const Vec3& f) {
    const double theta = f.norm();
    const Mat3 s = hat(f);
    return Mat3::Identity() + sinc(theta) * s + cosc(theta) * s * s;
}

Vec3 log_so3(const Mat3& c) {
    const Vec3 w = vee_unchecked(0.5 * (c - c.transpose()));  // sin(theta) * axis
    const double cos_theta = std::clamp(0.5 * (c.trace() - 1.0), -1.0, 1.0);
    const double sin_theta = std::min(w.norm(), 1.0);
    const double theta = std::atan2(sin_theta, cos_theta);

    if (theta < kSmallAngle) {
        const double t2 = theta * theta;
        return w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
    }
    if (M_PI - theta > 1e-4) {
        return w * (theta / sin_theta);
    }

    // Near pi, sin(theta) loses the axis: recover it from the symmetric part,
    // (C + C^T)/2 = cos(theta) I + (1 - cos(theta)) u u^T.
    const double one_minus_cos = 1.0 - cos_theta;
    int imax = 0;
    c.diagonal().maxCoeff(&imax);
    Vec3 u = Vec3::Zero();
    u[imax] = std::sqrt(std::max(0.0, (c(imax, imax) - cos_theta) / one_minus_cos));
    for (int j = 0; j < 3; ++j) {
        if (j != imax) {
            u[j] = 0.5 * (c(imax, j) + c(j, imax)) / (one_minus_cos * u[imax]);
        }
    }
    u.normalize();

    if (w.norm() > 1e-12) {
        if (w.dot(u) < 0.0) u = -u;
    } else {
        // Angle is pi for all practical purposes; pick the axis whose first
        // nonzero component is positive.
        for (int j = 0; j < 3; ++j) {
            if (std::abs(u[j]) > 1e-12) {
                if (u[j] < 0.0) u = -u;
                break;
            }
        }
    }
    return theta * u;
}

bool is_rotation(const Mat3& c, double tol) {
    if (!c.allFinite()) return false;
    const double ortho = (c.transpose() * c - Mat3::Identity()).norm();
    return ortho <= tol && c.determinant() > 0.0;
}

void require_rotation(const Mat3& c, const std::string& label, double tol) {
    if (!is_rotation(c, tol)) {
        throw DegenerateGeometryError(label + " is not a rotation matrix");
    }
}

bool is_spd(const Eigen::MatrixXd& m, double sym_tol) {
    if (m.rows() != m.cols() || !m.allFinite()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff() > 0.0;
}

namespace {

Eigen::MatrixXd spd_power(const Eigen::MatrixXd& m, double exponent) {
    if (m.rows() != m.cols()) {
        throw Error("spd_sqrt: matrix is not square");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error("spd_sqrt: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    const Eigen::VectorXd& lam = es.eigenvalues();
    if (lam.minCoeff() <= 1e-14 * lam.maxCoeff()) {
        throw Error("spd_sqrt: matrix is not positive definite");
    }
    const Eigen::VectorXd powered =
        lam.array().pow(exponent).matrix();
    Eigen::MatrixXd out =
        es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

}  // namespace

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
    return spd_power(m, 0.5);
}

Eigen::MatrixXd spd_inv_sqrt(const Eigen::MatrixXd& m) {
    return spd_power(m, -0.5);
}

QrFactors qr_positive(const Mat3& l) {
    const double det = l.determinant();
    const double norm = l.norm();
    if (std::abs(det) <= 1e-12 * norm * norm * norm) {
        throw DegenerateGeometryError("degenerate direction geometry: profile matrix is singular");
    }

    const Eigen::HouseholderQR<Mat3> qr(l);
    Mat3 q = qr.householderQ();
    Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();

    for (int i = 0; i < 3; ++i) {
        if (r(i, i) < 0.0) {
            q.col(i) = -q.col(i);
            r.row(i) = -r.row(i);
        }
    }
    if (q.determinant() < 0.0) {
        q.col(2) = -q.col(2);
        r.row(2) = -r.row(2);
    }
    return QrFactors{q, r};
}

SpdProductEigen diagonalize_spd_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error("diagonalize_spd_product: size mismatch");
    }
    const Eigen::MatrixXd a_half = spd_sqrt(a);
    const Eigen::MatrixXd a_inv_half = spd_inv_sqrt(a);

    Eigen::MatrixXd middle = a_half * b * a_half;
    middle = 0.5 * (middle + middle.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(middle);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw Error("diagonalize_spd_product: product has a non-positive eigenvalue");
    }

    SpdProductEigen out;
    out.v = es.eigenvectors().transpose() * a_inv_half;
    out.eigenvalues = es.eigenvalues();
    return out;
}

}  // namespace attbound
