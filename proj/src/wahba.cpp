#include "attbound/wahba.hpp"

#include <cmath>

#include "attbound/so3.hpp"

namespace attbound {

void DirectionSet::validate(int min_count) const {
    const int m = count();
    if (m < min_count) {
        throw DegenerateGeometryError("direction set needs at least " +
                                      std::to_string(min_count) + " directions, got " +
                                      std::to_string(m));
    }
    if (weights.size() != m) {
        throw Error("direction set has " + std::to_string(m) + " directions but " +
                    std::to_string(weights.size()) + " weights");
    }
    for (int i = 0; i < m; ++i) {
        if (std::abs(directions.col(i).norm() - 1.0) > 1e-12) {
            throw Error("reference direction " + std::to_string(i) + " is not unit length");
        }
        if (!(weights[i] > 0.0)) {
            throw Error("weight " + std::to_string(i) + " is not positive");
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (std::abs(directions.col(i).dot(directions.col(j))) >= 1.0 - 1e-9) {
                throw DegenerateGeometryError("degenerate direction geometry: directions " +
                                              std::to_string(i) + " and " + std::to_string(j) +
                                              " are parallel");
            }
        }
    }
}

void BodyObservations::validate() const {
    for (int i = 0; i < count(); ++i) {
        if (std::abs(directions.col(i).norm() - 1.0) > 1e-12) {
            throw Error("body observation " + std::to_string(i) + " is not unit length");
        }
    }
}

double wahba_cost(const Mat3& c_hat, const DirectionSet& dirs, const BodyObservations& obs) {
    if (dirs.count() != obs.count()) {
        throw Error("direction/observation count mismatch");
    }
    double cost = 0.0;
    for (int i = 0; i < dirs.count(); ++i) {
        const Vec3 err = dirs.directions.col(i) - c_hat * obs.directions.col(i);
        cost += 0.5 * dirs.weights[i] * err.squaredNorm();
    }
    return cost;
}

AttitudeProfile build_profile(const DirectionSet& dirs, const BodyObservations& obs) {
    if (dirs.count() != obs.count()) {
        throw Error("direction/observation count mismatch");
    }
    return AttitudeProfile{dirs.directions * dirs.weights.asDiagonal() *
                           obs.directions.transpose()};
}

Mat3 solve_wahba(const AttitudeProfile& profile) {
    const Mat3& l = profile.l;
    const Eigen::JacobiSVD<Mat3> svd(l);
    const double sigma_max = svd.singularValues()(0);
    const double sigma_min = svd.singularValues()(2);
    if (sigma_min < 1e-8 * sigma_max) {
        throw DegenerateGeometryError(
            "degenerate direction geometry: profile matrix is near singular");
    }
    if (l.determinant() <= 0.0) {
        throw DegenerateGeometryError(
            "degenerate direction geometry: profile matrix has non-positive determinant");
    }

    const QrFactors qr = qr_positive(l);
    const Mat3 s = qr.q * spd_inv_sqrt(qr.r * qr.r.transpose()) * qr.q.transpose();
    const Mat3 c_hat = s * l;
    require_rotation(c_hat, "attitude estimate");
    return c_hat;
}

Mat3 optimality_residual(const Mat3& c_hat, const AttitudeProfile& profile) {
    return profile.l.transpose() * c_hat - c_hat.transpose() * profile.l;
}

std::pair<DirectionSet, BodyObservations> augment_pair(const DirectionSet& dirs,
                                                       const BodyObservations& obs) {
    if (dirs.count() != 2 || obs.count() != 2) {
        throw Error("augment_pair expects exactly two directions");
    }
    dirs.validate(2);
    obs.validate();

    const Vec3 e_cross = dirs.directions.col(0).cross(dirs.directions.col(1));
    const Vec3 b_cross = obs.directions.col(0).cross(obs.directions.col(1));
    if (e_cross.norm() < 1e-9 || b_cross.norm() < 1e-9) {
        throw DegenerateGeometryError("degenerate direction geometry: pair is parallel");
    }

    DirectionSet out_dirs;
    out_dirs.directions.resize(3, 3);
    out_dirs.directions.leftCols(2) = dirs.directions;
    out_dirs.directions.col(2) = e_cross.normalized();
    out_dirs.weights.resize(3);
    out_dirs.weights.head(2) = dirs.weights;
    out_dirs.weights[2] = std::min(dirs.weights[0], dirs.weights[1]);

    BodyObservations out_obs;
    out_obs.directions.resize(3, 3);
    out_obs.directions.leftCols(2) = obs.directions;
    out_obs.directions.col(2) = b_cross.normalized();

    out_dirs.validate(3);
    return {out_dirs, out_obs};
}

}  // namespace attbound
