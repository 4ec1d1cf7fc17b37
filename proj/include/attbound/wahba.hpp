#pragma once

#include <utility>

#include "attbound/types.hpp"

namespace attbound {

/// Reference directions in the inertial frame with per-direction weights.
struct DirectionSet {
    Eigen::Matrix3Xd directions;  // unit columns e^i
    Eigen::VectorXd weights;      // positive, one per column

    int count() const { return static_cast<int>(directions.cols()); }

    /// Enforces unit columns (1e-12), positive weights, pairwise
    /// non-parallel columns and a minimum count.
    void validate(int min_count = 3) const;
};

/// Measured directions in the body frame, one unit column per reference.
struct BodyObservations {
    Eigen::Matrix3Xd directions;

    int count() const { return static_cast<int>(directions.cols()); }
    void validate() const;
};

/// Attitude profile L = E W B^T summarizing a weighted observation set.
struct AttitudeProfile {
    Mat3 l;
};

/// Weighted least-squares attitude cost
///   1/2 tr((E - C B)^T W (E - C B)).
double wahba_cost(const Mat3& c_hat, const DirectionSet& dirs, const BodyObservations& obs);

AttitudeProfile build_profile(const DirectionSet& dirs, const BodyObservations& obs);

/// Globally optimal attitude for the given profile, computed from the
/// sign-normalized QR factors of L as C = Q (R R^T)^{-1/2} Q^T L.
/// Requires L invertible with positive determinant and singular values
/// within a 1e8 spread; otherwise throws DegenerateGeometryError.
Mat3 solve_wahba(const AttitudeProfile& profile);

/// First-order optimality defect L^T C - C^T L (skew-symmetric); its
/// Frobenius norm vanishes at the optimum.
Mat3 optimality_residual(const Mat3& c_hat, const AttitudeProfile& profile);

/// Extends a two-direction problem with the normalized cross products
/// e^1 x e^2 and b^1 x b^2 as a synthetic third direction, weighted by
/// min(w_1, w_2). Throws DegenerateGeometryError for parallel inputs.
std::pair<DirectionSet, BodyObservations> augment_pair(const DirectionSet& dirs,
                                                       const BodyObservations& obs);

}  // namespace attbound
