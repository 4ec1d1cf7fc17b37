#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "attbound/dynamics.hpp"
#include "attbound/types.hpp"

namespace attbound {

/// Uncertainty ellipsoid { x : (x - center)^T P^{-1} (x - center) <= 1 }.
struct EllipsoidRn {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;  // P, symmetric positive definite

    int dim() const { return static_cast<int>(center.size()); }
};

bool contains(const EllipsoidRn& e, const Eigen::VectorXd& x);

/// tr(P): the sum of squared semi-principal axes.
double size(const EllipsoidRn& e);

/// Uncertainty ellipsoid on the attitude/angular-velocity state space,
/// induced from R^6 through exponential local coordinates at the center:
/// C = C_hat exp_so3(zeta), w = w_hat + dw, [zeta; dw] in E(0, P).
struct StateEllipsoid {
    AttitudeState center;
    Mat6 uncertainty;  // P, 6x6 SPD
};

/// Local coordinates of one state relative to another center.
struct StateDeviation {
    Vec3 rotation;     // zeta, radians
    Vec3 omega_delta;  // dw, rad/s

    Vec6 stacked() const {
        Vec6 x;
        x << rotation, omega_delta;
        return x;
    }
};

bool state_membership(const StateEllipsoid& se, const AttitudeState& s);

/// Scales the ellipsoid's semi-axes by `factor` (P -> factor^2 P).
StateEllipsoid inflate(const StateEllipsoid& se, double factor);

/// Trace-minimal ellipsoid containing the vector (Minkowski) sum of
/// zero-centered ellipsoids: P = (sum_i sqrt(tr P_i)) (sum_i P_i / sqrt(tr P_i)).
/// Summands with trace <= 1e-14 times the largest are dropped as
/// degenerate; an empty effective list throws.
Eigen::MatrixXd minimal_sum(const std::vector<Eigen::MatrixXd>& terms);

/// Deviation of the flow center as seen from the measured center:
/// zeta = log_so3(C_m^T C_f), dw = w_f - w_m.
StateDeviation center_difference(const AttitudeState& measured_center,
                                 const AttitudeState& flow_center);

struct FusionResult {
    Eigen::VectorXd center;  // x_hat
    Eigen::MatrixXd shape;   // P, symmetrized
    double q;  // trace-minimizing parameter; 0 marks the q -> 0 limit, where
               // the first ellipsoid alone is the minimal cover
};

/// Trace-minimal ellipsoid covering the intersection of two ellipsoids. For
/// a parameter q > 0,
///   L = P_a (P_a + q^{-1} P_b)^{-1},
///   beta = 1 + q - d^T P_a^{-1} L d,     d = center_b - center_a,
///   x = L d,  P = beta (I - L) P_a,
/// and q is chosen by a coarse log-space scan plus golden-section refinement
/// to minimize tr(P) over the range where beta > 0, unless `fixed_q`
/// supplies it directly. Throws EmptyIntersectionError when no admissible q
/// keeps beta positive.
FusionResult fuse_intersection(const EllipsoidRn& a, const EllipsoidRn& b,
                               std::optional<double> fixed_q = {});

enum class SampleMode { interior, boundary };

/// Deterministic samples from an ellipsoid: center + P^{1/2} u with u drawn
/// uniformly in (or, for boundary mode, on) the unit ball. The stream is a
/// pure function of the seed.
std::vector<Eigen::VectorXd> sample_in(const EllipsoidRn& e, int count, std::uint64_t seed,
                                       SampleMode mode = SampleMode::interior);

}  // namespace attbound
