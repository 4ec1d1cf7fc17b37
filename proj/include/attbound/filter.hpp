#pragma once

#include <optional>
#include <vector>

#include "attbound/dynamics.hpp"
#include "attbound/ellipsoid.hpp"
#include "attbound/types.hpp"
#include "attbound/wahba.hpp"

namespace attbound {

/// One measurement instant: body-frame direction observations with their
/// per-direction rotation-error bounds, plus a directly measured angular
/// velocity with its additive-error bound.
struct MeasurementBundle {
    DirectionSet dirs;                   // E, W
    BodyObservations obs;                // measured body directions
    Vec3 measured_omega;                 // rad/s
    std::vector<Mat3> direction_bounds;  // S^i, rad^2, one per direction
    Mat3 omega_bound;                    // T, (rad/s)^2

    void validate() const;
};

/// Flow-update output: the propagated ellipsoid and the accumulated
/// linearization A_f over the l steps (P_f = A_f P A_f^T).
struct FlowResult {
    StateEllipsoid predicted;
    Mat6 linearization;
};

/// All quantities entering the contraction condition
///   ||A_f||_F < sqrt(c (q + lambda_min) / (6 chi (1 + q))),
/// chi = sqrt(6 + 30 kappa), kappa the condition number of the measurement
/// uncertainty, lambda_min the smallest eigenvalue of P_m^{-1} P_f.
struct ConvergenceReport {
    double flow_norm;         // ||A_f||_F
    double bound;             // right-hand side of the inequality
    double lambda_min;
    double condition_number;  // kappa(P_m)
    double chi;
    double contraction_c;
    double q;
    bool satisfied;
};

/// Jacobian of the one-step discrete flow in deviation coordinates
/// [zeta; dw], by central finite differences of the exact integrator with
/// perturbations C exp_so3(+-eps e_j), w +- eps e_j and deviations read back
/// against the propagated center.
Mat6 flow_linearization(const AttitudeState& center, const InertiaParams& inertia,
                        const PotentialModel& pot, double eps = 1e-6);

/// Propagates the prior ellipsoid over `steps` integrator steps: the center
/// through the exact discrete flow, the uncertainty through the per-step
/// linearizations composed in step order.
FlowResult flow_update(const StateEllipsoid& prior, int steps, const InertiaParams& inertia,
                       const PotentialModel& pot);

/// Coefficient matrices A^i mapping per-direction measurement errors to the
/// first-order attitude deviation of the static solver output:
/// zeta = sum_i A^i nu^i, with
///   A^i = -K^{-1} w_i (tr(b_i e_i^T C) I - b_i e_i^T C),
///   K = tr(C^T L) I - C^T L.
std::vector<Mat3> attitude_error_coefficients(const Mat3& c_hat_m, const AttitudeProfile& profile,
                                              const DirectionSet& dirs,
                                              const BodyObservations& obs);

/// Builds the measured uncertainty ellipsoid: center from the static
/// attitude solve and the measured angular velocity, uncertainty from the
/// trace-minimal vector sum of the embedded error-bound images.
StateEllipsoid measurement_update(const MeasurementBundle& bundle);

struct FusionOutcome {
    StateEllipsoid estimate;
    double q;  // trace-optimal fusion parameter
};

/// Minimal-trace ellipsoid containing the intersection of the flow and
/// measured ellipsoids, re-centered on the measured center.
FusionOutcome fuse(const StateEllipsoid& flow, const StateEllipsoid& measured);

ConvergenceReport convergence_check(const Mat6& p_m, const Mat6& p_f, const Mat6& a_f, double q,
                                    double c);

struct FilterConfig {
    std::optional<double> q;  // fixed fusion/convergence parameter; default: trace-optimal
    double contraction_c = 0.99;
};

struct FilterStepResult {
    StateEllipsoid posterior;
    ConvergenceReport report;
    StateEllipsoid flow;      // intermediate, exposed for diagnostics
    StateEllipsoid measured;  // intermediate, exposed for diagnostics
};

/// One full estimator cycle: flow update over `steps`, measurement update,
/// fusion, and the contraction check. Component failures propagate with a
/// stage label prefixed to the message.
FilterStepResult filter_step(const StateEllipsoid& prior, int steps, const InertiaParams& inertia,
                             const PotentialModel& pot, const MeasurementBundle& bundle,
                             const FilterConfig& config = {});

}  // namespace attbound
