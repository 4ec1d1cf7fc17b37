#include "attbound/filter.hpp"

#include <cmath>
#include <string>

#include "attbound/so3.hpp"

namespace attbound {

namespace {

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const IntegratorError& e) {
        throw IntegratorError(std::string(stage) + ": " + e.what());
    } catch (const DegenerateGeometryError& e) {
        throw DegenerateGeometryError(std::string(stage) + ": " + e.what());
    } catch (const EmptyIntersectionError& e) {
        throw EmptyIntersectionError(std::string(stage) + ": " + e.what());
    } catch (const Error& e) {
        throw Error(std::string(stage) + ": " + e.what());
    }
}

StateDeviation deviation_from(const AttitudeState& center, const AttitudeState& s) {
    StateDeviation dev;
    dev.rotation = log_so3(center.attitude.transpose() * s.attitude);
    dev.omega_delta = s.omega - center.omega;
    return dev;
}

}  // namespace

void MeasurementBundle::validate() const {
    dirs.validate(2);
    obs.validate();
    if (dirs.count() != obs.count()) {
        throw Error("measurement bundle: direction/observation count mismatch");
    }
    if (static_cast<int>(direction_bounds.size()) != dirs.count()) {
        throw Error("measurement bundle: need one direction bound per observation");
    }
    for (std::size_t i = 0; i < direction_bounds.size(); ++i) {
        if (!is_spd(direction_bounds[i])) {
            throw Error("measurement bundle: direction bound " + std::to_string(i) +
                        " is not SPD");
        }
    }
    if (!is_spd(omega_bound)) {
        throw Error("measurement bundle: angular velocity bound is not SPD");
    }
}

Mat6 flow_linearization(const AttitudeState& center, const InertiaParams& inertia,
                        const PotentialModel& pot, double eps) {
    const AttitudeState base_next = integrator_step(center, inertia, pot);

    Mat6 a;
    for (int j = 0; j < 6; ++j) {
        Vec6 columns[2];
        for (int s = 0; s < 2; ++s) {
            const double delta = (s == 0 ? eps : -eps);
            AttitudeState perturbed = center;
            if (j < 3) {
                perturbed.attitude = center.attitude * exp_so3(delta * Vec3::Unit(j));
            } else {
                perturbed.omega[j - 3] += delta;
            }
            const AttitudeState next = integrator_step(perturbed, inertia, pot);
            columns[s] = deviation_from(base_next, next).stacked();
        }
        a.col(j) = (columns[0] - columns[1]) / (2.0 * eps);
    }
    return a;
}

FlowResult flow_update(const StateEllipsoid& prior, int steps, const InertiaParams& inertia,
                       const PotentialModel& pot) {
    if (steps < 1) {
        throw Error("flow update: step count must be >= 1");
    }
    AttitudeState center = prior.center;
    Mat6 a_f = Mat6::Identity();
    for (int k = 0; k < steps; ++k) {
        try {
            a_f = flow_linearization(center, inertia, pot) * a_f;
            center = integrator_step(center, inertia, pot);
        } catch (const IntegratorError& e) {
            throw IntegratorError("flow update failed at step " + std::to_string(k) + ": " +
                                  e.what());
        }
    }
    Mat6 p_f = a_f * prior.uncertainty * a_f.transpose();
    p_f = 0.5 * (p_f + p_f.transpose());
    return FlowResult{StateEllipsoid{center, p_f}, a_f};
}

std::vector<Mat3> attitude_error_coefficients(const Mat3& c_hat_m, const AttitudeProfile& profile,
                                              const DirectionSet& dirs,
                                              const BodyObservations& obs) {
    const Mat3 ctl = c_hat_m.transpose() * profile.l;
    const Mat3 k = ctl.trace() * Mat3::Identity() - ctl;

    const Eigen::JacobiSVD<Mat3> svd(k);
    if (svd.singularValues()(2) <= 1e-10 * svd.singularValues()(0)) {
        throw DegenerateGeometryError("degenerate geometry for error propagation");
    }
    const Mat3 k_inv = k.inverse();

    std::vector<Mat3> coeffs;
    coeffs.reserve(dirs.count());
    for (int i = 0; i < dirs.count(); ++i) {
        const Mat3 outer =
            obs.directions.col(i) * dirs.directions.col(i).transpose() * c_hat_m;
        coeffs.push_back(-k_inv * dirs.weights[i] * (outer.trace() * Mat3::Identity() - outer));
    }
    return coeffs;
}

StateEllipsoid measurement_update(const MeasurementBundle& bundle) {
    bundle.validate();

    DirectionSet dirs = bundle.dirs;
    BodyObservations obs = bundle.obs;
    std::vector<Mat3> bounds = bundle.direction_bounds;
    if (dirs.count() == 2) {
        // The synthetic cross-product direction inherits both parents'
        // errors; bound it by the minimal ellipsoid containing their sum.
        std::tie(dirs, obs) = augment_pair(dirs, obs);
        bounds.push_back(minimal_sum({bounds[0], bounds[1]}));
    }
    dirs.validate(3);

    const AttitudeProfile profile = build_profile(dirs, obs);
    const Mat3 c_hat = solve_wahba(profile);
    const std::vector<Mat3> coeffs = attitude_error_coefficients(c_hat, profile, dirs, obs);

    std::vector<Eigen::MatrixXd> terms;
    terms.reserve(coeffs.size() + 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Mat6 t = Mat6::Zero();
        t.topLeftCorner<3, 3>() = coeffs[i] * bounds[i] * coeffs[i].transpose();
        terms.push_back(t);
    }
    Mat6 t_omega = Mat6::Zero();
    t_omega.bottomRightCorner<3, 3>() = bundle.omega_bound;
    terms.push_back(t_omega);

    Mat6 p_m = minimal_sum(terms);
    // The embedded blocks are individually rank deficient in R^6; a relative
    // ridge keeps the assembled matrix SPD when one block family degenerates.
    const Eigen::SelfAdjointEigenSolver<Mat6> es(p_m);
    if (es.eigenvalues().minCoeff() <= 1e-15 * p_m.trace()) {
        p_m += 1e-15 * p_m.trace() * Mat6::Identity();
    }

    return StateEllipsoid{AttitudeState{c_hat, bundle.measured_omega}, p_m};
}

namespace {

FusionOutcome fuse_with_q(const StateEllipsoid& flow, const StateEllipsoid& measured,
                          std::optional<double> fixed_q) {
    const StateDeviation dev = center_difference(measured.center, flow.center);
    const FusionResult res =
        fuse_intersection(EllipsoidRn{Vec6::Zero(), measured.uncertainty},
                          EllipsoidRn{dev.stacked(), flow.uncertainty}, fixed_q);

    const Vec3 zeta = res.center.head<3>();
    const Vec3 domega = res.center.tail<3>();
    FusionOutcome out;
    out.estimate.center.attitude = measured.center.attitude * exp_so3(zeta);
    out.estimate.center.omega = measured.center.omega + domega;
    out.estimate.uncertainty = res.shape;
    out.q = res.q;
    return out;
}

}  // namespace

FusionOutcome fuse(const StateEllipsoid& flow, const StateEllipsoid& measured) {
    return fuse_with_q(flow, measured, std::nullopt);
}

ConvergenceReport convergence_check(const Mat6& p_m, const Mat6& p_f, const Mat6& a_f, double q,
                                    double c) {
    if (!(q > 0.0)) {
        throw Error("convergence check: q must be positive");
    }
    if (!(c > 0.0 && c < 1.0)) {
        throw Error("convergence check: c must lie in (0, 1)");
    }

    Eigen::MatrixXd p_m_inv = p_m.inverse();
    p_m_inv = 0.5 * (p_m_inv + p_m_inv.transpose());
    const SpdProductEigen prod = diagonalize_spd_product(p_m_inv, p_f);

    const Eigen::SelfAdjointEigenSolver<Mat6> es(p_m);
    const double kappa = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();

    ConvergenceReport report;
    report.lambda_min = prod.eigenvalues.minCoeff();
    report.condition_number = kappa;
    report.chi = std::sqrt(6.0 + 30.0 * kappa);
    report.contraction_c = c;
    report.q = q;
    report.flow_norm = a_f.norm();
    report.bound = std::sqrt(c * (q + report.lambda_min) / (6.0 * report.chi * (1.0 + q)));
    report.satisfied = report.flow_norm < report.bound;
    return report;
}

FilterStepResult filter_step(const StateEllipsoid& prior, int steps, const InertiaParams& inertia,
                             const PotentialModel& pot, const MeasurementBundle& bundle,
                             const FilterConfig& config) {
    const FlowResult flow =
        with_stage("flow update", [&] { return flow_update(prior, steps, inertia, pot); });
    const StateEllipsoid measured =
        with_stage("measurement update", [&] { return measurement_update(bundle); });
    const FusionOutcome fused =
        with_stage("filtering", [&] { return fuse_with_q(flow.predicted, measured, config.q); });

    FilterStepResult out;
    out.posterior = fused.estimate;
    out.flow = flow.predicted;
    out.measured = measured;
    // When fusion lands on the q -> 0 measurement-only limit, report the
    // check at the lower edge of the searched range (it needs q > 0).
    const double report_q = config.q.value_or(fused.q > 0.0 ? fused.q : 1e-6);
    out.report = convergence_check(measured.uncertainty, flow.predicted.uncertainty,
                                   flow.linearization, report_q, config.contraction_c);
    return out;
}

}  // namespace attbound
