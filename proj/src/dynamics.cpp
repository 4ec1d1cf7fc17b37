#include "attbound/dynamics.hpp"

#include <cmath>

#include "attbound/so3.hpp"

namespace attbound {

namespace {

// Rodrigues coefficients a = sin(t)/t, b = (1-cos(t))/t^2 and the derivative
// quotients a'(t)/t, b'(t)/t, with series branches against cancellation.
double coef_a(double t) {
    if (t < 1e-6) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

double coef_b(double t) {
    if (t < 1e-6) {
        const double t2 = t * t;
        return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    }
    return (1.0 - std::cos(t)) / (t * t);
}

double coef_da_over_t(double t) {
    if (t < 1e-3) {
        const double t2 = t * t;
        return -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0;
    }
    return (t * std::cos(t) - std::sin(t)) / (t * t * t);
}

double coef_db_over_t(double t) {
    if (t < 1e-3) {
        const double t2 = t * t;
        return -1.0 / 12.0 + t2 / 180.0 - t2 * t2 / 6720.0;
    }
    return (t * std::sin(t) - 2.0 * (1.0 - std::cos(t))) / (t * t * t * t);
}

Mat3 finite_difference_gradient(const std::function<double(const Mat3&)>& u, const Mat3& c) {
    constexpr double eps = 1e-6;
    Mat3 grad;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Mat3 plus = c;
            Mat3 minus = c;
            plus(i, j) += eps;
            minus(i, j) -= eps;
            grad(i, j) = (u(plus) - u(minus)) / (2.0 * eps);
        }
    }
    return grad;
}

}  // namespace

InertiaParams InertiaParams::create(const Mat3& inertia, double step) {
    if (!(step > 0.0)) {
        throw Error("inertia params: step size must be positive");
    }
    if (!is_spd(inertia)) {
        throw Error("inertia params: inertia matrix is not symmetric positive definite");
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
    const Vec3 moments = es.eigenvalues();
    for (int i = 0; i < 3; ++i) {
        if (moments[i] > moments[(i + 1) % 3] + moments[(i + 2) % 3] + 1e-12) {
            throw Error("inertia params: principal moments violate the triangle inequality");
        }
    }
    InertiaParams out;
    out.inertia = inertia;
    out.inertia_d = 0.5 * inertia.trace() * Mat3::Identity() - inertia;
    out.step = step;
    return out;
}

void PotentialModel::check_gradient() const {
    // Deterministic spot checks; U is smooth in the matrix entries, so the
    // gradient must match central differences away from any special attitude.
    const Vec3 probes[] = {Vec3(0.3, -0.7, 0.4), Vec3(-1.1, 0.2, 0.9), Vec3(0.05, 0.6, -1.4)};
    for (const Vec3& p : probes) {
        const Mat3 c = exp_so3(p);
        const Mat3 analytic = potential_gradient(c);
        const Mat3 numeric =
            finite_difference_gradient([this](const Mat3& m) { return potential(m); }, c);
        const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
        if ((analytic - numeric).cwiseAbs().maxCoeff() > 1e-6 * scale) {
            throw Error("potential model: gradient does not match finite differences of U");
        }
    }
}

PendulumPotential::PendulumPotential(double mass, double gravity, const Vec3& mass_center)
    : mass_(mass), gravity_(gravity), mass_center_(mass_center) {
    if (!(mass > 0.0)) {
        throw Error("pendulum potential: mass must be positive");
    }
    if (!(gravity >= 0.0)) {
        throw Error("pendulum potential: gravity must be non-negative");
    }
    check_gradient();
}

double PendulumPotential::potential(const Mat3& attitude) const {
    return -mass_ * gravity_ * Vec3::UnitZ().dot(attitude * mass_center_);
}

Mat3 PendulumPotential::potential_gradient(const Mat3&) const {
    return -mass_ * gravity_ * Vec3::UnitZ() * mass_center_.transpose();
}

NumericalGradientPotential::NumericalGradientPotential(
    std::function<double(const Mat3&)> potential)
    : potential_(std::move(potential)) {
    check_gradient();
}

Mat3 NumericalGradientPotential::potential_gradient(const Mat3& attitude) const {
    return finite_difference_gradient(potential_, attitude);
}

Vec3 moment_from_potential(const Mat3& attitude, const PotentialModel& pot) {
    const Mat3 grad = pot.potential_gradient(attitude);

    Vec3 moment = Vec3::Zero();
    for (int i = 0; i < 3; ++i) {
        moment += attitude.row(i).transpose().cross(grad.row(i).transpose());
    }

    const Mat3 skew = grad.transpose() * attitude - attitude.transpose() * grad;
    const Vec3 moment_vee(skew(2, 1), skew(0, 2), skew(1, 0));
    const double scale = std::max(1.0, moment.norm());
    if ((moment - moment_vee).norm() > 1e-12 * scale) {
        throw Error("moment_from_potential: row-sum and skew forms disagree");
    }
    return moment;
}

StepSolution solve_implicit_step(const Vec3& rhs, const InertiaParams& inertia) {
    const Mat3& j = inertia.inertia;
    const Vec3 guess = j.ldlt().solve(rhs);
    if (guess.norm() >= M_PI / 2.0) {
        throw IntegratorError(
            "implicit step: step size too large for the principal branch (||J^{-1} rhs|| = " +
            std::to_string(guess.norm()) + " >= pi/2)");
    }

    const double tol = 1e-12 * std::max(1.0, rhs.norm());
    Vec3 f = guess;
    for (int it = 0; it < 50; ++it) {
        const double t = f.norm();
        const Vec3 jf = j * f;
        const Vec3 residual = coef_a(t) * jf + coef_b(t) * f.cross(jf) - rhs;
        if (residual.norm() <= tol) {
            StepSolution sol;
            sol.f = f;
            sol.relative_rotation = exp_so3(f);
            sol.newton_iterations = it;
            sol.residual_norm = residual.norm();
            return sol;
        }

        const Mat3 jac = coef_a(t) * j + coef_da_over_t(t) * jf * f.transpose() +
                         coef_b(t) * (hat(f) * j - hat(jf)) +
                         coef_db_over_t(t) * f.cross(jf) * f.transpose();
        f -= jac.partialPivLu().solve(residual);
    }
    throw IntegratorError("implicit step: Newton iteration did not converge in 50 steps (|rhs| = " +
                          std::to_string(rhs.norm()) + ")");
}

AttitudeState integrator_step(const AttitudeState& state, const InertiaParams& inertia,
                              const PotentialModel& pot) {
    const double h = inertia.step;
    const Mat3& j = inertia.inertia;

    const Vec3 moment = moment_from_potential(state.attitude, pot);
    const Vec3 rhs = h * (j * state.omega + 0.5 * h * moment);
    const StepSolution sol = solve_implicit_step(rhs, inertia);
    const Mat3& f = sol.relative_rotation;

    AttitudeState next;
    next.attitude = state.attitude * f;
    const Vec3 moment_next = moment_from_potential(next.attitude, pot);
    const Vec3 momentum =
        f.transpose() * (j * state.omega) + 0.5 * h * f.transpose() * moment + 0.5 * h * moment_next;
    next.omega = j.ldlt().solve(momentum);
    return next;
}

StateDerivative continuous_derivative(const AttitudeState& state, const InertiaParams& inertia,
                                      const PotentialModel& pot) {
    const Vec3 moment = moment_from_potential(state.attitude, pot);
    StateDerivative d;
    d.attitude_rate = state.attitude * hat(state.omega);
    d.omega_rate =
        inertia.inertia.ldlt().solve(moment - state.omega.cross(inertia.inertia * state.omega));
    return d;
}

double total_energy(const AttitudeState& state, const InertiaParams& inertia,
                    const PotentialModel& pot) {
    return 0.5 * state.omega.dot(inertia.inertia * state.omega) + pot.potential(state.attitude);
}

}  // namespace attbound
