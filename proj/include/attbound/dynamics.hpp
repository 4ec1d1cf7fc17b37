#pragma once

#include <functional>
#include <memory>

#include "attbound/types.hpp"

namespace attbound {

/// Rigid-body inertia and integrator step size. `inertia_d` is the shifted
/// inertia 1/2 tr(J) I - J used by the discrete update; it is derived in
/// create() and kept consistent by construction.
struct InertiaParams {
    Mat3 inertia;    // J, kg m^2
    Mat3 inertia_d;  // 1/2 tr(J) I - J
    double step;     // h, seconds

    /// Validates J SPD, the triangle inequality on its principal moments,
    /// and h > 0.
    static InertiaParams create(const Mat3& inertia, double step);
};

/// Attitude plus body-frame angular velocity.
struct AttitudeState {
    Mat3 attitude;  // rotation matrix, body -> inertial
    Vec3 omega;     // rad/s, body frame
};

/// Attitude-dependent potential. Implementations supply the scalar energy
/// and its entrywise gradient with respect to the attitude matrix;
/// check_gradient() verifies the two against central finite differences and
/// is invoked by the provided implementations at construction.
class PotentialModel {
public:
    virtual ~PotentialModel() = default;

    virtual double potential(const Mat3& attitude) const = 0;
    virtual Mat3 potential_gradient(const Mat3& attitude) const = 0;

    /// True when the gradient is produced by finite differences instead of
    /// an analytic expression (surfaced in run metadata).
    virtual bool numerical_gradient() const { return false; }

protected:
    /// Compares potential_gradient against central differences of
    /// potential() on a few deterministic attitudes; throws on mismatch
    /// beyond 1e-6 relative.
    void check_gradient() const;
};

/// Free rigid body: U = 0.
class ZeroPotential final : public PotentialModel {
public:
    double potential(const Mat3&) const override { return 0.0; }
    Mat3 potential_gradient(const Mat3&) const override { return Mat3::Zero(); }
};

/// Uniform gravity acting on an offset mass center (3D pendulum):
/// U(C) = -m g e3^T C rho.
class PendulumPotential final : public PotentialModel {
public:
    PendulumPotential(double mass, double gravity, const Vec3& mass_center);

    double potential(const Mat3& attitude) const override;
    Mat3 potential_gradient(const Mat3& attitude) const override;

    double mass() const { return mass_; }
    double gravity() const { return gravity_; }
    const Vec3& mass_center() const { return mass_center_; }

private:
    double mass_;
    double gravity_;
    Vec3 mass_center_;  // rho, body frame, meters
};

/// Wraps a potential given only as U(C); the gradient falls back to central
/// finite differences and is flagged as numerical in run metadata.
class NumericalGradientPotential final : public PotentialModel {
public:
    explicit NumericalGradientPotential(std::function<double(const Mat3&)> potential);

    double potential(const Mat3& attitude) const override { return potential_(attitude); }
    Mat3 potential_gradient(const Mat3& attitude) const override;
    bool numerical_gradient() const override { return true; }

private:
    std::function<double(const Mat3&)> potential_;
};

/// Body-frame moment induced by the potential. Computed both as the row
/// cross-product sum over C and dU/dC and as vee(dU/dC^T C - C^T dU/dC);
/// the two must agree to 1e-12.
Vec3 moment_from_potential(const Mat3& attitude, const PotentialModel& pot);

/// Solution of the implicit relative-rotation equation for one step.
struct StepSolution {
    Vec3 f;                  // relative rotation vector, radians
    Mat3 relative_rotation;  // exp_so3(f)
    int newton_iterations;
    double residual_norm;
};

/// Solves  sin(t)/t J f + (1-cos(t))/t^2 (f x J f) = rhs  (t = ||f||), the
/// vector form of  S(rhs) = F J_d - J_d F^T  under F = exp_so3(f), by Newton
/// iteration with analytic Jacobian. `rhs` is h (J w + h/2 M). Steps with
/// ||J^{-1} rhs|| >= pi/2 are rejected (outside the principal branch).
StepSolution solve_implicit_step(const Vec3& rhs, const InertiaParams& inertia);

/// One step of the variational integrator:
///   C_{k+1} = C_k F_k,
///   J w_{k+1} = F_k^T J w_k + h/2 F_k^T M_k + h/2 M_{k+1}.
AttitudeState integrator_step(const AttitudeState& state, const InertiaParams& inertia,
                              const PotentialModel& pot);

/// Continuous equations of motion, exposed for cross-validation:
/// Cdot = C S(w), J wdot = M - w x J w.
struct StateDerivative {
    Mat3 attitude_rate;
    Vec3 omega_rate;
};

StateDerivative continuous_derivative(const AttitudeState& state, const InertiaParams& inertia,
                                      const PotentialModel& pot);

/// 1/2 w^T J w + U(C).
double total_energy(const AttitudeState& state, const InertiaParams& inertia,
                    const PotentialModel& pot);

}  // namespace attbound
