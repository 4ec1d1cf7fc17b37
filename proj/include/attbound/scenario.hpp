#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "attbound/dynamics.hpp"
#include "attbound/ellipsoid.hpp"
#include "attbound/types.hpp"

namespace attbound {

struct PotentialSpec {
    enum class Type { zero, pendulum };
    Type type = Type::zero;
    double mass_kg = 0.0;
    double gravity_m_s2 = 0.0;
    Vec3 rho_m = Vec3::Zero();
};

/// Full simulation/estimation configuration, loaded from a JSON document.
/// Matrices are flat row-major arrays in the file; rotations are entered as
/// rotation vectors (radians) and expanded through exp_so3 on load.
struct Scenario {
    Mat3 inertia_kg_m2;
    double h_seconds = 0.0;
    PotentialSpec potential;
    Eigen::Matrix3Xd reference_directions;  // columns e^i
    Eigen::VectorXd weights;                // defaults to ones
    AttitudeState true_initial;
    StateEllipsoid initial_estimate;
    std::vector<Mat3> direction_bounds;  // S^i, rad^2
    Mat3 omega_bound;                    // T, rad^2/s^2
    int steps_per_measurement = 1;       // l
    int measurement_count = 0;
    std::uint64_t seed = 0;
    SampleMode noise_mode = SampleMode::interior;
    std::optional<double> q;      // fixed fusion parameter; default trace-optimal
    double contraction_c = 0.99;  // c for the convergence check

    InertiaParams make_inertia() const;
    std::unique_ptr<PotentialModel> make_potential() const;

    /// Enforces every field invariant, including that the true initial state
    /// lies in the initial uncertainty ellipsoid. Throws ScenarioError
    /// naming the offending field.
    void validate() const;

    /// Canonical JSON serialization (sorted keys), used for config hashing.
    std::string canonical_json() const;

    /// FNV-1a 64 hash of canonical_json(), as fixed-width hex.
    std::string config_hash() const;
};

/// Parses and validates a scenario file. Parse errors carry line
/// information; invariant violations name the field.
Scenario load_scenario(const std::string& path);

/// Same as load_scenario but from an in-memory document (used by tests).
Scenario parse_scenario(const std::string& json_text);

}  // namespace attbound
