#pragma once

#include <string>
#include <vector>

#include "attbound/filter.hpp"
#include "attbound/scenario.hpp"

namespace attbound {

/// Semi-axis inflation applied when flagging truth containment in run
/// records; absorbs the first-order linearization error of the updates.
inline constexpr double kContainmentInflation = 1.05;

/// Per-measurement-instant log entry. `fusion_seconds` is wall-clock time
/// and is intentionally not serialized (outputs are byte-reproducible).
struct RunRecord {
    int step_index = 0;
    AttitudeState truth;
    AttitudeState estimate;
    double trace_p = 0.0;
    double attitude_error_rad = 0.0;
    double omega_error_rad_s = 0.0;
    bool contained = false;
    ConvergenceReport report{};
    double fusion_seconds = 0.0;
};

struct RunSummary {
    double final_attitude_error_rad = 0.0;
    double final_omega_error_rad_s = 0.0;
    double max_trace_p = 0.0;
    double min_trace_p = 0.0;
    double containment_rate = 0.0;
    int contraction_satisfied_count = 0;
    int total_steps = 0;
    int completed_measurements = 0;
    int measurement_count = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    Mat6 final_uncertainty = Mat6::Zero();
    bool aborted = false;
    std::string abort_reason;
    std::string potential_gradient;  // "analytic" or "finite_difference"
};

struct EstimationRun {
    std::vector<RunRecord> records;
    RunSummary summary;
};

/// Ground-truth trajectory of length l * measurement_count + 1, produced by
/// iterating the variational integrator from the scenario's true initial
/// state. Deterministic.
std::vector<AttitudeState> simulate_truth(const Scenario& s);

/// Corrupts the true state at one measurement instant within the scenario's
/// noise bounds: each direction is rotated by a sampled error nu^i (so the
/// true direction is exp_so3(nu^i) times the reported one) and the angular
/// velocity receives a sampled additive error. Deterministic per
/// (seed, instant index, direction index). The drawn errors are written to
/// `nu_out`/`upsilon_out` when given (used by verification code).
MeasurementBundle corrupt_measurements(const AttitudeState& truth, const Scenario& s,
                                       int instant_index,
                                       std::vector<Vec3>* nu_out = nullptr,
                                       Vec3* upsilon_out = nullptr);

/// Runs the full estimation pipeline over the measurement schedule. An
/// empty-intersection failure aborts the run with partial records kept and
/// the reason recorded in the summary.
EstimationRun run_estimation(const Scenario& s);

/// records.csv with a fixed, documented header (one row per measurement
/// instant). Doubles are printed with round-trip precision; output is
/// byte-reproducible for a given scenario and seed.
void write_records_csv(const std::string& path, const std::vector<RunRecord>& records);

void write_summary_json(const std::string& path, const RunSummary& summary);

/// truth.csv: step, time and state per integrator step.
void write_truth_csv(const std::string& path, const std::vector<AttitudeState>& trajectory,
                     double h_seconds);

}  // namespace attbound
