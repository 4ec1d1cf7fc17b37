#include "attbound/simulation.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "attbound/so3.hpp"

namespace attbound {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t instant, std::uint64_t stream) {
    return splitmix(splitmix(splitmix(seed) ^ instant) ^ (stream + 0x51ed270b0f4a92b5ULL));
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::vector<double> flatten6(const Mat6& m) {
    std::vector<double> out;
    out.reserve(36);
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) out.push_back(m(r, c));
    }
    return out;
}

}  // namespace

std::vector<AttitudeState> simulate_truth(const Scenario& s) {
    const InertiaParams inertia = s.make_inertia();
    const std::unique_ptr<PotentialModel> pot = s.make_potential();
    const int total = s.steps_per_measurement * s.measurement_count;

    std::vector<AttitudeState> trajectory;
    trajectory.reserve(total + 1);
    trajectory.push_back(s.true_initial);
    for (int k = 0; k < total; ++k) {
        trajectory.push_back(integrator_step(trajectory.back(), inertia, *pot));
    }
    return trajectory;
}

MeasurementBundle corrupt_measurements(const AttitudeState& truth, const Scenario& s,
                                       int instant_index, std::vector<Vec3>* nu_out,
                                       Vec3* upsilon_out) {
    const int m = static_cast<int>(s.reference_directions.cols());
    MeasurementBundle bundle;
    bundle.dirs = DirectionSet{s.reference_directions, s.weights};
    bundle.obs.directions.resize(3, m);
    bundle.direction_bounds = s.direction_bounds;
    bundle.omega_bound = s.omega_bound;
    if (nu_out) nu_out->clear();

    for (int i = 0; i < m; ++i) {
        const EllipsoidRn bound{Vec3::Zero(), s.direction_bounds[i]};
        const Vec3 nu = sample_in(bound, 1, derive_seed(s.seed, instant_index, i),
                                  s.noise_mode)[0];
        const Vec3 body_true = truth.attitude.transpose() * s.reference_directions.col(i);
        // True direction = exp_so3(nu) * reported direction.
        Vec3 reported = exp_so3(-nu) * body_true;
        reported.normalize();
        bundle.obs.directions.col(i) = reported;
        if (nu_out) nu_out->push_back(nu);
    }

    const EllipsoidRn omega_bound{Vec3::Zero(), s.omega_bound};
    const Vec3 upsilon =
        sample_in(omega_bound, 1, derive_seed(s.seed, instant_index, m), s.noise_mode)[0];
    bundle.measured_omega = truth.omega - upsilon;
    if (upsilon_out) *upsilon_out = upsilon;
    return bundle;
}

EstimationRun run_estimation(const Scenario& s) {
    const InertiaParams inertia = s.make_inertia();
    const std::unique_ptr<PotentialModel> pot = s.make_potential();
    const std::vector<AttitudeState> truth = simulate_truth(s);

    FilterConfig config;
    config.q = s.q;
    config.contraction_c = s.contraction_c;

    EstimationRun run;
    run.summary.measurement_count = s.measurement_count;
    run.summary.total_steps = s.steps_per_measurement * s.measurement_count;
    run.summary.seed = s.seed;
    run.summary.config_hash = s.config_hash();
    run.summary.potential_gradient =
        s.make_potential()->numerical_gradient() ? "finite_difference" : "analytic";

    StateEllipsoid prior = s.initial_estimate;
    for (int j = 1; j <= s.measurement_count; ++j) {
        const int k = j * s.steps_per_measurement;
        const MeasurementBundle bundle = corrupt_measurements(truth[k], s, j);

        FilterStepResult step;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            step = filter_step(prior, s.steps_per_measurement, inertia, *pot, bundle, config);
        } catch (const EmptyIntersectionError& e) {
            run.summary.aborted = true;
            run.summary.abort_reason = e.what();
            break;
        }
        const auto t1 = std::chrono::steady_clock::now();

        RunRecord rec;
        rec.step_index = k;
        rec.truth = truth[k];
        rec.estimate = step.posterior.center;
        rec.trace_p = step.posterior.uncertainty.trace();
        rec.attitude_error_rad =
            log_so3(step.posterior.center.attitude.transpose() * truth[k].attitude).norm();
        rec.omega_error_rad_s = (step.posterior.center.omega - truth[k].omega).norm();
        rec.contained =
            state_membership(inflate(step.posterior, kContainmentInflation), truth[k]);
        rec.report = step.report;
        rec.fusion_seconds = std::chrono::duration<double>(t1 - t0).count();
        run.records.push_back(rec);

        prior = step.posterior;
    }

    RunSummary& sum = run.summary;
    sum.completed_measurements = static_cast<int>(run.records.size());
    if (!run.records.empty()) {
        sum.final_attitude_error_rad = run.records.back().attitude_error_rad;
        sum.final_omega_error_rad_s = run.records.back().omega_error_rad_s;
        sum.max_trace_p = run.records.front().trace_p;
        sum.min_trace_p = run.records.front().trace_p;
        int contained = 0;
        for (const RunRecord& rec : run.records) {
            sum.max_trace_p = std::max(sum.max_trace_p, rec.trace_p);
            sum.min_trace_p = std::min(sum.min_trace_p, rec.trace_p);
            if (rec.contained) ++contained;
            if (rec.report.satisfied) ++sum.contraction_satisfied_count;
        }
        sum.containment_rate = static_cast<double>(contained) / run.records.size();
        sum.final_uncertainty = prior.uncertainty;
    } else {
        sum.final_attitude_error_rad =
            log_so3(s.initial_estimate.center.attitude.transpose() * truth[0].attitude).norm();
        sum.final_omega_error_rad_s = (s.initial_estimate.center.omega - truth[0].omega).norm();
        sum.final_uncertainty = s.initial_estimate.uncertainty;
    }
    return run;
}

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << "step_index,"
           "truth_rotvec_x,truth_rotvec_y,truth_rotvec_z,"
           "truth_omega_x,truth_omega_y,truth_omega_z,"
           "est_rotvec_x,est_rotvec_y,est_rotvec_z,"
           "est_omega_x,est_omega_y,est_omega_z,"
           "attitude_error_rad,omega_error_rad_s,trace_P,contained,"
           "lambda_min,kappa_Pm,chi,flow_norm_Af,bound,satisfied,q_used\n";
    for (const RunRecord& rec : records) {
        const Vec3 truth_rv = log_so3(rec.truth.attitude);
        const Vec3 est_rv = log_so3(rec.estimate.attitude);
        out << rec.step_index;
        for (int i = 0; i < 3; ++i) out << ',' << format_double(truth_rv[i]);
        for (int i = 0; i < 3; ++i) out << ',' << format_double(rec.truth.omega[i]);
        for (int i = 0; i < 3; ++i) out << ',' << format_double(est_rv[i]);
        for (int i = 0; i < 3; ++i) out << ',' << format_double(rec.estimate.omega[i]);
        out << ',' << format_double(rec.attitude_error_rad);
        out << ',' << format_double(rec.omega_error_rad_s);
        out << ',' << format_double(rec.trace_p);
        out << ',' << (rec.contained ? 1 : 0);
        out << ',' << format_double(rec.report.lambda_min);
        out << ',' << format_double(rec.report.condition_number);
        out << ',' << format_double(rec.report.chi);
        out << ',' << format_double(rec.report.flow_norm);
        out << ',' << format_double(rec.report.bound);
        out << ',' << (rec.report.satisfied ? 1 : 0);
        out << ',' << format_double(rec.report.q);
        out << '\n';
    }
}

void write_summary_json(const std::string& path, const RunSummary& summary) {
    nlohmann::json doc;
    doc["final_attitude_error_rad"] = summary.final_attitude_error_rad;
    doc["final_omega_error_rad_s"] = summary.final_omega_error_rad_s;
    doc["max_trace_P"] = summary.max_trace_p;
    doc["min_trace_P"] = summary.min_trace_p;
    doc["containment_rate"] = summary.containment_rate;
    doc["contraction_satisfied_count"] = summary.contraction_satisfied_count;
    doc["total_steps"] = summary.total_steps;
    doc["completed_measurements"] = summary.completed_measurements;
    doc["measurement_count"] = summary.measurement_count;
    doc["seed"] = summary.seed;
    doc["config_hash"] = summary.config_hash;
    doc["inflation_factor"] = kContainmentInflation;
    doc["final_P_row_major"] = flatten6(summary.final_uncertainty);
    doc["aborted"] = summary.aborted;
    doc["abort_reason"] = summary.abort_reason;
    doc["potential_gradient"] = summary.potential_gradient;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << '\n';
}

void write_truth_csv(const std::string& path, const std::vector<AttitudeState>& trajectory,
                     double h_seconds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << "step,time_s,rotvec_x,rotvec_y,rotvec_z,omega_x,omega_y,omega_z\n";
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const Vec3 rv = log_so3(trajectory[k].attitude);
        out << k << ',' << format_double(k * h_seconds);
        for (int i = 0; i < 3; ++i) out << ',' << format_double(rv[i]);
        for (int i = 0; i < 3; ++i) out << ',' << format_double(trajectory[k].omega[i]);
        out << '\n';
    }
}

}  // namespace attbound
