#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "attbound/cli.hpp"
#include "attbound/filter.hpp"
#include "attbound/simulation.hpp"
#include "attbound/so3.hpp"

namespace py = pybind11;
using namespace attbound;

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Deterministic attitude and angular-velocity estimation on SO(3) with "
        "uncertainty ellipsoids";

    py::register_exception<Error>(m, "AttboundError", PyExc_RuntimeError);

    // Rotation-group and matrix primitives.
    m.def("hat", &hat, py::arg("v"));
    m.def("vee", &vee, py::arg("a"), py::arg("tol") = 1e-9);
    m.def("exp_so3", &exp_so3, py::arg("f"));
    m.def("log_so3", &log_so3, py::arg("c"));
    m.def("is_rotation", &is_rotation, py::arg("c"), py::arg("tol") = 1e-9);
    m.def("is_spd", &is_spd, py::arg("m"), py::arg("sym_tol") = 1e-12);
    m.def("spd_sqrt", &spd_sqrt, py::arg("m"));
    m.def("spd_inv_sqrt", &spd_inv_sqrt, py::arg("m"));
    m.def(
        "qr_positive",
        [](const Mat3& l) {
            const QrFactors qr = qr_positive(l);
            return py::make_tuple(qr.q, qr.r);
        },
        py::arg("l"));
    m.def(
        "diagonalize_spd_product",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
            const SpdProductEigen res = diagonalize_spd_product(a, b);
            return py::make_tuple(res.v, res.eigenvalues);
        },
        py::arg("a"), py::arg("b"));

    // Static attitude determination.
    py::class_<DirectionSet>(m, "DirectionSet")
        .def(py::init([](const Eigen::Matrix3Xd& directions, const Eigen::VectorXd& weights) {
                 return DirectionSet{directions, weights};
             }),
             py::arg("directions"), py::arg("weights"))
        .def_readwrite("directions", &DirectionSet::directions)
        .def_readwrite("weights", &DirectionSet::weights)
        .def("count", &DirectionSet::count)
        .def("validate", &DirectionSet::validate, py::arg("min_count") = 3);

    py::class_<BodyObservations>(m, "BodyObservations")
        .def(py::init([](const Eigen::Matrix3Xd& directions) {
                 return BodyObservations{directions};
             }),
             py::arg("directions"))
        .def_readwrite("directions", &BodyObservations::directions)
        .def("count", &BodyObservations::count);

    py::class_<AttitudeProfile>(m, "AttitudeProfile")
        .def(py::init([](const Mat3& l) { return AttitudeProfile{l}; }), py::arg("l"))
        .def_readwrite("l", &AttitudeProfile::l);

    m.def("wahba_cost", &wahba_cost, py::arg("c_hat"), py::arg("dirs"), py::arg("obs"));
    m.def("build_profile", &build_profile, py::arg("dirs"), py::arg("obs"));
    m.def("solve_wahba", &solve_wahba, py::arg("profile"));
    m.def("optimality_residual", &optimality_residual, py::arg("c_hat"), py::arg("profile"));
    m.def("augment_pair", &augment_pair, py::arg("dirs"), py::arg("obs"));

    // Rigid-body dynamics.
    py::class_<InertiaParams>(m, "InertiaParams")
        .def_static("create", &InertiaParams::create, py::arg("inertia"), py::arg("step"))
        .def_readonly("inertia", &InertiaParams::inertia)
        .def_readonly("inertia_d", &InertiaParams::inertia_d)
        .def_readonly("step", &InertiaParams::step);

    py::class_<AttitudeState>(m, "AttitudeState")
        .def(py::init([](const Mat3& attitude, const Vec3& omega) {
                 return AttitudeState{attitude, omega};
             }),
             py::arg("attitude"), py::arg("omega"))
        .def_readwrite("attitude", &AttitudeState::attitude)
        .def_readwrite("omega", &AttitudeState::omega);

    py::class_<PotentialModel>(m, "PotentialModel")
        .def("potential", &PotentialModel::potential, py::arg("attitude"))
        .def("potential_gradient", &PotentialModel::potential_gradient, py::arg("attitude"))
        .def("numerical_gradient", &PotentialModel::numerical_gradient);
    py::class_<ZeroPotential, PotentialModel>(m, "ZeroPotential").def(py::init<>());
    py::class_<PendulumPotential, PotentialModel>(m, "PendulumPotential")
        .def(py::init<double, double, const Vec3&>(), py::arg("mass"), py::arg("gravity"),
             py::arg("mass_center"))
        .def_property_readonly("mass", &PendulumPotential::mass)
        .def_property_readonly("gravity", &PendulumPotential::gravity)
        .def_property_readonly("mass_center", &PendulumPotential::mass_center);

    py::class_<StepSolution>(m, "StepSolution")
        .def_readonly("f", &StepSolution::f)
        .def_readonly("relative_rotation", &StepSolution::relative_rotation)
        .def_readonly("newton_iterations", &StepSolution::newton_iterations)
        .def_readonly("residual_norm", &StepSolution::residual_norm);

    py::class_<StateDerivative>(m, "StateDerivative")
        .def_readonly("attitude_rate", &StateDerivative::attitude_rate)
        .def_readonly("omega_rate", &StateDerivative::omega_rate);

    m.def("moment_from_potential", &moment_from_potential, py::arg("attitude"), py::arg("pot"));
    m.def("solve_implicit_step", &solve_implicit_step, py::arg("rhs"), py::arg("inertia"));
    m.def("integrator_step", &integrator_step, py::arg("state"), py::arg("inertia"),
          py::arg("pot"));
    m.def("continuous_derivative", &continuous_derivative, py::arg("state"), py::arg("inertia"),
          py::arg("pot"));
    m.def("total_energy", &total_energy, py::arg("state"), py::arg("inertia"), py::arg("pot"));

    // Ellipsoid calculus.
    py::class_<EllipsoidRn>(m, "EllipsoidRn")
        .def(py::init([](const Eigen::VectorXd& center, const Eigen::MatrixXd& shape) {
                 return EllipsoidRn{center, shape};
             }),
             py::arg("center"), py::arg("shape"))
        .def_readwrite("center", &EllipsoidRn::center)
        .def_readwrite("shape", &EllipsoidRn::shape)
        .def("dim", &EllipsoidRn::dim);

    py::class_<StateEllipsoid>(m, "StateEllipsoid")
        .def(py::init([](const AttitudeState& center, const Mat6& uncertainty) {
                 return StateEllipsoid{center, uncertainty};
             }),
             py::arg("center"), py::arg("uncertainty"))
        .def_readwrite("center", &StateEllipsoid::center)
        .def_readwrite("uncertainty", &StateEllipsoid::uncertainty);

    py::class_<StateDeviation>(m, "StateDeviation")
        .def_readwrite("rotation", &StateDeviation::rotation)
        .def_readwrite("omega_delta", &StateDeviation::omega_delta)
        .def("stacked", &StateDeviation::stacked);

    py::enum_<SampleMode>(m, "SampleMode")
        .value("interior", SampleMode::interior)
        .value("boundary", SampleMode::boundary);

    py::class_<FusionResult>(m, "FusionResult")
        .def_readonly("center", &FusionResult::center)
        .def_readonly("shape", &FusionResult::shape)
        .def_readonly("q", &FusionResult::q);

    m.def("contains", &contains, py::arg("e"), py::arg("x"));
    m.def("size", &size, py::arg("e"));
    m.def("state_membership", &state_membership, py::arg("se"), py::arg("s"));
    m.def("inflate", &inflate, py::arg("se"), py::arg("factor"));
    m.def("minimal_sum", &minimal_sum, py::arg("terms"));
    m.def("center_difference", &center_difference, py::arg("measured_center"),
          py::arg("flow_center"));
    m.def("fuse_intersection", &fuse_intersection, py::arg("a"), py::arg("b"),
          py::arg("fixed_q") = py::none());
    m.def("sample_in", &sample_in, py::arg("e"), py::arg("count"), py::arg("seed"),
          py::arg("mode") = SampleMode::interior);

    // Filter.
    py::class_<MeasurementBundle>(m, "MeasurementBundle")
        .def(py::init([](const DirectionSet& dirs, const BodyObservations& obs,
                         const Vec3& measured_omega, const std::vector<Mat3>& direction_bounds,
                         const Mat3& omega_bound) {
                 return MeasurementBundle{dirs, obs, measured_omega, direction_bounds,
                                          omega_bound};
             }),
             py::arg("dirs"), py::arg("obs"), py::arg("measured_omega"),
             py::arg("direction_bounds"), py::arg("omega_bound"))
        .def_readwrite("dirs", &MeasurementBundle::dirs)
        .def_readwrite("obs", &MeasurementBundle::obs)
        .def_readwrite("measured_omega", &MeasurementBundle::measured_omega)
        .def_readwrite("direction_bounds", &MeasurementBundle::direction_bounds)
        .def_readwrite("omega_bound", &MeasurementBundle::omega_bound)
        .def("validate", &MeasurementBundle::validate);

    py::class_<FlowResult>(m, "FlowResult")
        .def_readonly("predicted", &FlowResult::predicted)
        .def_readonly("linearization", &FlowResult::linearization);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("flow_norm", &ConvergenceReport::flow_norm)
        .def_readonly("bound", &ConvergenceReport::bound)
        .def_readonly("lambda_min", &ConvergenceReport::lambda_min)
        .def_readonly("condition_number", &ConvergenceReport::condition_number)
        .def_readonly("chi", &ConvergenceReport::chi)
        .def_readonly("contraction_c", &ConvergenceReport::contraction_c)
        .def_readonly("q", &ConvergenceReport::q)
        .def_readonly("satisfied", &ConvergenceReport::satisfied);

    py::class_<FusionOutcome>(m, "FusionOutcome")
        .def_readonly("estimate", &FusionOutcome::estimate)
        .def_readonly("q", &FusionOutcome::q);

    py::class_<FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("q", &FilterConfig::q)
        .def_readwrite("contraction_c", &FilterConfig::contraction_c);

    py::class_<FilterStepResult>(m, "FilterStepResult")
        .def_readonly("posterior", &FilterStepResult::posterior)
        .def_readonly("report", &FilterStepResult::report)
        .def_readonly("flow", &FilterStepResult::flow)
        .def_readonly("measured", &FilterStepResult::measured);

    m.def("flow_linearization", &flow_linearization, py::arg("center"), py::arg("inertia"),
          py::arg("pot"), py::arg("eps") = 1e-6);
    m.def("flow_update", &flow_update, py::arg("prior"), py::arg("steps"), py::arg("inertia"),
          py::arg("pot"));
    m.def("attitude_error_coefficients", &attitude_error_coefficients, py::arg("c_hat_m"),
          py::arg("profile"), py::arg("dirs"), py::arg("obs"));
    m.def("measurement_update", &measurement_update, py::arg("bundle"));
    m.def("fuse", &fuse, py::arg("flow"), py::arg("measured"));
    m.def("convergence_check", &convergence_check, py::arg("p_m"), py::arg("p_f"), py::arg("a_f"),
          py::arg("q"), py::arg("c"));
    m.def("filter_step", &filter_step, py::arg("prior"), py::arg("steps"), py::arg("inertia"),
          py::arg("pot"), py::arg("bundle"), py::arg("config") = FilterConfig{});

    // Scenario harness.
    py::enum_<PotentialSpec::Type>(m, "PotentialType")
        .value("zero", PotentialSpec::Type::zero)
        .value("pendulum", PotentialSpec::Type::pendulum);

    py::class_<PotentialSpec>(m, "PotentialSpec")
        .def_readwrite("type", &PotentialSpec::type)
        .def_readwrite("mass_kg", &PotentialSpec::mass_kg)
        .def_readwrite("gravity_m_s2", &PotentialSpec::gravity_m_s2)
        .def_readwrite("rho_m", &PotentialSpec::rho_m);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("inertia_kg_m2", &Scenario::inertia_kg_m2)
        .def_readwrite("h_seconds", &Scenario::h_seconds)
        .def_readwrite("potential", &Scenario::potential)
        .def_readwrite("reference_directions", &Scenario::reference_directions)
        .def_readwrite("weights", &Scenario::weights)
        .def_readwrite("true_initial", &Scenario::true_initial)
        .def_readwrite("initial_estimate", &Scenario::initial_estimate)
        .def_readwrite("direction_bounds", &Scenario::direction_bounds)
        .def_readwrite("omega_bound", &Scenario::omega_bound)
        .def_readwrite("steps_per_measurement", &Scenario::steps_per_measurement)
        .def_readwrite("measurement_count", &Scenario::measurement_count)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("noise_mode", &Scenario::noise_mode)
        .def_readwrite("q", &Scenario::q)
        .def_readwrite("contraction_c", &Scenario::contraction_c)
        .def("make_inertia", &Scenario::make_inertia)
        .def("make_potential", &Scenario::make_potential)
        .def("validate", &Scenario::validate)
        .def("config_hash", &Scenario::config_hash);

    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("parse_scenario", &parse_scenario, py::arg("json_text"));

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("step_index", &RunRecord::step_index)
        .def_readonly("truth", &RunRecord::truth)
        .def_readonly("estimate", &RunRecord::estimate)
        .def_readonly("trace_p", &RunRecord::trace_p)
        .def_readonly("attitude_error_rad", &RunRecord::attitude_error_rad)
        .def_readonly("omega_error_rad_s", &RunRecord::omega_error_rad_s)
        .def_readonly("contained", &RunRecord::contained)
        .def_readonly("report", &RunRecord::report)
        .def_readonly("fusion_seconds", &RunRecord::fusion_seconds);

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("final_attitude_error_rad", &RunSummary::final_attitude_error_rad)
        .def_readonly("final_omega_error_rad_s", &RunSummary::final_omega_error_rad_s)
        .def_readonly("max_trace_p", &RunSummary::max_trace_p)
        .def_readonly("min_trace_p", &RunSummary::min_trace_p)
        .def_readonly("containment_rate", &RunSummary::containment_rate)
        .def_readonly("contraction_satisfied_count", &RunSummary::contraction_satisfied_count)
        .def_readonly("total_steps", &RunSummary::total_steps)
        .def_readonly("completed_measurements", &RunSummary::completed_measurements)
        .def_readonly("measurement_count", &RunSummary::measurement_count)
        .def_readonly("seed", &RunSummary::seed)
        .def_readonly("config_hash", &RunSummary::config_hash)
        .def_readonly("final_uncertainty", &RunSummary::final_uncertainty)
        .def_readonly("aborted", &RunSummary::aborted)
        .def_readonly("abort_reason", &RunSummary::abort_reason)
        .def_readonly("potential_gradient", &RunSummary::potential_gradient);

    py::class_<EstimationRun>(m, "EstimationRun")
        .def_readonly("records", &EstimationRun::records)
        .def_readonly("summary", &EstimationRun::summary);

    m.def("simulate_truth", &simulate_truth, py::arg("scenario"));
    m.def(
        "corrupt_measurements",
        [](const AttitudeState& truth, const Scenario& s, int instant_index) {
            return corrupt_measurements(truth, s, instant_index);
        },
        py::arg("truth"), py::arg("scenario"), py::arg("instant_index"));
    m.def("run_estimation", &run_estimation, py::arg("scenario"));
    m.def("write_records_csv", &write_records_csv, py::arg("path"), py::arg("records"));
    m.def("write_summary_json", &write_summary_json, py::arg("path"), py::arg("summary"));
    m.def("write_truth_csv", &write_truth_csv, py::arg("path"), py::arg("trajectory"),
          py::arg("h_seconds"));
    m.def("cli_main", &cli_main, py::arg("args"));

    m.attr("CONTAINMENT_INFLATION") = kContainmentInflation;
    m.attr("__version__") = "0.1.0";
}
