#include "attbound/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "attbound/so3.hpp"
#include "attbound/wahba.hpp"

namespace attbound {

using nlohmann::json;

namespace {

json require_field(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw ScenarioError("scenario: missing field '" + key + "'");
    }
    return j.at(key);
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows * cols) {
        throw ScenarioError("scenario: field '" + name + "' must be a flat row-major array of " +
                            std::to_string(rows * cols) + " numbers");
    }
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const json& v = j.at(r * cols + c);
            if (!v.is_number()) {
                throw ScenarioError("scenario: field '" + name + "' has a non-numeric entry");
            }
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

Vec3 parse_vec3(const json& j, const std::string& name) {
    if (!j.is_array() || j.size() != 3) {
        throw ScenarioError("scenario: field '" + name + "' must be an array of 3 numbers");
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j.at(i).is_number()) {
            throw ScenarioError("scenario: field '" + name + "' has a non-numeric entry");
        }
        v[i] = j.at(i).get<double>();
    }
    return v;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
    std::vector<double> out;
    out.reserve(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back(m(r, c));
        }
    }
    return out;
}

AttitudeState parse_state(const json& j, const std::string& name) {
    AttitudeState s;
    s.attitude = exp_so3(parse_vec3(require_field(j, "attitude_rotvec_rad"),
                                    name + ".attitude_rotvec_rad"));
    s.omega = parse_vec3(require_field(j, "omega_rad_s"), name + ".omega_rad_s");
    return s;
}

Scenario from_json(const json& doc) {
    Scenario s;
    s.inertia_kg_m2 = parse_matrix(require_field(doc, "J_kg_m2"), "J_kg_m2", 3, 3);
    s.h_seconds = require_field(doc, "h_seconds").get<double>();

    const json pot = require_field(doc, "potential");
    const std::string pot_type = require_field(pot, "type").get<std::string>();
    if (pot_type == "zero") {
        s.potential.type = PotentialSpec::Type::zero;
    } else if (pot_type == "pendulum") {
        s.potential.type = PotentialSpec::Type::pendulum;
        s.potential.mass_kg = require_field(pot, "mass_kg").get<double>();
        s.potential.gravity_m_s2 = require_field(pot, "gravity_m_s2").get<double>();
        s.potential.rho_m = parse_vec3(require_field(pot, "rho_m"), "potential.rho_m");
    } else {
        throw ScenarioError("scenario: potential.type must be 'zero' or 'pendulum'");
    }

    const json dirs = require_field(doc, "reference_directions");
    if (!dirs.is_array() || dirs.empty()) {
        throw ScenarioError("scenario: reference_directions must be a non-empty array");
    }
    const int m = static_cast<int>(dirs.size());
    s.reference_directions.resize(3, m);
    for (int i = 0; i < m; ++i) {
        s.reference_directions.col(i) = parse_vec3(dirs.at(i), "reference_directions");
    }

    if (doc.contains("weights")) {
        const json w = doc.at("weights");
        if (!w.is_array() || static_cast<int>(w.size()) != m) {
            throw ScenarioError("scenario: weights must have one entry per reference direction");
        }
        s.weights.resize(m);
        for (int i = 0; i < m; ++i) s.weights[i] = w.at(i).get<double>();
    } else {
        s.weights = Eigen::VectorXd::Ones(m);
    }

    s.true_initial = parse_state(require_field(doc, "true_initial"), "true_initial");
    const json est = require_field(doc, "initial_estimate");
    s.initial_estimate.center = parse_state(est, "initial_estimate");
    s.initial_estimate.uncertainty = parse_matrix(require_field(est, "P0"), "P0", 6, 6);

    const json noise = require_field(doc, "noise");
    const json s_list = require_field(noise, "S_rad2");
    if (!s_list.is_array() || static_cast<int>(s_list.size()) != m) {
        throw ScenarioError("scenario: noise.S_rad2 must have one 3x3 bound per direction");
    }
    for (int i = 0; i < m; ++i) {
        s.direction_bounds.push_back(
            parse_matrix(s_list.at(i), "noise.S_rad2[" + std::to_string(i) + "]", 3, 3));
    }
    s.omega_bound = parse_matrix(require_field(noise, "T_rad2_s2"), "noise.T_rad2_s2", 3, 3);

    s.steps_per_measurement = require_field(doc, "l_steps_per_measurement").get<int>();
    s.measurement_count = require_field(doc, "measurement_count").get<int>();
    s.seed = require_field(doc, "seed").get<std::uint64_t>();

    if (doc.contains("noise_mode")) {
        const std::string mode = doc.at("noise_mode").get<std::string>();
        if (mode == "interior") {
            s.noise_mode = SampleMode::interior;
        } else if (mode == "boundary") {
            s.noise_mode = SampleMode::boundary;
        } else {
            throw ScenarioError("scenario: noise_mode must be 'interior' or 'boundary'");
        }
    }
    if (doc.contains("q") && !doc.at("q").is_null()) {
        s.q = doc.at("q").get<double>();
    }
    if (doc.contains("c")) {
        s.contraction_c = doc.at("c").get<double>();
    }

    s.validate();
    return s;
}

}  // namespace

InertiaParams Scenario::make_inertia() const {
    return InertiaParams::create(inertia_kg_m2, h_seconds);
}

std::unique_ptr<PotentialModel> Scenario::make_potential() const {
    if (potential.type == PotentialSpec::Type::zero) {
        return std::make_unique<ZeroPotential>();
    }
    return std::make_unique<PendulumPotential>(potential.mass_kg, potential.gravity_m_s2,
                                               potential.rho_m);
}

void Scenario::validate() const {
    try {
        make_inertia();
    } catch (const Error& e) {
        throw ScenarioError(std::string("scenario: J_kg_m2/h_seconds invalid: ") + e.what());
    }
    try {
        make_potential();
    } catch (const Error& e) {
        throw ScenarioError(std::string("scenario: potential invalid: ") + e.what());
    }

    DirectionSet dirs{reference_directions, weights};
    try {
        dirs.validate(2);
    } catch (const Error& e) {
        throw ScenarioError(std::string("scenario: reference_directions/weights invalid: ") +
                            e.what());
    }

    if (!is_rotation(true_initial.attitude)) {
        throw ScenarioError("scenario: true_initial attitude is not a rotation");
    }
    if (!is_rotation(initial_estimate.center.attitude)) {
        throw ScenarioError("scenario: initial_estimate attitude is not a rotation");
    }
    if (!is_spd(initial_estimate.uncertainty)) {
        throw ScenarioError("scenario: P0 is not symmetric positive definite");
    }
    for (std::size_t i = 0; i < direction_bounds.size(); ++i) {
        if (!is_spd(direction_bounds[i])) {
            throw ScenarioError("scenario: noise.S_rad2[" + std::to_string(i) + "] is not SPD");
        }
    }
    if (!is_spd(omega_bound)) {
        throw ScenarioError("scenario: noise.T_rad2_s2 is not SPD");
    }
    if (steps_per_measurement < 1) {
        throw ScenarioError("scenario: l_steps_per_measurement must be >= 1");
    }
    if (measurement_count < 1) {
        throw ScenarioError("scenario: measurement_count must be >= 1");
    }
    if (!(contraction_c > 0.0 && contraction_c < 1.0)) {
        throw ScenarioError("scenario: c must lie in (0, 1)");
    }
    if (q && !(*q > 0.0)) {
        throw ScenarioError("scenario: q must be positive");
    }

    if (!state_membership(initial_estimate, true_initial)) {
        throw ScenarioError(
            "scenario: true_initial does not lie in the initial uncertainty ellipsoid "
            "(true_initial, initial_estimate.P0)");
    }
}

std::string Scenario::canonical_json() const {
    json doc;
    doc["J_kg_m2"] = flatten(inertia_kg_m2);
    doc["h_seconds"] = h_seconds;
    if (potential.type == PotentialSpec::Type::zero) {
        doc["potential"] = {{"type", "zero"}};
    } else {
        doc["potential"] = {{"type", "pendulum"},
                            {"mass_kg", potential.mass_kg},
                            {"gravity_m_s2", potential.gravity_m_s2},
                            {"rho_m", std::vector<double>{potential.rho_m[0], potential.rho_m[1],
                                                          potential.rho_m[2]}}};
    }
    json dirs = json::array();
    for (int i = 0; i < reference_directions.cols(); ++i) {
        dirs.push_back(std::vector<double>{reference_directions(0, i), reference_directions(1, i),
                                           reference_directions(2, i)});
    }
    doc["reference_directions"] = dirs;
    doc["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
    const auto state_json = [](const AttitudeState& s) {
        const Vec3 rv = log_so3(s.attitude);
        return json{{"attitude_rotvec_rad", std::vector<double>{rv[0], rv[1], rv[2]}},
                    {"omega_rad_s", std::vector<double>{s.omega[0], s.omega[1], s.omega[2]}}};
    };
    doc["true_initial"] = state_json(true_initial);
    doc["initial_estimate"] = state_json(initial_estimate.center);
    doc["initial_estimate"]["P0"] = flatten(initial_estimate.uncertainty);
    json s_list = json::array();
    for (const Mat3& b : direction_bounds) s_list.push_back(flatten(b));
    doc["noise"] = {{"S_rad2", s_list}, {"T_rad2_s2", flatten(omega_bound)}};
    doc["l_steps_per_measurement"] = steps_per_measurement;
    doc["measurement_count"] = measurement_count;
    doc["seed"] = seed;
    doc["noise_mode"] = noise_mode == SampleMode::interior ? "interior" : "boundary";
    if (q) {
        doc["q"] = *q;
    } else {
        doc["q"] = nullptr;
    }
    doc["c"] = contraction_c;
    return doc.dump();
}

std::string Scenario::config_hash() const {
    const std::string text = canonical_json();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("scenario: cannot open file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
    try {
        return from_json(doc);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario: malformed field: ") + e.what());
    }
}

}  // namespace attbound
