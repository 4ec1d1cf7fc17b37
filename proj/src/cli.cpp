#include "attbound/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "attbound/filter.hpp"
#include "attbound/simulation.hpp"
#include "attbound/so3.hpp"

namespace attbound {

namespace {

struct CommonOptions {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> noise_mode;
    std::optional<double> q;
    std::optional<double> c;
};

Scenario load_with_overrides(const CommonOptions& opt) {
    Scenario s = load_scenario(opt.scenario_path);
    if (opt.seed) s.seed = *opt.seed;
    if (opt.noise_mode) {
        if (*opt.noise_mode == "interior") {
            s.noise_mode = SampleMode::interior;
        } else if (*opt.noise_mode == "boundary") {
            s.noise_mode = SampleMode::boundary;
        } else {
            throw ScenarioError("noise-mode must be 'interior' or 'boundary'");
        }
    }
    if (opt.q) s.q = *opt.q;
    if (opt.c) s.contraction_c = *opt.c;
    s.validate();
    return s;
}

Mat6 read_matrix6_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open matrix file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError("matrix file '" + path + "': " + e.what());
    }
    if (!doc.is_array() || doc.size() != 36) {
        throw ScenarioError("matrix file '" + path +
                            "' must hold a flat row-major array of 36 numbers");
    }
    Mat6 m;
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
            m(r, c) = doc.at(r * 6 + c).get<double>();
        }
    }
    return m;
}

nlohmann::json report_json(const ConvergenceReport& report) {
    return nlohmann::json{{"flow_norm", report.flow_norm},
                          {"bound", report.bound},
                          {"lambda_min", report.lambda_min},
                          {"condition_number", report.condition_number},
                          {"chi", report.chi},
                          {"c", report.contraction_c},
                          {"q", report.q},
                          {"satisfied", report.satisfied}};
}

int run_simulate(const CommonOptions& opt) {
    const Scenario s = load_with_overrides(opt);
    std::filesystem::create_directories(opt.out_dir);
    write_truth_csv((std::filesystem::path(opt.out_dir) / "truth.csv").string(),
                    simulate_truth(s), s.h_seconds);
    return 0;
}

int run_estimate(const CommonOptions& opt) {
    const Scenario s = load_with_overrides(opt);
    std::filesystem::create_directories(opt.out_dir);
    const EstimationRun run = run_estimation(s);
    write_records_csv((std::filesystem::path(opt.out_dir) / "records.csv").string(), run.records);
    write_summary_json((std::filesystem::path(opt.out_dir) / "summary.json").string(),
                       run.summary);
    if (run.summary.aborted) {
        std::cerr << "estimate: run aborted after " << run.summary.completed_measurements
                  << " measurements: " << run.summary.abort_reason << "\n";
        return 2;
    }
    return 0;
}

int run_check_convergence(const std::string& pm_path, const std::string& pf_path,
                          const std::string& af_path, double q, double c) {
    const Mat6 p_m = read_matrix6_file(pm_path);
    const Mat6 p_f = read_matrix6_file(pf_path);
    const Mat6 a_f = read_matrix6_file(af_path);
    if (!is_spd(p_m)) throw ScenarioError("P^m file does not hold an SPD matrix");
    if (!is_spd(p_f)) throw ScenarioError("P^f file does not hold an SPD matrix");
    const ConvergenceReport report = convergence_check(p_m, p_f, a_f, q, c);
    std::cout << report_json(report).dump(2) << "\n";
    return 0;
}

int run_monte_carlo(const CommonOptions& opt, int trials) {
    const Scenario base = load_with_overrides(opt);

    int total_instants = 0;
    int total_contained = 0;
    int aborted_trials = 0;
    double min_rate = 1.0;
    double max_rate = 0.0;
    for (int t = 0; t < trials; ++t) {
        Scenario s = base;
        s.seed = base.seed + static_cast<std::uint64_t>(t);
        const EstimationRun run = run_estimation(s);
        if (run.summary.aborted) ++aborted_trials;
        int contained = 0;
        for (const RunRecord& rec : run.records) {
            if (rec.contained) ++contained;
        }
        total_instants += static_cast<int>(run.records.size());
        total_contained += contained;
        if (!run.records.empty()) {
            const double rate = static_cast<double>(contained) / run.records.size();
            min_rate = std::min(min_rate, rate);
            max_rate = std::max(max_rate, rate);
        }
    }

    nlohmann::json doc;
    doc["trials"] = trials;
    doc["base_seed"] = base.seed;
    doc["total_instants"] = total_instants;
    doc["total_contained"] = total_contained;
    doc["containment_rate"] =
        total_instants > 0 ? static_cast<double>(total_contained) / total_instants : 0.0;
    doc["min_trial_rate"] = min_rate;
    doc["max_trial_rate"] = max_rate;
    doc["aborted_trials"] = aborted_trials;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Deterministic attitude/angular-velocity estimation with uncertainty ellipsoids"};
    app.require_subcommand(1);

    CommonOptions opt;
    int trials = 100;
    std::string pm_path, pf_path, af_path;
    double check_q = 1.0;
    double check_c = 0.99;

    CLI::App* simulate = app.add_subcommand("simulate", "Integrate and write the true trajectory");
    simulate->add_option("--scenario", opt.scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--out", opt.out_dir, "Output directory")->required();
    simulate->add_option("--seed", opt.seed, "Override the scenario seed");

    CLI::App* estimate =
        app.add_subcommand("estimate", "Run the estimator and write records.csv + summary.json");
    estimate->add_option("--scenario", opt.scenario_path, "Scenario JSON file")->required();
    estimate->add_option("--out", opt.out_dir, "Output directory")->required();
    estimate->add_option("--seed", opt.seed, "Override the scenario seed");
    estimate->add_option("--noise-mode", opt.noise_mode, "interior|boundary");
    estimate->add_option("--q", opt.q, "Fixed fusion parameter (default: trace-optimal)");
    estimate->add_option("--c", opt.c, "Contraction constant for the convergence check");

    CLI::App* check = app.add_subcommand(
        "check-convergence", "Evaluate the contraction condition for supplied matrices");
    check->add_option("--pm", pm_path, "JSON file: measured uncertainty (36 numbers, row-major)")
        ->required();
    check->add_option("--pf", pf_path, "JSON file: flow uncertainty (36 numbers, row-major)")
        ->required();
    check->add_option("--af", af_path, "JSON file: accumulated flow linearization")->required();
    check->add_option("--q", check_q, "Fusion parameter");
    check->add_option("--c", check_c, "Contraction constant in (0, 1)");

    CLI::App* mc =
        app.add_subcommand("monte-carlo", "Aggregate containment statistics over many seeds");
    mc->add_option("--scenario", opt.scenario_path, "Scenario JSON file")->required();
    mc->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
    mc->add_option("--seed", opt.seed, "Override the base seed");
    mc->add_option("--noise-mode", opt.noise_mode, "interior|boundary");
    mc->add_option("--q", opt.q, "Fixed fusion parameter");
    mc->add_option("--c", opt.c, "Contraction constant");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return run_simulate(opt);
        if (estimate->parsed()) return run_estimate(opt);
        if (check->parsed()) return run_check_convergence(pm_path, pf_path, af_path, check_q, check_c);
        return run_monte_carlo(opt, trials);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace attbound
