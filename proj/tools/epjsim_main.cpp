// epjsim: scenario runner, EPJ on/off comparison, parameter sweeps and
// zero-crossing optimization for the spring-latched jumping robot model.
//
// Exit codes: 0 success, 2 configuration error, 3 simulation error,
// 4 optimization bracket without a sign change.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "epj/aerial_dynamics.hpp"
#include "epj/csv.hpp"
#include "epj/errors.hpp"
#include "epj/flight_kinematics.hpp"
#include "epj/model.hpp"
#include "epj/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitBracket = 4;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw epj::SimulationError("cannot open output file: " + path);
    out << content;
}

std::string summary_line(const char* label, const epj::JumpMetrics& m) {
    std::ostringstream out;
    out << label << ": omega_end = " << epj::format_g9(m.omega_end)
        << " rad/s, apex = " << epj::format_g9(m.apex_height)
        << " m, distance = " << epj::format_g9(m.landing_distance)
        << " m (corrected " << epj::format_g9(m.distance_corrected)
        << " m), flight = " << epj::format_g9(m.flight_time) << " s";
    if (m.relock_time)
        out << ", relock = " << epj::format_g9(*m.relock_time) << " s";
    return out.str();
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& epj_flag) {
    epj::Scenario scenario = epj::load_scenario_file(config_path);
    if (epj_flag == "on")
        scenario.epj_enabled = true;
    else if (epj_flag == "off")
        scenario.epj_enabled = false;
    else if (!epj_flag.empty())
        throw epj::ConfigError("--epj expects 'on' or 'off'");

    const epj::AerialTrajectory traj = scenario.epj_enabled
                                           ? epj::simulate_aerial(scenario)
                                           : epj::simulate_rigid(scenario);
    const epj::JumpMetrics metrics = epj::jump_metrics(scenario, traj);
    std::ostringstream csv;
    epj::write_trajectory_csv(csv, scenario, traj);
    write_file(out_path, csv.str());
    std::cout << summary_line(scenario.epj_enabled ? "epj" : "rigid", metrics)
              << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_path) {
    const epj::Scenario base = epj::load_scenario_file(config_path);

    epj::Scenario with = base;
    with.epj_enabled = true;
    epj::Scenario without = base;
    without.epj_enabled = false;

    const epj::JumpMetrics m_epj = epj::jump_metrics(with, epj::simulate_aerial(with));
    const epj::JumpMetrics m_rigid =
        epj::jump_metrics(without, epj::simulate_rigid(without));

    std::ostringstream csv;
    csv << epj::metrics_csv_header() << '\n';
    epj::write_metrics_row(csv, "with_epj", true, with, m_epj);
    epj::write_metrics_row(csv, "without_epj", false, without, m_rigid);
    write_file(out_path, csv.str());

    std::cout << summary_line("with epj   ", m_epj) << "\n"
              << summary_line("without epj", m_rigid) << "\n";
    if (m_rigid.omega_end != 0.0) {
        const double ratio =
            1.0 - std::abs(m_epj.omega_end) / std::abs(m_rigid.omega_end);
        std::cout << "flip suppression: " << epj::format_g9(100.0 * ratio)
                  << " % reduction in |omega_end|\n";
    }
    std::cout << "published reference values (different hardware geometry, not "
                 "expected to match):\n"
                 "  omega_end -0.37 vs -3.46 rad/s, apex 49.29 vs 49.68 cm, "
                 "distance 1.50 vs 1.46 m\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              double lower, double upper, int points, const std::string& out_path) {
    epj::SweepSpec spec;
    spec.parameter = epj::parse_sweep_parameter(parameter);
    spec.lower = lower;
    spec.upper = upper;
    spec.num_points = points;
    spec.base_scenario = epj::load_scenario_file(config_path);

    const epj::SweepResult result = epj::run_sweep(spec);
    std::ostringstream csv;
    epj::write_sweep_csv(csv, result);
    write_file(out_path, csv.str());
    const long ok_points =
        std::count_if(result.points.begin(), result.points.end(),
                      [](const epj::SweepPoint& p) { return p.ok(); });
    if (ok_points >= 3)
        std::cout << epj::format_trend_report(epj::trend_report(result));
    else
        std::cout << "trend report skipped: needs at least 3 successful points\n";
    for (const epj::ZeroCrossing& z : result.zero_crossings)
        std::cout << "zero crossing: " << parameter << " = "
                  << epj::format_g9(z.root) << " with |omega_end| = "
                  << epj::format_g9(std::abs(z.omega_at_root)) << " after "
                  << z.iterations << " iterations\n";
    return 0;
}

int cmd_optimize(const std::string& config_path, const std::string& parameter,
                 double lower, double upper, const std::string& out_path) {
    const epj::Scenario base = epj::load_scenario_file(config_path);
    const epj::SweepParameter param = epj::parse_sweep_parameter(parameter);
    epj::ZeroCrossing root;
    try {
        root = epj::find_zero_crossing(base, param, lower, upper);
    } catch (const epj::BracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBracket;
    }
    std::ostringstream report;
    report << "parameter = " << parameter << "\n"
           << "root = " << epj::format_g9(root.root) << "\n"
           << "abs_omega_end = " << epj::format_g9(std::abs(root.omega_at_root))
           << "\n"
           << "iterations = " << root.iterations << "\n"
           << "converged_on_omega_tol = " << (root.converged ? "yes" : "no")
           << "\n";
    if (!out_path.empty()) write_file(out_path, report.str());
    std::cout << report.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aerial-phase simulator and design optimizer for a jumping "
                 "robot with an elastic passive joint"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool seedless = true;
    app.add_flag("--seedless-deterministic", seedless,
                 "run fully deterministically (default; the simulator uses no "
                 "randomness anywhere)");

    auto* run = app.add_subcommand("run", "simulate one scenario, write the "
                                          "trajectory CSV");
    std::string epj_flag;
    run->add_option("--config", config_path, "scenario file")->required();
    run->add_option("--out", out_path, "trajectory CSV path")
        ->default_val("trajectory.csv");
    run->add_option("--epj", epj_flag, "override the joint: on|off");

    auto* compare = app.add_subcommand("compare", "run the scenario with and "
                                                  "without the joint");
    compare->add_option("--config", config_path, "scenario file")->required();
    compare->add_option("--out", out_path, "metrics CSV path")
        ->default_val("compare.csv");

    auto* sweep = app.add_subcommand("sweep", "grid study over one design "
                                              "parameter");
    std::string parameter;
    double lower = 0.0;
    double upper = 0.0;
    int points = 0;
    sweep->add_option("--config", config_path, "scenario file")->required();
    sweep->add_option("--param", parameter, "joint_x | joint_y | stiffness_k")
        ->required();
    sweep->add_option("--lower", lower, "grid lower bound (SI units)")->required();
    sweep->add_option("--upper", upper, "grid upper bound (SI units)")->required();
    sweep->add_option("--points", points, "grid size (>= 2)")->required();
    sweep->add_option("--out", out_path, "sweep CSV path")->default_val("sweep.csv");

    auto* optimize = app.add_subcommand("optimize", "refine a non-flipping "
                                                    "design value by bisection");
    optimize->add_option("--config", config_path, "scenario file")->required();
    optimize->add_option("--param", parameter, "joint_x | joint_y | stiffness_k")
        ->required();
    optimize->add_option("--lower", lower, "bracket lower bound")->required();
    optimize->add_option("--upper", upper, "bracket upper bound")->required();
    optimize->add_option("--out", out_path, "optional report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_path, epj_flag);
        if (compare->parsed()) return cmd_compare(config_path, out_path);
        if (sweep->parsed())
            return cmd_sweep(config_path, parameter, lower, upper, points, out_path);
        if (optimize->parsed())
            return cmd_optimize(config_path, parameter, lower, upper, out_path);
    } catch (const epj::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const epj::BracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBracket;
    } catch (const epj::SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
