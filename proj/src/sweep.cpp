#include "epj/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "epj/csv.hpp"

namespace epj {

namespace {

int worker_count(int num_points) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("EPJ_SIM_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env, &end, 10);
        // 0 (or unset) means auto
        if (end != env && *end == '\0' && parsed > 0)
            n = static_cast<unsigned>(parsed);
    }
    if (n == 0) n = 1;
    return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(num_points)));
}

std::string sanitize(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

Monotonicity classify(const std::vector<double>& values) {
    bool nondecreasing = true;
    bool nonincreasing = true;
    bool constant = true;
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[i - 1]) nondecreasing = false;
        if (values[i] > values[i - 1]) nonincreasing = false;
        if (values[i] != values[i - 1]) constant = false;
    }
    if (constant) return Monotonicity::Constant;
    if (nondecreasing) return Monotonicity::Increasing;
    if (nonincreasing) return Monotonicity::Decreasing;
    return Monotonicity::None;
}

MetricTrend trend_of(const std::string& name, const std::vector<double>& values) {
    MetricTrend t;
    t.name = name;
    t.monotonicity = classify(values);
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    t.min = *mn;
    t.max = *mx;
    return t;
}

} // namespace

const char* to_string(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::JointX: return "joint_x";
        case SweepParameter::JointY: return "joint_y";
        case SweepParameter::StiffnessK: return "stiffness_k";
    }
    return "?";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "joint_x") return SweepParameter::JointX;
    if (name == "joint_y") return SweepParameter::JointY;
    if (name == "stiffness_k") return SweepParameter::StiffnessK;
    throw ConfigError("unknown sweep parameter '" + name +
                      "' (expected joint_x, joint_y or stiffness_k)");
}

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "monotone non-decreasing";
        case Monotonicity::Decreasing: return "monotone non-increasing";
        case Monotonicity::Constant: return "monotone: constant";
        case Monotonicity::None: return "not monotone";
    }
    return "?";
}

Scenario scenario_for(const Scenario& base, SweepParameter parameter, double value) {
    switch (parameter) {
        case SweepParameter::JointX:
            return with_joint_position(base, value, base.joint_design.joint_y);
        case SweepParameter::JointY:
            return with_joint_position(base, base.joint_design.joint_x, value);
        case SweepParameter::StiffnessK:
            return with_stiffness(base, value);
    }
    throw ConfigError("unknown sweep parameter");
}

double omega_end_for(const Scenario& base, SweepParameter parameter, double value) {
    const Scenario scenario = scenario_for(base, parameter, value);
    return simulate_aerial(scenario).relock->omega_end;
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.num_points < 2)
        throw ConfigError("sweep needs at least 2 grid points");
    if (!(spec.lower < spec.upper))
        throw ConfigError("sweep lower bound must be below the upper bound");

    SweepResult result;
    result.parameter = spec.parameter;
    result.grid.resize(spec.num_points);
    const double span = spec.upper - spec.lower;
    for (int i = 0; i < spec.num_points; ++i)
        result.grid[i] = spec.lower + span * i / (spec.num_points - 1);
    result.points.resize(spec.num_points);

    std::atomic<int> cursor{0};
    auto work = [&]() {
        for (int i = cursor.fetch_add(1); i < spec.num_points; i = cursor.fetch_add(1)) {
            SweepPoint& point = result.points[i];
            point.value = result.grid[i];
            try {
                const Scenario scenario =
                    scenario_for(spec.base_scenario, spec.parameter, point.value);
                point.metrics = jump_metrics(scenario, simulate_aerial(scenario));
                point.baseline = jump_metrics(scenario, simulate_rigid(scenario));
            } catch (const std::exception& e) {
                point.error = e.what();
            }
        }
    };

    const int workers = worker_count(spec.num_points);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    if (std::none_of(result.points.begin(), result.points.end(),
                     [](const SweepPoint& p) { return p.ok(); }))
        throw SimulationError("every sweep point failed; first cause: " +
                              result.points.front().error);

    for (int i = 0; i + 1 < spec.num_points; ++i) {
        const SweepPoint& a = result.points[i];
        const SweepPoint& b = result.points[i + 1];
        if (!a.ok() || !b.ok()) continue;
        const double wa = a.metrics->omega_end;
        const double wb = b.metrics->omega_end;
        if (wa == 0.0 || (wa < 0.0) == (wb < 0.0)) continue;
        try {
            result.zero_crossings.push_back(
                find_zero_crossing(spec.base_scenario, spec.parameter, a.value, b.value));
        } catch (const BracketError&) {
            // re-simulated endpoint landed exactly on zero; skip refinement
        }
    }
    return result;
}

ZeroCrossing bisect_zero(const std::function<double(double)>& f, double lower,
                         double upper, double f_tol, double rel_width_tol) {
    double flo = f(lower);
    const double fhi = f(upper);
    ZeroCrossing out;
    out.bracket_lo = lower;
    out.bracket_hi = upper;
    if ((flo < 0.0) == (fhi < 0.0))
        throw BracketError("no sign change over [" + format_g9(lower) + ", " +
                           format_g9(upper) + "]: f = " + format_g9(flo) +
                           " and " + format_g9(fhi));
    const double span = upper - lower;
    double lo = lower;
    double hi = upper;
    double mid = 0.5 * (lo + hi);
    double fmid = 0.0;
    while (hi - lo > rel_width_tol * span) {
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
        ++out.iterations;
        if (std::abs(fmid) <= f_tol) {
            out.root = mid;
            out.omega_at_root = fmid;
            out.converged = true;
            return out;
        }
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    out.root = 0.5 * (lo + hi);
    out.omega_at_root = f(out.root);
    out.converged = std::abs(out.omega_at_root) <= f_tol;
    return out;
}

ZeroCrossing find_zero_crossing(const Scenario& base, SweepParameter parameter,
                                double lower, double upper) {
    auto f = [&](double value) { return omega_end_for(base, parameter, value); };
    return bisect_zero(f, lower, upper, base.settings.omega_zero_tol, 1e-6);
}

TrendSummary trend_report(const SweepResult& result) {
    std::vector<double> omega, apex, dist, corr, baseline_omega;
    std::vector<int> ok_index;
    TrendSummary summary;
    for (size_t i = 0; i < result.points.size(); ++i) {
        const SweepPoint& p = result.points[i];
        if (!p.ok()) {
            ++summary.failed_points;
            continue;
        }
        ok_index.push_back(static_cast<int>(i));
        omega.push_back(p.metrics->omega_end);
        apex.push_back(p.metrics->apex_height);
        dist.push_back(p.metrics->landing_distance);
        corr.push_back(p.metrics->distance_corrected);
        baseline_omega.push_back(p.baseline->omega_end);
    }
    if (omega.size() < 3)
        throw SimulationError("trend report needs at least 3 successful points");

    summary.metrics.push_back(trend_of("omega_end", omega));
    summary.metrics.push_back(trend_of("apex_m", apex));
    summary.metrics.push_back(trend_of("distance_m", dist));
    summary.metrics.push_back(trend_of("distance_corrected_m", corr));
    summary.metrics.push_back(trend_of("baseline_omega_end", baseline_omega));

    for (size_t i = 0; i + 1 < omega.size(); ++i)
        if (omega[i] != 0.0 && (omega[i] < 0.0) != (omega[i + 1] < 0.0))
            summary.omega_sign_change_cells.push_back(ok_index[i]);

    summary.epj_apex_below_baseline = true;
    for (const SweepPoint& p : result.points)
        if (p.ok() && !(p.metrics->apex_height < p.baseline->apex_height))
            summary.epj_apex_below_baseline = false;
    return summary;
}

std::string format_trend_report(const TrendSummary& summary) {
    std::ostringstream out;
    for (const MetricTrend& t : summary.metrics)
        out << t.name << ": " << to_string(t.monotonicity) << ", range ["
            << format_g9(t.min) << ", " << format_g9(t.max) << "]\n";
    if (summary.omega_sign_change_cells.empty()) {
        out << "omega_end sign changes: none\n";
    } else {
        out << "omega_end sign changes in cells:";
        for (int c : summary.omega_sign_change_cells)
            out << " [" << c << "," << c + 1 << "]";
        out << "\n";
    }
    out << "apex with joint enabled below baseline at every point: "
        << (summary.epj_apex_below_baseline ? "yes" : "no") << "\n";
    if (summary.failed_points > 0)
        out << "failed points: " << summary.failed_points << "\n";
    return out.str();
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "param_name,param_value,omega_end,apex_m,distance_m,"
           "distance_corrected_m,status\n";
    const char* name = to_string(result.parameter);
    for (const SweepPoint& p : result.points) {
        out << name << ',' << format_g9(p.value) << ',';
        if (p.ok()) {
            out << format_g9(p.metrics->omega_end) << ','
                << format_g9(p.metrics->apex_height) << ','
                << format_g9(p.metrics->landing_distance) << ','
                << format_g9(p.metrics->distance_corrected) << ",ok\n";
        } else {
            out << ",,,," << sanitize(p.error) << '\n';
        }
    }
    for (const ZeroCrossing& z : result.zero_crossings) {
        out << "#root," << name << ',' << format_g9(z.bracket_lo) << ','
            << format_g9(z.bracket_hi) << ',' << format_g9(z.root) << ','
            << format_g9(std::abs(z.omega_at_root)) << ',' << z.iterations
            << '\n';
    }
}

} // namespace epj
