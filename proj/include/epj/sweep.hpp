#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "epj/aerial_dynamics.hpp"
#include "epj/model.hpp"

namespace epj {

enum class SweepParameter { JointX, JointY, StiffnessK };

const char* to_string(SweepParameter parameter);
SweepParameter parse_sweep_parameter(const std::string& name);

/// An inclusive linear grid over one design parameter (SI units).
struct SweepSpec {
    SweepParameter parameter = SweepParameter::StiffnessK;
    double lower = 0.0;
    double upper = 0.0;
    int num_points = 0;
    Scenario base_scenario;
};

struct SweepPoint {
    double value = 0.0;
    std::optional<JumpMetrics> metrics;  ///< joint enabled; empty when the run failed
    std::optional<JumpMetrics> baseline; ///< rigid baseline
    std::string error;                   ///< failure cause, empty when ok
    bool ok() const { return metrics.has_value(); }
};

struct ZeroCrossing {
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double root = 0.0;
    double omega_at_root = 0.0;
    int iterations = 0;
    bool converged = false; ///< |omega| tolerance met (vs. interval exhaustion)
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::StiffnessK;
    std::vector<double> grid;
    std::vector<SweepPoint> points;
    std::vector<ZeroCrossing> zero_crossings; ///< refined omega_end sign changes
};

enum class Monotonicity { Increasing, Decreasing, Constant, None };
const char* to_string(Monotonicity m);

struct MetricTrend {
    std::string name;
    Monotonicity monotonicity = Monotonicity::None;
    double min = 0.0;
    double max = 0.0;
};

struct TrendSummary {
    std::vector<MetricTrend> metrics;
    std::vector<int> omega_sign_change_cells; ///< grid index i of each cell [i, i+1]
    int failed_points = 0;
    bool epj_apex_below_baseline = false; ///< strict at every successful point
};

/// Clone the base scenario with the parameter substituted. Joint moves
/// re-derive the arms and inertias from the stored anchor geometry.
Scenario scenario_for(const Scenario& base, SweepParameter parameter, double value);

/// omega_end of the enabled-joint simulation at one parameter value.
double omega_end_for(const Scenario& base, SweepParameter parameter, double value);

/// Run the grid (concurrently; EPJ_SIM_THREADS caps workers, 0 = auto),
/// record per-point metrics and baseline, refine every omega_end sign
/// change. Failed points are recorded with their cause, never dropped.
/// Throws SimulationError when every point fails.
SweepResult run_sweep(const SweepSpec& spec);

/// Bisection on the parameter until |omega_end| <= the scenario's
/// omega_zero_tol or the interval shrinks below 1e-6 of its span.
/// Throws BracketError without a sign change at the endpoints.
ZeroCrossing find_zero_crossing(const Scenario& base, SweepParameter parameter,
                                double lower, double upper);

/// Generic bisection core (exposed for direct testing on synthetic
/// functions). rel_width_tol is relative to the initial span.
ZeroCrossing bisect_zero(const std::function<double(double)>& f, double lower,
                         double upper, double f_tol, double rel_width_tol);

/// Machine-checkable per-metric verdicts over a completed sweep.
/// Requires at least 3 successful points.
TrendSummary trend_report(const SweepResult& result);

std::string format_trend_report(const TrendSummary& summary);

/// Columns: param_name,param_value,omega_end,apex_m,distance_m,
/// distance_corrected_m,status; refined roots appended as footer lines
/// prefixed "#root,".
void write_sweep_csv(std::ostream& out, const SweepResult& result);

} // namespace epj
