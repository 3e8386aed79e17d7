#pragma once

#include "etcon/config.hpp"
#include "etcon/metrics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace etcon {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitZeno = 3;

struct BoundCheck {
    std::string name;
    double observed = 0.0;
    double bound = 0.0;
    double slack = 0.0;  ///< positive when satisfied
    bool pass = false;
};

struct BoundsReport {
    std::vector<BoundCheck> checks;
    std::vector<std::string> warnings;

    [[nodiscard]] bool all_pass() const;
};

/// Theory-vs-observation table for one completed run. `sim` must be the
/// resolved configuration (event_tol, dt filled in).
///   centralized:     min_gap >= sigma / (||L|| (1 + sigma)) - event_tol
///   time_dependent:  final_disagreement <= ||L|| sqrt(N) c0 / lambda_2 + 1e-6  (c0 > 0)
///                    alpha < lambda_2                                          (c0 = 0)
///   periodic:        h < h*, min_gap >= h
///   ideal:           decay_rate >= 0.9 lambda_2
[[nodiscard]] BoundsReport check_bounds(const RunMetrics& metrics, const TriggerLaw& law, const WeightedDigraph& g,
                                        const SimConfig& sim);

/// Linear event-triggered toolkit: observed gaps against t_min.
[[nodiscard]] BoundsReport check_linear_et_bounds(double t_min, double min_gap);

void print_report(std::ostream& out, const BoundsReport& report);

struct RunOptions {
    std::optional<std::string> output_dir;
    bool quiet = false;
};

/// `run <config>`: simulate (or sweep), write trace.csv / events.csv /
/// metrics.csv, print the bounds table. Returns kExitOk, kExitValidation or
/// kExitZeno.
int run_command(const std::string& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err);

/// `bounds <metrics.csv> <config>`: re-check a finished run. Returns kExitOk
/// when every bound holds, kExitBoundFailed otherwise.
int bounds_command(const std::string& metrics_path, const std::string& config_path, std::ostream& out,
                   std::ostream& err);

/// `linear-et <config>`: Lyapunov data, t_min and a sample-and-hold run.
/// Writes linear_trace.csv (t,x_0..,V,S) and linear_events.csv (t).
int linear_et_command(const std::string& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace etcon
