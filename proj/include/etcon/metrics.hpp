#pragma once

#include "etcon/engine.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace etcon {

struct RunMetrics {
    double final_disagreement = 0.0;
    double conservation_error = 0.0;
    int events_total = 0;
    std::vector<int> events_per_agent;
    double min_gap = std::numeric_limits<double>::infinity();
    double mean_gap = std::numeric_limits<double>::infinity();
    /// NaN when the trace never decays enough to fit.
    double decay_rate = std::numeric_limits<double>::quiet_NaN();
    bool zeno_suspect = false;
};

struct GapStats {
    double min_gap = std::numeric_limits<double>::infinity();
    double mean_gap = std::numeric_limits<double>::infinity();
    bool zeno_suspect = false;
};

/// ||x - mean(x) 1||.
[[nodiscard]] double disagreement(const Vector& x);

/// x^T L x.
[[nodiscard]] double lyapunov_edge(const Vector& x, const Matrix& L);

/// Least-squares slope of -log(disagreement) against t, restricted to samples
/// whose disagreement lies in [1e-10, 0.5 * initial]. Throws InsufficientDecay
/// when fewer than 10 samples fall in that window.
[[nodiscard]] double fit_decay_rate(const Trace& trace);

/// Per-agent gaps between consecutive events. kAllAgents records count as an
/// event for every one of the n agents. No gaps: min = mean = +inf.
[[nodiscard]] GapStats inter_event_stats(const std::vector<EventRecord>& events, int n, double zeno_floor);

[[nodiscard]] std::vector<int> events_per_agent(const std::vector<EventRecord>& events, int n);

[[nodiscard]] RunMetrics compute_metrics(const Trace& trace);

/// One "key=value" line per field.
void write_metrics_kv(std::ostream& out, const RunMetrics& m);
/// Column names shared by every metrics CSV.
[[nodiscard]] std::vector<std::string> metrics_csv_columns();
[[nodiscard]] std::vector<std::string> metrics_csv_values(const RunMetrics& m);
/// Header plus one row.
void write_metrics_csv(std::ostream& out, const RunMetrics& m);
struct MetricsRow {
    /// Sweep parameter columns, in file order.
    std::vector<std::pair<std::string, double>> params;
    RunMetrics metrics;
};

/// Every data row of a metrics CSV; columns that are not metric fields are
/// treated as sweep parameters.
[[nodiscard]] std::vector<MetricsRow> read_metrics_table(std::istream& in);
/// First data row only.
[[nodiscard]] RunMetrics read_metrics_csv(std::istream& in);

}  // namespace etcon
