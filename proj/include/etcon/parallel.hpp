#pragma once

// Data-parallel kernels. Each kernel has an OpenMP version and a serial
// reference with identical per-item arithmetic, so the two must agree bit for
// bit; tests hold them to that and the benchmark target times both.

#include "etcon/engine.hpp"
#include "etcon/linear_et.hpp"
#include "etcon/metrics.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace etcon {

/// M(t) at every requested time.
[[nodiscard]] std::vector<Matrix> gap_matrices(const LyapunovData& lyap, std::span<const double> times);
[[nodiscard]] std::vector<Matrix> gap_matrices_serial(const LyapunovData& lyap, std::span<const double> times);

/// Largest eigenvalue of each (symmetric) matrix.
[[nodiscard]] std::vector<double> max_eigenvalues(std::span<const Matrix> mats);
[[nodiscard]] std::vector<double> max_eigenvalues_serial(std::span<const Matrix> mats);

struct SimJob {
    WeightedDigraph graph;
    TriggerLaw law;
    Vector x0;
    SimConfig config;
};

struct SimOutcome {
    std::optional<Trace> trace;  ///< partial trace on ZenoAbort, empty on other errors
    RunMetrics metrics;
    std::optional<ErrorKind> error;
    std::string message;
};

/// Runs independent simulations; outcome k belongs to job k regardless of
/// scheduling.
[[nodiscard]] std::vector<SimOutcome> run_jobs(std::span<const SimJob> jobs);
[[nodiscard]] std::vector<SimOutcome> run_jobs_serial(std::span<const SimJob> jobs);

/// One job, exceptions folded into the outcome.
[[nodiscard]] SimOutcome run_job(const SimJob& job);

}  // namespace etcon
