#include "etcon/parallel.hpp"

#include <Eigen/Eigenvalues>

namespace etcon {

std::vector<Matrix> gap_matrices(const LyapunovData& lyap, std::span<const double> times) {
    const auto count = static_cast<std::ptrdiff_t>(times.size());
    std::vector<Matrix> out(times.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        out[k] = gap_matrix(lyap, times[k]);
    }
    return out;
}

std::vector<Matrix> gap_matrices_serial(const LyapunovData& lyap, std::span<const double> times) {
    std::vector<Matrix> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(gap_matrix(lyap, t));
    return out;
}

namespace {

double largest_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(m.rows() - 1);
}

}  // namespace

std::vector<double> max_eigenvalues(std::span<const Matrix> mats) {
    const auto count = static_cast<std::ptrdiff_t>(mats.size());
    std::vector<double> out(mats.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        out[k] = largest_eigenvalue(mats[k]);
    }
    return out;
}

std::vector<double> max_eigenvalues_serial(std::span<const Matrix> mats) {
    std::vector<double> out;
    out.reserve(mats.size());
    for (const auto& m : mats) out.push_back(largest_eigenvalue(m));
    return out;
}

SimOutcome run_job(const SimJob& job) {
    SimOutcome out;
    try {
        Trace trace = simulate_triggered(job.graph, job.law, job.x0, job.config);
        out.metrics = compute_metrics(trace);
        out.trace = std::move(trace);
    } catch (const ZenoAbortError& err) {
        out.error = ErrorKind::ZenoAbort;
        out.message = err.what();
        out.metrics = compute_metrics(err.partial_trace());
        out.metrics.zeno_suspect = true;
        out.trace = err.partial_trace();
    } catch (const Error& err) {
        out.error = err.kind();
        out.message = err.what();
    }
    return out;
}

std::vector<SimOutcome> run_jobs(std::span<const SimJob> jobs) {
    const auto count = static_cast<std::ptrdiff_t>(jobs.size());
    std::vector<SimOutcome> out(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        out[k] = run_job(jobs[k]);
    }
    return out;
}

std::vector<SimOutcome> run_jobs_serial(std::span<const SimJob> jobs) {
    std::vector<SimOutcome> out;
    out.reserve(jobs.size());
    for (const auto& job : jobs) out.push_back(run_job(job));
    return out;
}

}  // namespace etcon
