#include "etcon/runner.hpp"

#include "etcon/error.hpp"
#include "etcon/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace etcon {

namespace fs = std::filesystem;

bool BoundsReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

namespace {

BoundCheck at_least(std::string name, double observed, double bound) {
    return {std::move(name), observed, bound, observed - bound, observed >= bound};
}

BoundCheck at_most(std::string name, double observed, double bound) {
    return {std::move(name), observed, bound, bound - observed, observed <= bound};
}

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::ZenoAbort ? kExitZeno : kExitValidation; }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path.string() + "'");
    out << content;
}

std::string to_csv_text(const Trace& trace, bool events) {
    std::ostringstream ss;
    if (events) {
        write_events_csv(ss, trace.events);
    } else {
        write_trace_csv(ss, trace);
    }
    return ss.str();
}

}  // namespace

BoundsReport check_bounds(const RunMetrics& metrics, const TriggerLaw& law, const WeightedDigraph& g,
                          const SimConfig& sim) {
    BoundsReport report;
    const SpectralInfo spec = spectral_info(g);
    if (std::holds_alternative<IdealLaw>(law)) {
        report.checks.push_back(at_least("decay_rate >= 0.9 lambda2", metrics.decay_rate, 0.9 * spec.lambda2));
    } else if (const auto* c = std::get_if<CentralizedNorm>(&law)) {
        const double tau = min_inter_event_bound_centralized(g, c->sigma);
        report.checks.push_back(at_least("min_gap >= tau - event_tol", metrics.min_gap, tau - sim.event_tol));
    } else if (const auto* td = std::get_if<TimeDependent>(&law)) {
        if (td->c0 > 0.0) {
            const double r = convergence_radius_time_trigger(g, td->c0);
            report.checks.push_back(at_most("final_disagreement <= r + 1e-6", metrics.final_disagreement, r + 1e-6));
        } else {
            report.checks.push_back(at_most("alpha < lambda2 (Zeno-free, c0 = 0)", td->alpha, spec.lambda2));
            report.checks.back().pass = td->alpha < spec.lambda2;
        }
    } else if (const auto* p = std::get_if<PeriodicStateDependent>(&law)) {
        const double h_star = max_admissible_period(g, p->sigma_i);
        BoundCheck cond = at_most("h < h*", p->h, h_star);
        cond.pass = p->h < h_star;
        if (!cond.pass) {
            report.warnings.push_back("periodic.h = " + format_number(p->h) + " violates the sampling condition (h* = " +
                                      format_number(h_star) + "); convergence is not guaranteed");
        }
        report.checks.push_back(cond);
        report.checks.push_back(at_least("min_gap >= h", metrics.min_gap, p->h * (1.0 - 1e-12)));
    }
    return report;
}

BoundsReport check_linear_et_bounds(double t_min, double min_gap) {
    BoundsReport report;
    report.checks.push_back(at_least("min_gap >= t_min - 1e-8", min_gap, t_min - 1e-8));
    return report;
}

void print_report(std::ostream& out, const BoundsReport& report) {
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    if (report.checks.empty()) {
        out << "  (no closed-form bound applies to this law)\n";
        return;
    }
    for (const auto& c : report.checks) {
        out << "  " << (c.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(40) << c.name
            << " observed=" << format_number(c.observed) << " bound=" << format_number(c.bound)
            << " slack=" << format_number(c.slack) << '\n';
    }
}

int run_command(const std::string& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    std::vector<SimJob> jobs;
    std::vector<std::vector<double>> points;
    try {
        cfg = load_experiment(config_path);
        if (opts.output_dir) cfg.output_dir = *opts.output_dir;
        const Vector x0 = cfg.x0.realize(cfg.graph.size());
        points = sweep_points(cfg.sweep);
        for (const auto& point : points) {
            SimJob job{cfg.graph, cfg.law, x0, cfg.sim};
            for (std::size_t a = 0; a < point.size(); ++a) {
                apply_parameter(job.law, job.config, cfg.sweep[a].parameter, point[a]);
            }
            jobs.push_back(std::move(job));
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }

    const auto outcomes = run_jobs(jobs);

    int code = kExitOk;
    try {
        fs::create_directories(cfg.output_dir);
        const bool sweeping = !cfg.sweep.empty();
        std::ostringstream merged;
        for (std::size_t a = 0; a < cfg.sweep.size(); ++a) merged << cfg.sweep[a].parameter << ',';
        const auto cols = metrics_csv_columns();
        for (std::size_t k = 0; k < cols.size(); ++k) merged << (k ? "," : "") << cols[k];
        merged << '\n';

        for (std::size_t p = 0; p < outcomes.size(); ++p) {
            const SimOutcome& o = outcomes[p];
            const fs::path dir = sweeping ? fs::path(cfg.output_dir) / ("point_" + std::to_string(p)) : fs::path(cfg.output_dir);
            if (o.error && *o.error != ErrorKind::ZenoAbort) {
                err << "error: " << o.message << '\n';
                return kExitValidation;
            }
            if (o.error) {
                err << "error: " << o.message << '\n';
                code = kExitZeno;
            }
            fs::create_directories(dir);
            if (o.trace) {
                write_file(dir / "trace.csv", to_csv_text(*o.trace, false));
                write_file(dir / "events.csv", to_csv_text(*o.trace, true));
            }
            std::ostringstream single;
            write_metrics_csv(single, o.metrics);
            write_file(dir / "metrics.csv", single.str());
            for (double v : points[p]) merged << format_number(v) << ',';
            const auto vals = metrics_csv_values(o.metrics);
            for (std::size_t k = 0; k < vals.size(); ++k) merged << (k ? "," : "") << vals[k];
            merged << '\n';

            if (!opts.quiet) {
                const SpectralInfo spec = spectral_info(jobs[p].graph);
                out << "== " << law_name(jobs[p].law);
                for (std::size_t a = 0; a < points[p].size(); ++a) {
                    out << ' ' << cfg.sweep[a].parameter << '=' << format_number(points[p][a]);
                }
                out << " ==\n";
                out << "graph: n=" << jobs[p].graph.size() << " lambda2=" << format_number(spec.lambda2)
                    << " lambdaN=" << format_number(spec.lambdaN) << " ||L||=" << format_number(spec.laplacian_norm)
                    << '\n';
                write_metrics_kv(out, o.metrics);
                if (o.trace) {
                    print_report(out, check_bounds(o.metrics, jobs[p].law, jobs[p].graph, o.trace->config));
                }
            }
        }
        if (sweeping) write_file(fs::path(cfg.output_dir) / "metrics.csv", merged.str());
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
    return code;
}

int bounds_command(const std::string& metrics_path, const std::string& config_path, std::ostream& out,
                   std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_experiment(config_path);
        std::ifstream in(metrics_path);
        if (!in) throw Error(ErrorKind::ParseError, "cannot open metrics '" + metrics_path + "'");
        const auto rows = read_metrics_table(in);
        const SpectralInfo spec = spectral_info(cfg.graph);
        bool all_pass = true;
        for (const auto& row : rows) {
            TriggerLaw law = cfg.law;
            SimConfig sim = cfg.sim;
            for (const auto& [name, value] : row.params) apply_parameter(law, sim, name, value);
            law = validate_law(law, cfg.graph);
            const SimConfig resolved = resolve_config(sim, spec, law);
            out << "== " << law_name(law);
            for (const auto& [name, value] : row.params) out << ' ' << name << '=' << format_number(value);
            out << " ==\n";
            const BoundsReport report = check_bounds(row.metrics, law, cfg.graph, resolved);
            print_report(out, report);
            all_pass = all_pass && report.all_pass();
        }
        return all_pass ? kExitOk : kExitBoundFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

int linear_et_command(const std::string& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        LinearEtConfig cfg = load_linear_et(config_path);
        if (opts.output_dir) cfg.output_dir = *opts.output_dir;
        const LyapunovData lyap = prepare_lyapunov(cfg.system);
        const double window = cfg.t_max > 0.0 ? cfg.t_max : default_scan_window(lyap);
        const double t_min = min_inter_event_time(lyap, tabulate_gap(lyap, window, cfg.grid_points));
        const LinearEtTrace trace = simulate_linear_et(cfg.system, lyap, cfg.x0, cfg.horizon, cfg.samples_per_interval);

        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < trace.event_times.size(); ++k) {
            min_gap = std::min(min_gap, trace.event_times[k] - trace.event_times[k - 1]);
        }
        double worst_excess = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < trace.times.size(); ++k) worst_excess = std::max(worst_excess, trace.V[k] - trace.S[k]);

        fs::create_directories(cfg.output_dir);
        std::ostringstream tcsv;
        const auto n = cfg.x0.size();
        tcsv << 't';
        for (Eigen::Index i = 0; i < n; ++i) tcsv << ",x_" << i;
        tcsv << ",V,S\n";
        for (std::size_t k = 0; k < trace.times.size(); ++k) {
            tcsv << format_number(trace.times[k]);
            for (Eigen::Index i = 0; i < n; ++i) tcsv << ',' << format_number(trace.states[k](i));
            tcsv << ',' << format_number(trace.V[k]) << ',' << format_number(trace.S[k]) << '\n';
        }
        write_file(fs::path(cfg.output_dir) / "linear_trace.csv", tcsv.str());
        std::ostringstream ecsv;
        ecsv << "t\n";
        for (double t : trace.event_times) ecsv << format_number(t) << '\n';
        write_file(fs::path(cfg.output_dir) / "linear_events.csv", ecsv.str());

        const BoundsReport report = check_linear_et_bounds(t_min, min_gap);
        if (!opts.quiet) {
            out << "== linear-et ==\n";
            out << "t_min=" << format_number(t_min) << '\n';
            out << "det_residual=" << format_number(scaled_det_residual(lyap, t_min)) << '\n';
            out << "events=" << trace.event_times.size() << '\n';
            out << "min_gap=" << format_number(min_gap) << '\n';
            out << "max(V-S)=" << format_number(worst_excess) << '\n';
            print_report(out, report);
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

}  // namespace etcon
