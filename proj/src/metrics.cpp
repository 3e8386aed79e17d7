#include "etcon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace etcon {

double disagreement(const Vector& x) {
    if (x.size() == 0) return 0.0;
    return (x.array() - x.mean()).matrix().norm();
}

double lyapunov_edge(const Vector& x, const Matrix& L) {
    if (L.rows() != x.size() || L.cols() != x.size()) {
        throw Error(ErrorKind::DimensionMismatch, "lyapunov_edge: L and x disagree in size");
    }
    return x.dot(L * x);
}

double fit_decay_rate(const Trace& trace) {
    if (trace.states.empty()) throw Error(ErrorKind::InsufficientDecay, "empty trace");
    const double initial = disagreement(trace.states.front());
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t k = 0; k < trace.states.size(); ++k) {
        const double d = disagreement(trace.states[k]);
        if (d >= 1e-10 && d <= 0.5 * initial) {
            ts.push_back(trace.times[k]);
            ys.push_back(std::log(d));
        }
    }
    if (ts.size() < 10) {
        throw Error(ErrorKind::InsufficientDecay, "only " + std::to_string(ts.size()) +
                                                      " samples inside the fit window");
    }
    const double m = static_cast<double>(ts.size());
    double t_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        t_mean += ts[k];
        y_mean += ys[k];
    }
    t_mean /= m;
    y_mean /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sxy += (ts[k] - t_mean) * (ys[k] - y_mean);
        sxx += (ts[k] - t_mean) * (ts[k] - t_mean);
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientDecay, "fit window spans zero time");
    return -sxy / sxx;
}

namespace {

std::vector<std::vector<double>> per_agent_times(const std::vector<EventRecord>& events, int n) {
    std::vector<std::vector<double>> times(n);
    for (const auto& e : events) {
        if (e.agent == kAllAgents) {
            for (auto& ts : times) ts.push_back(e.t);
        } else if (e.agent >= 0 && e.agent < n) {
            times[e.agent].push_back(e.t);
        }
    }
    return times;
}

}  // namespace

GapStats inter_event_stats(const std::vector<EventRecord>& events, int n, double zeno_floor) {
    GapStats out;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& ts : per_agent_times(events, n)) {
        for (std::size_t k = 1; k < ts.size(); ++k) {
            const double gap = ts[k] - ts[k - 1];
            out.min_gap = std::min(out.min_gap, gap);
            sum += gap;
            ++count;
            if (gap < zeno_floor) out.zeno_suspect = true;
        }
    }
    if (count > 0) out.mean_gap = sum / static_cast<double>(count);
    return out;
}

std::vector<int> events_per_agent(const std::vector<EventRecord>& events, int n) {
    std::vector<int> counts(n, 0);
    for (const auto& e : events) {
        if (e.agent == kAllAgents) {
            for (auto& c : counts) ++c;
        } else if (e.agent >= 0 && e.agent < n) {
            ++counts[e.agent];
        }
    }
    return counts;
}

RunMetrics compute_metrics(const Trace& trace) {
    RunMetrics m;
    if (!trace.states.empty()) m.final_disagreement = disagreement(trace.states.back());
    const double sum0 = trace.x0.sum();
    for (const auto& x : trace.states) m.conservation_error = std::max(m.conservation_error, std::abs(x.sum() - sum0));
    m.events_per_agent = events_per_agent(trace.events, trace.n);
    for (int c : m.events_per_agent) m.events_total += c;
    const GapStats gaps = inter_event_stats(trace.events, trace.n, trace.config.zeno_floor);
    m.min_gap = gaps.min_gap;
    m.mean_gap = gaps.mean_gap;
    m.zeno_suspect = gaps.zeno_suspect || !trace.zeno_flags.empty();
    try {
        m.decay_rate = fit_decay_rate(trace);
    } catch (const Error&) {
        m.decay_rate = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

namespace {

std::string join_counts(const std::vector<int>& counts) {
    std::string out;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (k > 0) out += ';';
        out += std::to_string(counts[k]);
    }
    return out;
}

double parse_number(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "metrics: bad number '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::vector<std::string> metrics_csv_columns() {
    return {"final_disagreement", "conservation_error", "events_total", "min_gap",
            "mean_gap",           "decay_rate",         "zeno_suspect", "events_per_agent"};
}

std::vector<std::string> metrics_csv_values(const RunMetrics& m) {
    return {format_number(m.final_disagreement),
            format_number(m.conservation_error),
            std::to_string(m.events_total),
            format_number(m.min_gap),
            format_number(m.mean_gap),
            format_number(m.decay_rate),
            m.zeno_suspect ? "1" : "0",
            join_counts(m.events_per_agent)};
}

void write_metrics_kv(std::ostream& out, const RunMetrics& m) {
    const auto cols = metrics_csv_columns();
    const auto vals = metrics_csv_values(m);
    for (std::size_t k = 0; k < cols.size(); ++k) out << cols[k] << '=' << vals[k] << '\n';
}

void write_metrics_csv(std::ostream& out, const RunMetrics& m) {
    const auto cols = metrics_csv_columns();
    const auto vals = metrics_csv_values(m);
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (std::size_t k = 0; k < vals.size(); ++k) out << (k ? "," : "") << vals[k];
    out << '\n';
}

std::vector<MetricsRow> read_metrics_table(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorKind::ParseError, "metrics: missing header");
    const auto names = split(header, ',');
    const auto columns = metrics_csv_columns();
    for (const auto& col : columns) {
        if (std::find(names.begin(), names.end(), col) == names.end()) {
            throw Error(ErrorKind::ParseError, "metrics: missing column '" + col + "'");
        }
    }
    std::vector<MetricsRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (names.size() != cells.size()) throw Error(ErrorKind::ParseError, "metrics: row width differs from header");
        std::map<std::string, std::string> kv;
        MetricsRow row;
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (std::find(columns.begin(), columns.end(), names[k]) == columns.end()) {
                row.params.emplace_back(names[k], parse_number(cells[k]));
            } else {
                kv[names[k]] = cells[k];
            }
        }
        RunMetrics& m = row.metrics;
        m.final_disagreement = parse_number(kv["final_disagreement"]);
        m.conservation_error = parse_number(kv["conservation_error"]);
        m.events_total = static_cast<int>(parse_number(kv["events_total"]));
        m.min_gap = parse_number(kv["min_gap"]);
        m.mean_gap = parse_number(kv["mean_gap"]);
        m.decay_rate = parse_number(kv["decay_rate"]);
        m.zeno_suspect = kv["zeno_suspect"] == "1";
        for (const auto& c : split(kv["events_per_agent"], ';')) {
            if (!c.empty()) m.events_per_agent.push_back(static_cast<int>(parse_number(c)));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorKind::ParseError, "metrics: no data rows");
    return rows;
}

RunMetrics read_metrics_csv(std::istream& in) { return read_metrics_table(in).front().metrics; }

}  // namespace etcon
