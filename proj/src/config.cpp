#include "etcon/config.hpp"

#include "etcon/error.hpp"
#include "etcon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace etcon {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError, field + ": expected a finite number, got '" + t + "'");
    }
    return v;
}

int parse_int(const std::string& text, const std::string& field) {
    const double v = parse_double(text, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw Error(ErrorKind::ParseError, field + ": expected an integer, got '" + trim(text) + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
    ConfigFile cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw Error(ErrorKind::ParseError, "config line " + std::to_string(line_no) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!cfg.sections_.count(section)) {
                cfg.sections_[section];
                cfg.order_.push_back(section);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::ParseError, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw Error(ErrorKind::ParseError, "config line " + std::to_string(line_no) + ": key outside any [section]");
        }
        cfg.sections_[section].push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
    }
    return cfg;
}

ConfigFile ConfigFile::parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open config '" + path.string() + "'");
    return parse(in);
}

bool ConfigFile::has_section(const std::string& section) const { return sections_.count(section) > 0; }

const std::vector<ConfigFile::Entry>& ConfigFile::entries(const std::string& section) const {
    static const std::vector<Entry> empty;
    const auto it = sections_.find(section);
    return it == sections_.end() ? empty : it->second;
}

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
    std::optional<std::string> out;
    for (const auto& e : entries(section)) {
        if (e.key == key) out = e.value;
    }
    return out;
}

std::vector<std::string> ConfigFile::sections() const { return order_; }

Vector InitialCondition::realize(int n) const {
    if (values) {
        if (values->size() != n) {
            throw Error(ErrorKind::InvalidParameter, "init.x0 has " + std::to_string(values->size()) +
                                                         " entries but the graph has " + std::to_string(n) + " vertices");
        }
        return *values;
    }
    XorShift64Star rng(seed);
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.uniform(lo, hi);
    return x;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_double(cell, field));
    if (out.empty()) throw Error(ErrorKind::ParseError, field + ": expected at least one number");
    return out;
}

namespace {

void reject_unknown_keys(const ConfigFile& file, const std::string& section, const std::vector<std::string>& known) {
    for (const auto& e : file.entries(section)) {
        if (std::find(known.begin(), known.end(), e.key) == known.end()) {
            throw Error(ErrorKind::ParseError, section + "." + e.key + " (line " + std::to_string(e.line) +
                                                   "): unknown key");
        }
    }
}

WeightedDigraph parse_graph_section(const ConfigFile& file, const std::filesystem::path& base_dir) {
    if (!file.has_section("graph")) throw Error(ErrorKind::ParseError, "missing [graph] section");
    reject_unknown_keys(file, "graph", {"file", "n", "kind", "edge"});
    if (const auto path = file.get("graph", "file")) {
        std::filesystem::path p(*path);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return load_graph_file(p.string());
    }
    const auto n_text = file.get("graph", "n");
    if (!n_text) throw Error(ErrorKind::ParseError, "graph.n: required when graph.file is absent");
    const int n = parse_int(*n_text, "graph.n");
    if (n <= 0) throw Error(ErrorKind::InvalidParameter, "graph.n must be positive");
    const std::string kind = file.get("graph", "kind").value_or("undirected");
    if (kind != "directed" && kind != "undirected") {
        throw Error(ErrorKind::ParseError, "graph.kind must be 'directed' or 'undirected'");
    }
    std::vector<Edge> edges;
    for (const auto& e : file.entries("graph")) {
        if (e.key != "edge") continue;
        std::istringstream ls(e.value);
        Edge edge;
        std::string extra;
        if (!(ls >> edge.from >> edge.to >> edge.weight) || (ls >> extra)) {
            throw Error(ErrorKind::ParseError, "graph.edge (line " + std::to_string(e.line) + "): expected 'i j w'");
        }
        edges.push_back(edge);
    }
    try {
        return WeightedDigraph::from_edges(n, edges, kind == "directed");
    } catch (const Error& err) {
        throw Error(err.kind(), std::string("graph.edge: ") + err.what());
    }
}

std::vector<double> sigma_list(const ConfigFile& file) {
    if (const auto v = file.get("law", "sigma_i")) return parse_number_list(*v, "law.sigma_i");
    if (const auto v = file.get("law", "sigma")) return parse_number_list(*v, "law.sigma");
    return {};
}

double required(const ConfigFile& file, const std::string& key) {
    const auto v = file.get("law", key);
    if (!v) throw Error(ErrorKind::ParseError, "law." + key + ": required for this law");
    return parse_double(*v, "law." + key);
}

TriggerLaw parse_law_section(const ConfigFile& file) {
    if (!file.has_section("law")) throw Error(ErrorKind::ParseError, "missing [law] section");
    const auto type = file.get("law", "type");
    if (!type) throw Error(ErrorKind::ParseError, "law.type: required");
    if (*type == "ideal") {
        reject_unknown_keys(file, "law", {"type"});
        return IdealLaw{};
    }
    if (*type == "centralized") {
        reject_unknown_keys(file, "law", {"type", "sigma"});
        const auto s = file.get("law", "sigma");
        return CentralizedNorm{s ? parse_double(*s, "law.sigma") : kDefaultSigma};
    }
    if (*type == "decentralized") {
        reject_unknown_keys(file, "law", {"type", "sigma", "sigma_i", "a"});
        return DecentralizedState{sigma_list(file), required(file, "a")};
    }
    if (*type == "time_dependent") {
        reject_unknown_keys(file, "law", {"type", "c0", "c1", "alpha"});
        return TimeDependent{required(file, "c0"), required(file, "c1"), required(file, "alpha")};
    }
    if (*type == "state_dependent") {
        reject_unknown_keys(file, "law", {"type", "sigma", "sigma_i"});
        return StateDependent{sigma_list(file)};
    }
    if (*type == "directed_state_dependent") {
        reject_unknown_keys(file, "law", {"type", "sigma", "sigma_i"});
        return DirectedStateDependent{sigma_list(file)};
    }
    if (*type == "periodic") {
        reject_unknown_keys(file, "law", {"type", "sigma", "sigma_i", "h"});
        return PeriodicStateDependent{sigma_list(file), required(file, "h")};
    }
    throw Error(ErrorKind::ParseError, "law.type: unknown law '" + *type + "'");
}

InitialCondition parse_init(const std::string& text) {
    InitialCondition init;
    const std::string t = trim(text);
    if (t.rfind("random(", 0) == 0) {
        if (t.back() != ')') throw Error(ErrorKind::ParseError, "init.x0: expected random(seed, lo, hi)");
        const auto args = parse_number_list(t.substr(7, t.size() - 8), "init.x0");
        if (args.size() != 3 || args[0] < 0 || args[0] != std::floor(args[0])) {
            throw Error(ErrorKind::ParseError, "init.x0: expected random(seed, lo, hi) with integer seed >= 0");
        }
        if (!(args[1] < args[2])) throw Error(ErrorKind::InvalidParameter, "init.x0: random range needs lo < hi");
        init.seed = static_cast<std::uint64_t>(args[0]);
        init.lo = args[1];
        init.hi = args[2];
        return init;
    }
    const auto values = parse_number_list(t, "init.x0");
    init.values = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    return init;
}

void parse_sim_into(const ConfigFile& file, SimConfig& sim) {
    reject_unknown_keys(file, "sim",
                        {"dt", "horizon", "event_tol", "zeno_floor", "sample_every", "max_events_per_window"});
    TriggerLaw unused = IdealLaw{};
    for (const auto& e : file.entries("sim")) {
        const std::string field = "sim." + e.key;
        const bool integral = e.key == "sample_every" || e.key == "max_events_per_window";
        apply_parameter(unused, sim, field, integral ? parse_int(e.value, field) : parse_double(e.value, field));
    }
}

}  // namespace

void apply_parameter(TriggerLaw& law, SimConfig& sim, const std::string& name, double value) {
    auto unknown = [&] {
        return Error(ErrorKind::InvalidParameter, name + ": not a field of the configured law '" + law_name(law) + "'");
    };
    if (name.rfind("sim.", 0) == 0) {
        const std::string f = name.substr(4);
        const bool count = f == "sample_every" || f == "max_events_per_window";
        const bool zero_ok = f == "dt" || f == "event_tol";  // 0 selects the default
        const bool ok = count ? value >= 1.0 : zero_ok ? value >= 0.0 : value > 0.0;
        if (!ok || !std::isfinite(value)) {
            throw Error(ErrorKind::InvalidParameter,
                        name + (count ? ": must be >= 1" : zero_ok ? ": must be >= 0" : ": must be > 0"));
        }
        if (f == "dt") sim.dt = value;
        else if (f == "horizon") sim.horizon = value;
        else if (f == "event_tol") sim.event_tol = value;
        else if (f == "zeno_floor") sim.zeno_floor = value;
        else if (f == "sample_every") sim.sample_every = static_cast<int>(value);
        else if (f == "max_events_per_window") sim.max_events_per_window = static_cast<int>(value);
        else throw Error(ErrorKind::InvalidParameter, name + ": unknown sim field");
        return;
    }
    if (name.rfind("law.", 0) != 0) throw Error(ErrorKind::InvalidParameter, name + ": must start with law. or sim.");
    const std::string f = name.substr(4);
    if (auto* c = std::get_if<CentralizedNorm>(&law)) {
        if (f == "sigma") return void(c->sigma = value);
    } else if (auto* d = std::get_if<DecentralizedState>(&law)) {
        if (f == "sigma" || f == "sigma_i") return void(d->sigma_i = {value});
        if (f == "a") return void(d->a = value);
    } else if (auto* td = std::get_if<TimeDependent>(&law)) {
        if (f == "c0") return void(td->c0 = value);
        if (f == "c1") return void(td->c1 = value);
        if (f == "alpha") return void(td->alpha = value);
    } else if (auto* s = std::get_if<StateDependent>(&law)) {
        if (f == "sigma" || f == "sigma_i") return void(s->sigma_i = {value});
    } else if (auto* ds = std::get_if<DirectedStateDependent>(&law)) {
        if (f == "sigma" || f == "sigma_i") return void(ds->sigma_i = {value});
    } else if (auto* p = std::get_if<PeriodicStateDependent>(&law)) {
        if (f == "sigma" || f == "sigma_i") return void(p->sigma_i = {value});
        if (f == "h") return void(p->h = value);
    }
    throw unknown();
}

std::vector<std::vector<double>> sweep_points(const std::vector<SweepAxis>& sweep) {
    std::vector<std::vector<double>> points{{}};
    for (const auto& axis : sweep) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : points) {
            for (double v : axis.values) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        }
        points = std::move(next);
    }
    return points;
}

ExperimentConfig parse_experiment(const ConfigFile& file, const std::filesystem::path& base_dir) {
    for (const auto& s : file.sections()) {
        if (s != "graph" && s != "law" && s != "init" && s != "sim" && s != "output" && s != "sweep") {
            throw Error(ErrorKind::ParseError, "unknown section [" + s + "]");
        }
    }
    ExperimentConfig cfg;
    cfg.graph = parse_graph_section(file, base_dir);
    cfg.law = parse_law_section(file);
    reject_unknown_keys(file, "init", {"x0"});
    const auto x0 = file.get("init", "x0");
    if (!x0) throw Error(ErrorKind::ParseError, "init.x0: required");
    cfg.x0 = parse_init(*x0);
    (void)cfg.x0.realize(cfg.graph.size());
    parse_sim_into(file, cfg.sim);
    reject_unknown_keys(file, "output", {"dir"});
    if (const auto dir = file.get("output", "dir")) {
        std::filesystem::path p(*dir);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        cfg.output_dir = p.string();
    }
    for (const auto& e : file.entries("sweep")) {
        SweepAxis axis{e.key, parse_number_list(e.value, "sweep." + e.key)};
        // Dry-run the assignment so a misspelled field fails at load time.
        TriggerLaw law = cfg.law;
        SimConfig sim = cfg.sim;
        apply_parameter(law, sim, axis.parameter, axis.values.front());
        cfg.sweep.push_back(std::move(axis));
    }
    // Surface law/graph mismatches before any simulation starts.
    (void)validate_law(cfg.law, cfg.graph);
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    return parse_experiment(ConfigFile::load(path), path.parent_path());
}

namespace {

Matrix parse_matrix(const ConfigFile& file, const std::string& key, Eigen::Index rows, Eigen::Index cols) {
    const auto text = file.get("system", key);
    if (!text) throw Error(ErrorKind::ParseError, "system." + key + ": required");
    const auto values = parse_number_list(*text, "system." + key);
    if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
        throw Error(ErrorKind::DimensionMismatch, "system." + key + ": expected " + std::to_string(rows * cols) +
                                                      " row-major entries, got " + std::to_string(values.size()));
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
    }
    return m;
}

}  // namespace

LinearEtConfig parse_linear_et(const ConfigFile& file) {
    for (const auto& s : file.sections()) {
        if (s != "system" && s != "init" && s != "sim" && s != "output") {
            throw Error(ErrorKind::ParseError, "unknown section [" + s + "] for linear-et");
        }
    }
    reject_unknown_keys(file, "system", {"n", "m", "A", "B", "K", "Q", "R", "As"});
    const auto n_text = file.get("system", "n");
    if (!n_text) throw Error(ErrorKind::ParseError, "system.n: required");
    const int n = parse_int(*n_text, "system.n");
    const int m = file.get("system", "m") ? parse_int(*file.get("system", "m"), "system.m") : n;
    if (n <= 0 || m <= 0) throw Error(ErrorKind::InvalidParameter, "system.n and system.m must be positive");
    LinearEtConfig cfg;
    cfg.system.A = parse_matrix(file, "A", n, n);
    cfg.system.B = parse_matrix(file, "B", n, m);
    cfg.system.K = parse_matrix(file, "K", m, n);
    cfg.system.Q = parse_matrix(file, "Q", n, n);
    cfg.system.R = parse_matrix(file, "R", n, n);
    if (file.get("system", "As")) cfg.system.As = parse_matrix(file, "As", n, n);
    reject_unknown_keys(file, "init", {"x0"});
    const auto x0 = file.get("init", "x0");
    if (!x0) throw Error(ErrorKind::ParseError, "init.x0: required");
    cfg.x0 = parse_init(*x0).realize(n);
    reject_unknown_keys(file, "sim", {"horizon", "t_max", "grid_points", "samples_per_interval"});
    if (const auto v = file.get("sim", "horizon")) cfg.horizon = parse_double(*v, "sim.horizon");
    if (const auto v = file.get("sim", "t_max")) cfg.t_max = parse_double(*v, "sim.t_max");
    if (const auto v = file.get("sim", "grid_points")) cfg.grid_points = parse_int(*v, "sim.grid_points");
    if (const auto v = file.get("sim", "samples_per_interval")) {
        cfg.samples_per_interval = parse_int(*v, "sim.samples_per_interval");
    }
    if (!(cfg.horizon > 0.0)) throw Error(ErrorKind::InvalidParameter, "sim.horizon must be > 0");
    if (cfg.t_max < 0.0) throw Error(ErrorKind::InvalidParameter, "sim.t_max must be >= 0");
    if (cfg.grid_points < 2) throw Error(ErrorKind::InvalidParameter, "sim.grid_points must be >= 2");
    if (cfg.samples_per_interval < 2) throw Error(ErrorKind::InvalidParameter, "sim.samples_per_interval must be >= 2");
    reject_unknown_keys(file, "output", {"dir"});
    if (const auto dir = file.get("output", "dir")) cfg.output_dir = *dir;
    return cfg;
}

LinearEtConfig load_linear_et(const std::filesystem::path& path) {
    auto cfg = parse_linear_et(ConfigFile::load(path));
    std::filesystem::path out(cfg.output_dir);
    if (out.is_relative()) cfg.output_dir = (path.parent_path() / out).string();
    return cfg;
}

}  // namespace etcon
