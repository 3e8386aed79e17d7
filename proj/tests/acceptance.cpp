// Acceptance checks against the closed-form bounds. One PASS/FAIL line per
// criterion; exit status is nonzero if any criterion fails.
#include "etcon/engine.hpp"
#include "etcon/graph.hpp"
#include "etcon/linear_et.hpp"
#include "etcon/metrics.hpp"
#include "etcon/rng.hpp"
#include "etcon/triggers.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace etcon;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string fingerprint;  // metrics text of every run, for the determinism check

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
    void record(const RunMetrics& m) {
        for (const auto& v : metrics_csv_values(m)) fingerprint += v + ',';
        fingerprint += '\n';
    }
};

std::string fmt(double v) { return format_number(v); }

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) out(k++) = x;
    return out;
}

// Per-agent inter-event gaps recomputed straight from the event log.
double min_gap_from_log(const std::vector<EventRecord>& events) {
    std::map<int, double> last;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : events) {
        const auto it = last.find(e.agent);
        if (it != last.end()) best = std::min(best, e.t - it->second);
        last[e.agent] = e.t;
    }
    return best;
}

SimConfig horizon(double t) {
    SimConfig cfg;
    cfg.horizon = t;
    return cfg;
}

Outcome ideal_consensus() {
    Outcome out;
    XorShift64Star rng(101);
    double worst_fd = 0.0, worst_ratio = 1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 2 + static_cast<int>(seed % 5);
        const auto g = random_connected_undirected(n, 1000 + seed, 0.4, 0.5, 2.0);
        const double l2 = spectral_info(g).lambda2;
        const auto tr = simulate_ideal(g, testing::random_vector(n, rng), horizon(20.0 / l2));
        const auto m = compute_metrics(tr);
        out.record(m);
        worst_fd = std::max(worst_fd, m.final_disagreement);
        worst_ratio = std::min(worst_ratio, m.decay_rate / l2);
        out.require(m.final_disagreement <= 1e-6, "final_disagreement " + fmt(m.final_disagreement));
        out.require(m.conservation_error <= 1e-8, "conservation_error " + fmt(m.conservation_error));
        out.require(m.decay_rate >= 0.9 * l2, "decay_rate/lambda2 " + fmt(m.decay_rate / l2));
    }
    if (out.pass) out.detail = "max fd " + fmt(worst_fd) + ", min decay/lambda2 " + fmt(worst_ratio);
    return out;
}

Outcome centralized_floor() {
    Outcome out;
    XorShift64Star rng(202);
    const std::vector<std::pair<WeightedDigraph, Vector>> cases{
        {path_graph(2), vec({1, -1})},
        {complete_graph(3), vec({1, 0, 0})},
        {random_connected_undirected(5, 7), testing::random_vector(5, rng)},
    };
    double worst_slack = 1e300;
    for (const auto& [g, x0] : cases) {
        for (double sigma : {0.1, 0.5, 0.9}) {
            const auto tr = simulate_triggered(g, CentralizedNorm{sigma}, x0, horizon(50.0));
            const auto m = compute_metrics(tr);
            out.record(m);
            const double tau = min_inter_event_bound_centralized(g, sigma);
            const double gap = min_gap_from_log(tr.events);
            worst_slack = std::min(worst_slack, gap - tau);
            out.require(gap >= tau - tr.config.event_tol, "gap " + fmt(gap) + " < tau " + fmt(tau));
            out.require(m.final_disagreement <= 1e-4, "final_disagreement " + fmt(m.final_disagreement));
        }
    }
    if (out.pass) out.detail = "min(gap - tau) " + fmt(worst_slack);
    return out;
}

Outcome time_dependent_radius() {
    Outcome out;
    for (const auto& [g, x0] : {std::pair{path_graph(2), vec({1, -1})}, std::pair{complete_graph(3), vec({1, 0, 0})}}) {
        const auto spec = spectral_info(g);
        const auto bounded = compute_metrics(
            simulate_triggered(g, TimeDependent{0.1, 0.5, 0.5 * spec.lambda2}, x0, horizon(50.0)));
        out.record(bounded);
        const double r = convergence_radius_time_trigger(g, 0.1);
        out.require(bounded.final_disagreement <= r + 1e-6,
                    "fd " + fmt(bounded.final_disagreement) + " > r " + fmt(r));

        const auto exact = compute_metrics(
            simulate_triggered(g, TimeDependent{0.0, 0.5, 0.5 * spec.lambda2}, x0, horizon(50.0)));
        out.record(exact);
        out.require(exact.final_disagreement <= 1e-3, "c0 = 0 fd " + fmt(exact.final_disagreement));
        out.require(!exact.zeno_suspect, "c0 = 0 run flagged zeno_suspect");
        if (out.pass) out.detail += "fd " + fmt(bounded.final_disagreement) + " <= r " + fmt(r) + "; ";
    }
    return out;
}

Outcome state_dependent_lyapunov() {
    Outcome out;
    XorShift64Star rng(404);
    double worst_rise = -1e300;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);
        const auto g = random_connected_undirected(n, 4000 + seed, 0.4, 0.5, 1.5);
        const auto tr = simulate_triggered(g, StateDependent{{0.5}}, testing::random_vector(n, rng), horizon(30.0));
        const auto m = compute_metrics(tr);
        out.record(m);
        for (std::size_t k = 1; k < tr.lyapunov.size(); ++k) {
            worst_rise = std::max(worst_rise, tr.lyapunov[k] - tr.lyapunov[k - 1]);
        }
        out.require(m.final_disagreement <= 1e-4, "final_disagreement " + fmt(m.final_disagreement));
    }
    out.require(worst_rise <= 1e-7, "V increased by " + fmt(worst_rise));
    if (out.pass) out.detail = "max V step change " + fmt(worst_rise);
    return out;
}

Outcome directed_law() {
    Outcome out;
    XorShift64Star rng(505);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);
        const auto g = random_balanced_digraph(n, 5000 + seed);
        const auto m = compute_metrics(
            simulate_triggered(g, DirectedStateDependent{{0.5}}, testing::random_vector(n, rng), horizon(50.0)));
        out.record(m);
        out.require(m.final_disagreement <= 1e-4, "final_disagreement " + fmt(m.final_disagreement));
        out.require(m.conservation_error <= 1e-8, "conservation_error " + fmt(m.conservation_error));
    }
    double worst_shift = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);
        const auto g = random_connected_undirected(n, 5500 + seed);
        const Vector x0 = testing::random_vector(n, rng);
        const auto a = simulate_triggered(g, StateDependent{{0.5}}, x0, horizon(20.0));
        const auto b = simulate_triggered(g, DirectedStateDependent{{0.5}}, x0, horizon(20.0));
        out.record(compute_metrics(b));
        out.require(a.events.size() == b.events.size(), "event counts differ on unit-weight undirected graph");
        if (a.events.size() != b.events.size()) continue;
        for (std::size_t k = 0; k < a.events.size(); ++k) {
            worst_shift = std::max(worst_shift, std::abs(a.events[k].t - b.events[k].t));
            out.require(a.events[k].agent == b.events[k].agent, "event order differs");
        }
        out.require(worst_shift <= a.config.event_tol, "event times differ by " + fmt(worst_shift));
    }
    if (out.pass) out.detail = "max undirected/directed event shift " + fmt(worst_shift);
    return out;
}

Outcome periodic_law() {
    Outcome out;
    XorShift64Star rng(606);
    std::vector<WeightedDigraph> graphs{random_connected_undirected(4, 61), random_connected_undirected(6, 62, 0.4, 0.5, 1.5)};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) graphs.push_back(random_balanced_digraph(3 + seed, 6000 + seed));
    for (const auto& g : graphs) {
        const double h = 0.5 * max_admissible_period(g, {0.5});
        const auto tr = simulate_triggered(g, PeriodicStateDependent{{0.5}, h}, testing::random_vector(g.size(), rng),
                                           horizon(50.0));
        const auto m = compute_metrics(tr);
        out.record(m);
        out.require(m.final_disagreement <= 1e-4, "final_disagreement " + fmt(m.final_disagreement));
        for (const auto& e : tr.events) out.require(e.t == std::round(e.t / h) * h, "event off the grid at " + fmt(e.t));
        const double gap = min_gap_from_log(tr.events);
        out.require(gap >= h * (1.0 - 1e-12), "gap " + fmt(gap) + " < h " + fmt(h));
    }
    if (out.pass) out.detail = std::to_string(graphs.size()) + " graphs, all events on the h-grid";
    return out;
}

Outcome linear_toolkit() {
    Outcome out;
    XorShift64Star rng(707);
    double worst_margin = 1e300, worst_res = 0.0, worst_vs = -1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 1 + static_cast<int>(seed % 4);
        const auto sys = testing::random_stable_system(n, 7000 + seed);
        const auto lyap = prepare_lyapunov(sys);
        const auto table = tabulate_gap(lyap, default_scan_window(lyap));
        const double t_min = min_inter_event_time(lyap, table);
        const double res = scaled_det_residual(lyap, t_min);
        worst_res = std::max(worst_res, res);
        out.require(t_min > 0.0, "t_min not positive");
        out.require(res <= 1e-8, "det residual " + fmt(res));
        out.fingerprint += fmt(t_min) + ',' + fmt(res) + '\n';
        for (int k = 0; k < 20; ++k) {
            const Vector x = testing::random_vector(n, rng);
            if (const auto t = next_event_time(lyap, table, x)) {
                worst_margin = std::min(worst_margin, *t - t_min);
                out.require(*t >= t_min - 1e-8, "next_event_time below t_min by " + fmt(t_min - *t));
                out.fingerprint += fmt(*t) + ',';
            }
            const auto tr = simulate_linear_et(sys, lyap, table, x, 5.0, 16);
            for (std::size_t s = 0; s < tr.V.size(); ++s) worst_vs = std::max(worst_vs, tr.V[s] - tr.S[s]);
        }
    }
    out.require(worst_vs <= 1e-8, "V exceeds S by " + fmt(worst_vs));
    if (out.pass) {
        out.detail = "min(t* - t_min) " + fmt(worst_margin) + ", max det residual " + fmt(worst_res) +
                     ", max(V - S) " + fmt(worst_vs);
    }
    return out;
}

Outcome decentralized_zeno_flag() {
    Outcome out;
    XorShift64Star rng(808);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);
        const auto g = random_connected_undirected(n, 8000 + seed);
        const double a = 0.5 / g.max_out_neighbor_count();
        const auto tr = simulate_triggered(g, DecentralizedState{{0.5}, a}, testing::random_vector(n, rng),
                                           horizon(50.0));
        const auto m = compute_metrics(tr);
        out.record(m);
        out.require(m.final_disagreement <= 1e-4, "final_disagreement " + fmt(m.final_disagreement));
        out.require(m.zeno_suspect == (min_gap_from_log(tr.events) < tr.config.zeno_floor), "flag inconsistent");
    }

    // Adversarial runs at sigma_i = 0.999, event_tol fine enough to resolve sub-floor gaps.
    SimConfig cfg = horizon(20.0);
    cfg.event_tol = 1e-10;
    cfg.zeno_floor = 1e-7;
    const auto pair = simulate_triggered(path_graph(2), DecentralizedState{{0.999}, 0.5}, vec({1, -1}), cfg);
    const auto pm = compute_metrics(pair);
    out.record(pm);
    const double pair_gap = min_gap_from_log(pair.events);
    out.require(pm.final_disagreement <= 1e-4, "two-agent fd " + fmt(pm.final_disagreement));
    out.require(pm.zeno_suspect == (pair_gap < cfg.zeno_floor), "two-agent flag inconsistent with its gaps");

    const auto path = simulate_triggered(path_graph(3), DecentralizedState{{0.999}, 0.25}, vec({1, 0.2, -1}), cfg);
    const auto qm = compute_metrics(path);
    out.record(qm);
    const double path_gap = min_gap_from_log(path.events);
    out.require(path_gap < cfg.zeno_floor, "three-agent run produced no sub-floor gap (" + fmt(path_gap) + ")");
    out.require(qm.zeno_suspect, "sub-floor gap " + fmt(path_gap) + " not flagged");
    out.require(!path.zeno_flags.empty(), "engine recorded no zeno flag");
    if (out.pass) {
        out.detail = "two-agent min gap " + fmt(pair_gap) + " (flag " + (pm.zeno_suspect ? "1" : "0") +
                     "), three-agent min gap " + fmt(path_gap) + " flagged";
    }
    return out;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "ideal consensus", ideal_consensus},
        {2, "centralized inter-event floor", centralized_floor},
        {3, "time-dependent convergence radius", time_dependent_radius},
        {4, "state-dependent Lyapunov decrease", state_dependent_lyapunov},
        {5, "directed weight-balanced law", directed_law},
        {6, "periodic law on the sampling grid", periodic_law},
        {7, "linear event-triggered lower bound", linear_toolkit},
        {8, "decentralized law and zeno flag", decentralized_zeno_flag},
    };

    bool all = true;
    std::vector<std::string> fingerprints;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s (%s) [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
        all = all && o.pass;
        fingerprints.push_back(o.fingerprint);
    }

    bool same = true;
    std::string differing;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        std::string again;
        try {
            again = criteria[k].run().fingerprint;
        } catch (const std::exception&) {
        }
        if (again != fingerprints[k] || fingerprints[k].empty()) {
            same = false;
            differing += std::to_string(criteria[k].id) + ' ';
        }
    }
    std::printf("%s criterion 9: determinism (%s)\n", same ? "PASS" : "FAIL",
                same ? "repeated runs of criteria 1-8 give byte-identical metrics"
                     : ("metrics differ for criteria " + differing).c_str());
    all = all && same;
    return all ? 0 : 1;
}
