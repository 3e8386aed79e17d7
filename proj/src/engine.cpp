#include "etcon/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <variant>

namespace etcon {

ZenoAbortError::ZenoAbortError(int agent, double t, Trace partial)
    : Error(ErrorKind::ZenoAbort, "agent " + std::to_string(agent) + " exceeded " +
                                      std::to_string(partial.config.max_events_per_window) +
                                      " events within one step near t = " + format_number(t)),
      agent_(agent),
      t_(t),
      partial_(std::move(partial)) {}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

SimConfig resolve_config(const SimConfig& cfg, const SpectralInfo& spec, const TriggerLaw& law) {
    SimConfig out = cfg;
    if (!(out.horizon > 0.0) || !std::isfinite(out.horizon)) {
        throw Error(ErrorKind::InvalidParameter, "sim.horizon must be > 0");
    }
    if (out.dt < 0.0) throw Error(ErrorKind::InvalidParameter, "sim.dt must be > 0");
    if (out.dt == 0.0) out.dt = 0.01 / spec.lambdaN;
    if (const auto* p = std::get_if<PeriodicStateDependent>(&law)) {
        const double per_period = std::ceil(p->h / out.dt - 1e-9);
        out.dt = p->h / std::max(1.0, per_period);
    }
    out.dt = std::min(out.dt, out.horizon);
    if (out.event_tol < 0.0) throw Error(ErrorKind::InvalidParameter, "sim.event_tol must be > 0");
    if (out.event_tol == 0.0) out.event_tol = 1e-3 * out.dt;
    if (!(out.event_tol < out.dt)) throw Error(ErrorKind::InvalidParameter, "sim.event_tol must be < dt");
    if (out.zeno_floor < 0.0 || !(out.zeno_floor < out.dt)) {
        throw Error(ErrorKind::InvalidParameter, "sim.zeno_floor must lie in [0, dt)");
    }
    if (out.sample_every < 1) throw Error(ErrorKind::InvalidParameter, "sim.sample_every must be >= 1");
    if (out.max_events_per_window < 1) {
        throw Error(ErrorKind::InvalidParameter, "sim.max_events_per_window must be >= 1");
    }
    return out;
}

namespace {

// Runs integrate deviations from the network mean. L1 = 0 and every trigger
// reads only differences, so the shift is exact, and it keeps rounding
// proportional to the disagreement instead of to |x| once consensus is close.
Vector restore(const Vector& dev, double mean0) { return (dev.array() + mean0).matrix(); }

void record_sample(Trace& trace, double t, const Vector& dev, const Vector& dev_hat, double mean0) {
    trace.times.push_back(t);
    trace.states.push_back(restore(dev, mean0));
    trace.xhats.push_back(restore(dev_hat, mean0));
    trace.lyapunov.push_back(0.5 * dev.squaredNorm());
}

std::int64_t step_count(const SimConfig& cfg) {
    return static_cast<std::int64_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
}

/// Sample-and-hold closed loop. One instance per run; nothing is shared.
class TriggeredRun {
public:
    TriggeredRun(const WeightedDigraph& g, TriggerLaw law, const Vector& x0, const SimConfig& cfg,
                 const SpectralInfo& spec)
        : g_(g),
          law_(std::move(law)),
          cfg_(cfg),
          n_(g.size()),
          L_(laplacian(g)),
          normL_(spec.laplacian_norm),
          mean0_(x0.mean()),
          x_((x0.array() - mean0_).matrix()),
          xhat_(x_),
          last_event_(Vector::Constant(g.size(), -std::numeric_limits<double>::infinity())),
          window_counts_(g.size(), 0) {
        trace_.n = n_;
        trace_.config = cfg_;
        trace_.x0 = x0;
        views_.reserve(n_);
        for (int i = 0; i < n_; ++i) views_.push_back(make_agent_view(g_, i, x_, xhat_, 0.0));
    }

    Trace run() {
        broadcast_all(0.0);
        record_sample(trace_, 0.0, x_, xhat_, center_);
        if (const auto* p = std::get_if<PeriodicStateDependent>(&law_)) {
            run_periodic(*p);
        } else {
            run_continuous();
        }
        trace_.final_state = final_state();
        return std::move(trace_);
    }

private:
    Vector drift() const { return -(L_ * xhat_); }

    NetworkState final_state() const {
        return NetworkState{t_, restore(x_, center_), restore(xhat_, center_), last_event_};
    }

    /// Moves the rounding residue of the mean out of the working coordinates.
    void recenter() {
        const double d = x_.mean();
        x_.array() -= d;
        xhat_.array() -= d;
        center_ += d;
    }

    /// State at time s >= t_ under the current hold.
    Vector state_at(double s) const {
        const Vector v = drift();
        return rk4_step([&v](const Vector&) { return v; }, x_, s - t_);
    }

    bool agent_fires(int i, const Vector& x, double t) {
        AgentView& view = views_[i];
        view.x_i = x(i);
        view.xhat_i = xhat_(i);
        view.t = t;
        for (auto& nb : view.xhat_neighbors) nb.xhat_j = xhat_(nb.j);
        return std::visit(
            [&](const auto& law) -> bool {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, DecentralizedState>) {
                    std::vector<NeighborState> exact;
                    exact.reserve(view.xhat_neighbors.size());
                    for (const auto& nb : view.xhat_neighbors) exact.push_back({nb.j, x(nb.j)});
                    return eval_decentralized_state(view, law.sigma_i[i], law.a, exact);
                } else if constexpr (std::is_same_v<T, TimeDependent>) {
                    return eval_time_dependent(view.error(), t, law.c0, law.c1, law.alpha);
                } else if constexpr (std::is_same_v<T, StateDependent>) {
                    return eval_state_dependent(view, law.sigma_i[i]);
                } else if constexpr (std::is_same_v<T, DirectedStateDependent> ||
                                     std::is_same_v<T, PeriodicStateDependent>) {
                    return eval_directed_state_dependent(view, law.sigma_i[i]);
                } else {
                    return false;
                }
            },
            law_);
    }

    bool any_fires(const Vector& x, double t) {
        if (const auto* c = std::get_if<CentralizedNorm>(&law_)) {
            return eval_centralized(c->sigma, x, xhat_, L_, normL_);
        }
        for (int i = 0; i < n_; ++i) {
            if (agent_fires(i, x, t)) return true;
        }
        return false;
    }

    void note_event(int agent, double t) {
        if (t - last_event_(agent) < cfg_.zeno_floor) trace_.zeno_flags.push_back({agent, t});
        last_event_(agent) = t;
        if (++window_counts_[agent] > cfg_.max_events_per_window) {
            trace_.final_state = final_state();
            throw ZenoAbortError(agent, t, std::move(trace_));
        }
    }

    void broadcast_all(double t) {
        xhat_ = x_;
        if (std::holds_alternative<CentralizedNorm>(law_)) {
            trace_.events.push_back({t, kAllAgents, xhat_.sum() + n_ * center_});
            for (int i = 0; i < n_; ++i) note_event(i, t);
            return;
        }
        for (int i = 0; i < n_; ++i) {
            trace_.events.push_back({t, i, xhat_(i) + center_});
            note_event(i, t);
        }
    }

    void fire(int i, double t) {
        xhat_(i) = x_(i);
        trace_.events.push_back({t, i, xhat_(i) + center_});
        note_event(i, t);
    }

    /// Fires every agent whose predicate holds at the current instant, repeating
    /// sweeps in ascending id order until a sweep fires nobody.
    void cascade(double event_time) {
        if (const auto* c = std::get_if<CentralizedNorm>(&law_)) {
            if (eval_centralized(c->sigma, x_, xhat_, L_, normL_)) broadcast_all(event_time);
            return;
        }
        bool fired = true;
        while (fired) {
            fired = false;
            for (int i = 0; i < n_; ++i) {
                if (agent_fires(i, x_, t_)) {
                    fire(i, event_time);
                    fired = true;
                }
            }
        }
    }

    void reset_window() { std::fill(window_counts_.begin(), window_counts_.end(), 0); }

    void run_continuous() {
        const std::int64_t steps = step_count(cfg_);
        std::int64_t k = 0;
        while (k < steps) {
            const double t_next = std::min(static_cast<double>(k + 1) * cfg_.dt, cfg_.horizon);
            const Vector x_next = state_at(t_next);
            if (!any_fires(x_next, t_next)) {
                x_ = x_next;
                t_ = t_next;
                ++k;
                reset_window();
                if (k % cfg_.sample_every == 0 || k == steps) record_sample(trace_, t_, x_, xhat_, center_);
                continue;
            }
            double lo = t_;
            double hi = t_next;
            while (hi - lo > cfg_.event_tol) {
                const double mid = 0.5 * (lo + hi);
                if (any_fires(state_at(mid), mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            x_ = state_at(hi);
            t_ = hi;
            cascade(hi);
            recenter();
        }
    }

    void run_periodic(const PeriodicStateDependent& law) {
        const std::int64_t steps = step_count(cfg_);
        const auto per_period = static_cast<std::int64_t>(std::llround(law.h / cfg_.dt));
        for (std::int64_t k = 1; k <= steps; ++k) {
            const double t_next = std::min(static_cast<double>(k) * cfg_.dt, cfg_.horizon);
            x_ = state_at(t_next);
            t_ = t_next;
            reset_window();
            if (k % per_period == 0 && t_next == static_cast<double>(k) * cfg_.dt) {
                cascade(static_cast<double>(k / per_period) * law.h);
                recenter();
            }
            if (k % cfg_.sample_every == 0 || k == steps) record_sample(trace_, t_, x_, xhat_, center_);
        }
    }

    const WeightedDigraph& g_;
    TriggerLaw law_;
    SimConfig cfg_;
    int n_;
    Matrix L_;
    double normL_;
    double mean0_;
    double center_ = mean0_;
    double t_ = 0.0;
    Vector x_;
    Vector xhat_;
    Vector last_event_;
    std::vector<int> window_counts_;
    std::vector<AgentView> views_;
    Trace trace_;
};

void require_state_size(const WeightedDigraph& g, const Vector& x0) {
    if (x0.size() != g.size()) {
        throw Error(ErrorKind::DimensionMismatch, "x0 has " + std::to_string(x0.size()) + " entries but graph has " +
                                                      std::to_string(g.size()) + " vertices");
    }
}

}  // namespace

Trace simulate_ideal(const WeightedDigraph& g, const Vector& x0, const SimConfig& cfg) {
    require_consensus_graph(g);
    require_state_size(g, x0);
    const SimConfig rc = resolve_config(cfg, spectral_info(g), IdealLaw{});
    const Matrix L = laplacian(g);
    const double mean0 = x0.mean();
    Trace trace;
    trace.n = g.size();
    trace.config = rc;
    trace.x0 = x0;
    Vector x = (x0.array() - mean0).matrix();
    record_sample(trace, 0.0, x, x, mean0);
    const std::int64_t steps = step_count(rc);
    double t = 0.0;
    for (std::int64_t k = 1; k <= steps; ++k) {
        const double t_next = std::min(static_cast<double>(k) * rc.dt, rc.horizon);
        x = rk4_step([&L](const Vector& v) -> Vector { return -(L * v); }, x, t_next - t);
        t = t_next;
        if (k % rc.sample_every == 0 || k == steps) record_sample(trace, t, x, x, mean0);
    }
    const Vector xf = restore(x, mean0);
    trace.final_state = NetworkState{t, xf, xf, Vector::Constant(g.size(), -std::numeric_limits<double>::infinity())};
    return trace;
}

Trace simulate_triggered(const WeightedDigraph& g, const TriggerLaw& law, const Vector& x0, const SimConfig& cfg) {
    if (std::holds_alternative<IdealLaw>(law)) return simulate_ideal(g, x0, cfg);
    require_consensus_graph(g);
    require_state_size(g, x0);
    const TriggerLaw checked = validate_law(law, g);
    const SpectralInfo spec = spectral_info(g);
    const SimConfig rc = resolve_config(cfg, spec, checked);
    TriggeredRun run(g, checked, x0, rc, spec);
    return run.run();
}

double min_inter_event_bound_centralized(const WeightedDigraph& g, double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw Error(ErrorKind::InvalidParameter, "sigma must lie in (0,1)");
    const double norm = spectral_info(g).laplacian_norm;
    return sigma / (norm * (1.0 + sigma));
}

double convergence_radius_time_trigger(const WeightedDigraph& g, double c0) {
    if (c0 < 0.0) throw Error(ErrorKind::InvalidParameter, "c0 must be >= 0");
    const SpectralInfo spec = spectral_info(g);
    return spec.laplacian_norm * std::sqrt(static_cast<double>(g.size())) * c0 / spec.lambda2;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << 't';
    for (int i = 0; i < trace.n; ++i) out << ",x_" << i;
    for (int i = 0; i < trace.n; ++i) out << ",xhat_" << i;
    out << ",V\n";
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        out << format_number(trace.times[k]);
        for (int i = 0; i < trace.n; ++i) out << ',' << format_number(trace.states[k](i));
        for (int i = 0; i < trace.n; ++i) out << ',' << format_number(trace.xhats[k](i));
        out << ',' << format_number(trace.lyapunov[k]) << '\n';
    }
}

void write_events_csv(std::ostream& out, const std::vector<EventRecord>& events) {
    out << "t,agent,value\n";
    for (const auto& e : events) {
        out << format_number(e.t) << ',';
        if (e.agent == kAllAgents) {
            out << "ALL";
        } else {
            out << e.agent;
        }
        out << ',' << format_number(e.value) << '\n';
    }
}

}  // namespace etcon
