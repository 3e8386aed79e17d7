#pragma once

#include "etcon/error.hpp"
#include "etcon/graph.hpp"
#include "etcon/triggers.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace etcon {

/// Agent id used by whole-network (centralized) updates.
inline constexpr int kAllAgents = -1;

/// Per-agent events allowed inside one integrator step before the run is
/// declared Zeno and aborted.
inline constexpr int kMaxEventsPerWindow = 10000;

/// Numerical settings. Zero-valued dt / event_tol mean "derive from the graph":
/// dt = 0.01 / lambda_N and event_tol = 1e-3 dt.
struct SimConfig {
    double dt = 0.0;
    double horizon = 10.0;
    double event_tol = 0.0;
    double zeno_floor = 1e-7;
    int sample_every = 1;
    int max_events_per_window = kMaxEventsPerWindow;
};

struct NetworkState {
    double t = 0.0;
    Vector x;
    Vector xhat;
    Vector last_event;

    [[nodiscard]] Vector error() const { return xhat - x; }
};

struct EventRecord {
    double t = 0.0;
    int agent = 0;       ///< agent id or kAllAgents
    double value = 0.0;  ///< broadcast state; for kAllAgents the broadcast sum 1^T xhat
};

struct ZenoFlag {
    int agent = 0;
    double t = 0.0;
};

struct Trace {
    int n = 0;
    SimConfig config;  ///< resolved settings actually used
    Vector x0;
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> xhats;
    std::vector<double> lyapunov;  ///< V = 1/2 ||x - mean(x0) 1||^2
    std::vector<EventRecord> events;
    std::vector<ZenoFlag> zeno_flags;
    NetworkState final_state;
};

/// Raised when one agent fires more than max_events_per_window times inside a
/// single integrator step. Carries everything logged up to the abort.
class ZenoAbortError : public Error {
public:
    ZenoAbortError(int agent, double t, Trace partial);

    [[nodiscard]] int agent() const noexcept { return agent_; }
    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] const Trace& partial_trace() const noexcept { return partial_; }
    [[nodiscard]] const std::vector<EventRecord>& events() const noexcept { return partial_.events; }

private:
    int agent_;
    double t_;
    Trace partial_;
};

/// Fills in derived defaults and checks the invariants event_tol < dt and
/// zeno_floor < dt. For a periodic law dt is coerced to h / ceil(h / dt) so
/// sample instants land on the integration grid.
[[nodiscard]] SimConfig resolve_config(const SimConfig& cfg, const SpectralInfo& spec, const TriggerLaw& law);

/// Classical RK4 step for x' = f(x).
template <class F>
[[nodiscard]] Vector rk4_step(const F& f, const Vector& x, double h) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// x' = -Lx with fixed-step RK4.
[[nodiscard]] Trace simulate_ideal(const WeightedDigraph& g, const Vector& x0, const SimConfig& cfg);

/// x' = -L xhat with sample-and-hold broadcasts scheduled by `law`.
///
/// Every agent broadcasts at t = 0. Continuous laws are checked after each
/// step; a violating step is bisected down to event_tol and the event fires at
/// the right end of the final bracket. Events at the same instant cascade in
/// ascending agent order until no predicate holds. The periodic law is only
/// checked at multiples of h.
[[nodiscard]] Trace simulate_triggered(const WeightedDigraph& g, const TriggerLaw& law, const Vector& x0,
                                       const SimConfig& cfg);

/// Lower bound sigma / (||L|| (1 + sigma)) on centralized inter-event times.
[[nodiscard]] double min_inter_event_bound_centralized(const WeightedDigraph& g, double sigma);

/// Ultimate disagreement radius ||L|| sqrt(N) c0 / lambda_2 of the
/// time-dependent law.
[[nodiscard]] double convergence_radius_time_trigger(const WeightedDigraph& g, double c0);

/// CSV header "t,x_0..x_{n-1},xhat_0..xhat_{n-1},V".
void write_trace_csv(std::ostream& out, const Trace& trace);
/// CSV header "t,agent,value"; centralized events print agent as ALL.
void write_events_csv(std::ostream& out, const std::vector<EventRecord>& events);

/// Shortest round-trip decimal representation used by every CSV writer.
[[nodiscard]] std::string format_number(double v);

}  // namespace etcon
