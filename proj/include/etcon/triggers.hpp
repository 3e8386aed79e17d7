#pragma once

#include "etcon/graph.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace etcon {

/// Sigma used when a law block omits it.
inline constexpr double kDefaultSigma = 0.5;

// ---------------------------------------------------------------------------
// Trigger laws. Each is an immutable parameter bundle; the engine decides when
// to evaluate it, the evaluators below decide whether it fires.
// ---------------------------------------------------------------------------

/// Plain continuous controller x' = -Lx; no events at all.
struct IdealLaw {};

/// Whole-network update when ||e|| >= sigma ||Lx|| / ||L||.
struct CentralizedNorm {
    double sigma = kDefaultSigma;
};

/// Per-agent control update when e_i^2 >= sigma_i a (1 - a|N_i|) / |N_i| z_i^2,
/// z_i = sum_j (x_i - x_j) over exact neighbor states. Derived for unit weights.
struct DecentralizedState {
    std::vector<double> sigma_i;
    double a = 0.0;
};

/// Per-agent broadcast when |e_i| >= c0 + c1 exp(-alpha t).
struct TimeDependent {
    double c0 = 0.0;
    double c1 = 0.0;
    double alpha = 1.0;
};

/// Per-agent broadcast when e_i^2 >= sigma_i / (4|N_i|) sum_j (xhat_i - xhat_j)^2.
struct StateDependent {
    std::vector<double> sigma_i;
};

/// Weighted variant for weight-balanced digraphs:
/// e_i^2 >= sigma_i / (4 d_i^out) sum_j w_ij (xhat_i - xhat_j)^2.
struct DirectedStateDependent {
    std::vector<double> sigma_i;
};

/// DirectedStateDependent checked only at t in {0, h, 2h, ...}.
struct PeriodicStateDependent {
    std::vector<double> sigma_i;
    double h = 0.0;
};

using TriggerLaw = std::variant<IdealLaw, CentralizedNorm, DecentralizedState, TimeDependent,
                                StateDependent, DirectedStateDependent, PeriodicStateDependent>;

/// Config-file tag of a law ("ideal", "centralized", "decentralized",
/// "time_dependent", "state_dependent", "directed_state_dependent", "periodic").
[[nodiscard]] std::string law_name(const TriggerLaw& law);

/// Broadcasts a scalar sigma to n agents; an empty vector becomes the default.
[[nodiscard]] std::vector<double> expand_sigma(const std::vector<double>& sigma, int n);

/// Checks every parameter against the graph it will run on and returns the law
/// with per-agent sigma vectors expanded to length n. Throws
/// Error(InvalidParameter) naming the offending field, or IsolatedAgent if a
/// per-agent law meets an agent without out-neighbors.
[[nodiscard]] TriggerLaw validate_law(const TriggerLaw& law, const WeightedDigraph& g);

// ---------------------------------------------------------------------------
// Local evaluation.
// ---------------------------------------------------------------------------

struct NeighborBroadcast {
    int j = 0;
    double w_ij = 0.0;
    double xhat_j = 0.0;
};

/// Everything agent i may legally use to decide whether to broadcast.
struct AgentView {
    int i = 0;
    double x_i = 0.0;
    double xhat_i = 0.0;
    std::vector<NeighborBroadcast> xhat_neighbors;
    double t = 0.0;
    double d_out_i = 0.0;
    int card_Ni = 0;

    [[nodiscard]] double error() const noexcept { return xhat_i - x_i; }
};

struct NeighborState {
    int j = 0;
    double x_j = 0.0;
};

/// View of agent i over its out-neighbors.
[[nodiscard]] AgentView make_agent_view(const WeightedDigraph& g, int i, const Vector& x,
                                        const Vector& xhat, double t);

/// Predicates are inclusive (fire when the trigger function is >= 0) but never
/// fire on an exactly zero error: rebroadcasting an unchanged value cannot
/// change anything.
[[nodiscard]] bool eval_centralized(double sigma, const Vector& x, const Vector& xhat,
                                    const Matrix& L, double normL);

[[nodiscard]] bool eval_decentralized_state(const AgentView& view, double sigma_i, double a,
                                            const std::vector<NeighborState>& x_neighbors_exact);

[[nodiscard]] bool eval_time_dependent(double e_i, double t, double c0, double c1, double alpha);

[[nodiscard]] bool eval_state_dependent(const AgentView& view, double sigma_i);

[[nodiscard]] bool eval_directed_state_dependent(const AgentView& view, double sigma_i);

/// Supremum h* of sampling periods with sigma_max + 4 h w_max |N_max^out| < 1;
/// every h < h* qualifies.
[[nodiscard]] double max_admissible_period(double sigma_max, double w_max, int n_out_max);

/// h* for a particular graph and sigma vector.
[[nodiscard]] double max_admissible_period(const WeightedDigraph& g, const std::vector<double>& sigma_i);

}  // namespace etcon
